#include "reloc/projective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace reloc {

ProbabilityVector::ProbabilityVector(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw Error(ErrorCode::InvalidArgument, "probability vector must be nonempty");
  double total = 0.0;
  for (double x : w_) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "probability weights must be >= 0");
    total += x;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw Error(ErrorCode::InvalidArgument, "probability weights must sum to 1");
  }
}

ProbabilityVector ProbabilityVector::normalized(std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) throw Error(ErrorCode::DegenerateImage, "cannot normalize a zero vector");
  for (double& x : weights) x /= total;
  return ProbabilityVector(std::move(weights));
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t m, std::size_t s) {
  std::vector<double> w(m, 0.0);
  w.at(s) = 1.0;
  return ProbabilityVector(std::move(w));
}

ProbabilityVector ProbabilityVector::uniform(std::size_t m) {
  return normalized(std::vector<double>(m, 1.0));
}

TiltVector::TiltVector(std::vector<double> a) : a_(std::move(a)) {
  if (a_.empty()) throw Error(ErrorCode::InvalidArgument, "tilt vector must be nonempty");
  for (double x : a_) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::NonPositiveInput, "tilt weights must be positive and finite");
  }
}

TiltVector TiltVector::exp_of(std::span<const double> log_a) {
  std::vector<double> a(log_a.size());
  std::transform(log_a.begin(), log_a.end(), a.begin(), [](double x) { return std::exp(x); });
  return TiltVector(std::move(a));
}

TiltVector TiltVector::scaled(double c) const {
  std::vector<double> a = a_;
  for (double& x : a) x *= c;
  return TiltVector(std::move(a));
}

Matrix tilt(const Matrix& sigma, const TiltVector& a) {
  if (sigma.cols() != a.size()) throw Error(ErrorCode::InvalidArgument, "tilt dimension mismatch");
  Matrix out = sigma;
  for (std::size_t s = 0; s < out.rows(); ++s)
    for (std::size_t t = 0; t < out.cols(); ++t) out(s, t) *= a[t];
  return out;
}

std::vector<double> apply_tilt(const Matrix& sigma, const TiltVector& a) {
  if (sigma.cols() != a.size()) throw Error(ErrorCode::InvalidArgument, "tilt dimension mismatch");
  return sigma * std::span<const double>(a.values());
}

Matrix biased_transition(const Matrix& sigma, const TiltVector& a) {
  Matrix pi = tilt(sigma, a);
  const auto sa = apply_tilt(sigma, a);
  for (std::size_t s = 0; s < pi.rows(); ++s) {
    if (!(sa[s] > 0.0)) throw Error(ErrorCode::ZeroRow, "row " + std::to_string(s + 1) + " of sigma vanishes");
    for (double& x : pi.row(s)) x /= sa[s];
  }
  return pi;
}

ProbabilityVector phi_map(const ProbabilityVector& p, const Matrix& sigma_a) {
  if (p.size() != sigma_a.rows()) throw Error(ErrorCode::InvalidArgument, "phi_map dimension mismatch");
  std::vector<double> image(sigma_a.cols());
  sigma_a.left_multiply(p.span(), image);
  const double total = std::accumulate(image.begin(), image.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateImage, "p sigma_a vanishes");
  for (double& x : image) x /= total;
  return ProbabilityVector(std::move(image));
}

double hilbert_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw Error(ErrorCode::InvalidArgument, "hilbert_distance dimension mismatch");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorCode::NonPositiveInput, "hilbert_distance needs positive vectors");
    const double l = std::log(x[i]) - std::log(y[i]);
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  return hi - lo;
}

double projective_diameter(const Matrix& m) {
  if (m.min_entry() <= 0.0) return std::numeric_limits<double>::infinity();
  double delta = 0.0;
  const std::size_t n = m.rows();
  const std::size_t k = m.cols();
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t s2 = s + 1; s2 < n; ++s2)
      for (std::size_t t = 0; t < k; ++t)
        for (std::size_t t2 = 0; t2 < k; ++t2) {
          const double v = std::log(m(s, t)) + std::log(m(s2, t2)) - std::log(m(s, t2)) - std::log(m(s2, t));
          delta = std::max(delta, v);
        }
  return delta;
}

double birkhoff_contraction(const Matrix& m) {
  for (std::size_t s = 0; s < m.rows(); ++s) {
    const auto r = m.row(s);
    if (std::all_of(r.begin(), r.end(), [](double x) { return x == 0.0; })) {
      throw Error(ErrorCode::ZeroRow, "row " + std::to_string(s + 1) + " is zero");
    }
  }
  const double delta = projective_diameter(m);
  if (!std::isfinite(delta)) return 1.0;
  return std::tanh(delta / 4.0);
}

}  // namespace reloc
