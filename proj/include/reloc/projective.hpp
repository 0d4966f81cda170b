#pragma once

#include <span>
#include <vector>

#include "reloc/matrix.hpp"

namespace reloc {

inline constexpr double kSimplexTolerance = 1e-12;

/// Nonnegative row vector summing to one.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  /// Throws InvalidArgument unless entries are >= 0 and sum to 1 within
  /// kSimplexTolerance.
  explicit ProbabilityVector(std::vector<double> weights);
  /// Divides by the total; throws DegenerateImage on zero total.
  static ProbabilityVector normalized(std::vector<double> weights);
  static ProbabilityVector point_mass(std::size_t m, std::size_t s);
  static ProbabilityVector uniform(std::size_t m);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const noexcept { return w_; }
  std::span<const double> span() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

/// Strictly positive finite weights a over the states.
class TiltVector {
 public:
  explicit TiltVector(std::vector<double> a);
  static TiltVector ones(std::size_t m) { return TiltVector(std::vector<double>(m, 1.0)); }
  static TiltVector exp_of(std::span<const double> log_a);

  std::size_t size() const noexcept { return a_.size(); }
  double operator[](std::size_t i) const { return a_[i]; }
  const std::vector<double>& values() const noexcept { return a_; }
  TiltVector scaled(double c) const;

 private:
  std::vector<double> a_;
};

/// sigma_a(s,t) = sigma(s,t) a(t).
Matrix tilt(const Matrix& sigma, const TiltVector& a);

/// (sigma a)(s) = sum_t sigma(s,t) a(t).
std::vector<double> apply_tilt(const Matrix& sigma, const TiltVector& a);

/// pi(s,t) = sigma(s,t) a(t) / (sigma a)(s): the stochastic matrix driving
/// the weighted chain between relocations.
Matrix biased_transition(const Matrix& sigma, const TiltVector& a);

/// Phi_a(p) = p sigma_a / (p sigma_a 1).
ProbabilityVector phi_map(const ProbabilityVector& p, const Matrix& sigma_a);

/// log(max_s x(s)/y(s)) - log(min_t x(t)/y(t)); throws NonPositiveInput.
double hilbert_distance(std::span<const double> x, std::span<const double> y);

/// Birkhoff coefficient tanh(Delta/4) of a positive matrix acting on row
/// vectors. Returns 1 when any entry is zero (no contraction certified);
/// throws ZeroRow when a row vanishes.
double birkhoff_contraction(const Matrix& m);

/// Projective diameter log max_{s,s',t,t'} M(s,t)M(s',t')/(M(s,t')M(s',t)),
/// infinite when any entry is zero.
double projective_diameter(const Matrix& m);

}  // namespace reloc
