#include "reloc/relocation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "reloc/format.hpp"

namespace reloc {

RelocationLaw RelocationLaw::explicit_law(std::vector<double> masses) {
  while (masses.size() > 1 && masses.back() == 0.0) masses.pop_back();
  if (masses.empty()) throw Error(ErrorCode::InvalidArgument, "explicit law needs at least one mass");
  double total = 0.0;
  for (double x : masses) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "relocation masses must be >= 0");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "relocation masses sum to " + format_real(total) + ", expected 1");
  }
  RelocationLaw law;
  law.kind_ = Kind::Explicit;
  law.masses_ = std::move(masses);
  law.tails_.assign(law.masses_.size() + 1, 0.0);
  for (std::size_t i = law.masses_.size(); i-- > 0;) law.tails_[i] = law.tails_[i + 1] + law.masses_[i];
  // tail(0) is 1 by definition; absorb rounding.
  law.tails_[0] = 1.0;
  return law;
}

RelocationLaw RelocationLaw::dirac(std::size_t d) {
  RelocationLaw law;
  law.kind_ = Kind::Dirac;
  law.dirac_at_ = d;
  return law;
}

RelocationLaw RelocationLaw::geometric(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "geometric parameter must lie in (0,1)");
  RelocationLaw law;
  law.kind_ = Kind::Geometric;
  law.eps_ = eps;
  return law;
}

RelocationLaw RelocationLaw::parse(std::string_view spec) {
  std::string text(spec);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::string name;
  in >> name;
  std::vector<std::string> args;
  for (std::string tok; in >> tok;) args.push_back(tok);

  auto number = [&](const std::string& tok) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw Error(ErrorCode::ParseError, "bad number '" + tok + "' in relocation law '" + std::string(spec) + "'");
    }
    return v;
  };

  if (name == "dirac") {
    if (args.size() != 1) throw Error(ErrorCode::ParseError, "usage: dirac d");
    const double d = number(args[0]);
    if (d < 0 || d != std::floor(d)) throw Error(ErrorCode::ParseError, "dirac location must be a nonnegative integer");
    return dirac(static_cast<std::size_t>(d));
  }
  if (name == "geometric") {
    if (args.size() != 1) throw Error(ErrorCode::ParseError, "usage: geometric eps");
    return geometric(number(args[0]));
  }
  if (name == "explicit") {
    if (args.empty()) throw Error(ErrorCode::ParseError, "usage: explicit p0 p1 ... pd");
    std::vector<double> masses;
    for (const auto& a : args) masses.push_back(number(a));
    return explicit_law(std::move(masses));
  }
  throw Error(ErrorCode::ParseError, "unknown relocation law '" + std::string(spec) + "'");
}

std::string RelocationLaw::to_string() const {
  switch (kind_) {
    case Kind::Dirac: return "dirac " + std::to_string(dirac_at_);
    case Kind::Geometric: return "geometric " + format_real(eps_);
    case Kind::Explicit: return "explicit " + join_reals(masses_, ' ');
  }
  return {};
}

double RelocationLaw::mass(std::size_t i) const {
  switch (kind_) {
    case Kind::Dirac: return i == dirac_at_ ? 1.0 : 0.0;
    case Kind::Geometric: return eps_ * std::pow(1.0 - eps_, static_cast<double>(i));
    case Kind::Explicit: return i < masses_.size() ? masses_[i] : 0.0;
  }
  return 0.0;
}

double RelocationLaw::tail(std::size_t n) const {
  switch (kind_) {
    case Kind::Dirac: return n <= dirac_at_ ? 1.0 : 0.0;
    case Kind::Geometric: return std::pow(1.0 - eps_, static_cast<double>(n));
    case Kind::Explicit: return n < tails_.size() ? tails_[n] : 0.0;
  }
  return 0.0;
}

double RelocationLaw::mean() const {
  switch (kind_) {
    case Kind::Dirac: return static_cast<double>(dirac_at_);
    case Kind::Geometric: return (1.0 - eps_) / eps_;
    case Kind::Explicit: {
      double acc = 0.0;
      for (std::size_t i = 0; i < masses_.size(); ++i) acc += static_cast<double>(i) * masses_[i];
      return acc;
    }
  }
  return std::numeric_limits<double>::infinity();
}

std::optional<std::size_t> RelocationLaw::support_max() const {
  switch (kind_) {
    case Kind::Dirac: return dirac_at_;
    case Kind::Geometric: return std::nullopt;
    case Kind::Explicit: return masses_.size() - 1;
  }
  return std::nullopt;
}

bool RelocationLaw::is_dirac() const {
  if (kind_ == Kind::Dirac) return true;
  if (kind_ == Kind::Explicit) {
    return std::count_if(masses_.begin(), masses_.end(), [](double x) { return x > 0.0; }) == 1;
  }
  return false;
}

std::vector<double> RelocationLaw::bounded_masses() const {
  const auto d = support_max();
  if (!d) throw Error(ErrorCode::Unsupported, "relocation law '" + to_string() + "' has unbounded support");
  std::vector<double> out(*d + 1);
  for (std::size_t i = 0; i <= *d; ++i) out[i] = mass(i);
  return out;
}

HistoryWindow::HistoryWindow(std::vector<State> states) : states_(std::move(states)) {
  if (states_.empty()) throw Error(ErrorCode::InvalidArgument, "history window must be nonempty");
}

HistoryWindow HistoryWindow::constant(State s, std::size_t length) {
  return HistoryWindow(std::vector<State>(std::max<std::size_t>(length, 1), s));
}

TruncationResult truncate_law(const RelocationLaw& tau, double delta_tail, std::size_t d_max, TruncationMode mode) {
  if (!(delta_tail > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta_tail must be positive");
  TruncationResult out;
  out.mode = mode;

  std::size_t d = 0;
  if (const auto top = tau.support_max()) {
    d = *top;
    if (tau.kind() == RelocationLaw::Kind::Explicit) {
      // smallest d with the dropped mass below delta
      d = 0;
      while (d < *top && tau.tail(d + 1) > delta_tail) ++d;
    }
  } else {
    while (tau.tail(d + 1) > delta_tail && d < d_max) ++d;
  }
  if (d > d_max) d = d_max;
  out.d = d;
  out.dropped = tau.tail(d + 1);
  out.cap_reached = out.dropped > delta_tail;

  out.masses.resize(d + 1);
  for (std::size_t i = 0; i <= d; ++i) out.masses[i] = tau.mass(i);
  out.retained = std::accumulate(out.masses.begin(), out.masses.end(), 0.0);
  if (!(out.retained > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "truncation at d=" + std::to_string(d) + " keeps no mass");
  }
  if (mode == TruncationMode::Renormalized) {
    for (double& x : out.masses) x /= out.retained;
  }
  return out;
}

namespace {

/// Mass attached to each stored window position, the oldest absorbing the
/// tail beyond the window.
std::vector<double> window_masses(const HistoryWindow& w, const RelocationLaw& tau) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i + 1 < w.size(); ++i) out[i] = tau.mass(i);
  out.back() = tau.tail(w.size() - 1);
  return out;
}

void check_window(const HistoryWindow& w, std::size_t m) {
  for (State s : w.states()) {
    if (s >= m) throw Error(ErrorCode::InvalidArgument, "window state " + std::to_string(s) + " out of range");
  }
}

}  // namespace

ProbabilityVector occupation_measure(const HistoryWindow& w, const RelocationLaw& tau, std::size_t m) {
  check_window(w, m);
  const auto masses = window_masses(w, tau);
  std::vector<double> theta(m, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) theta[w[i]] += masses[i];
  return ProbabilityVector::normalized(std::move(theta));
}

std::vector<double> defective_kernel_row(const HistoryWindow& w, const Matrix& sigma, const RelocationLaw& tau) {
  const auto theta = occupation_measure(w, tau, sigma.rows());
  std::vector<double> row(sigma.cols());
  sigma.left_multiply(theta.span(), row);
  return row;
}

std::vector<double> truncated_kernel_row(const HistoryWindow& w, const Matrix& sigma, std::span<const double> masses) {
  check_window(w, sigma.rows());
  std::vector<double> row(sigma.cols(), 0.0);
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const auto r = sigma.row(w[i]);
    for (std::size_t t = 0; t < row.size(); ++t) row[t] += masses[i] * r[t];
  }
  return row;
}

ProbabilityVector biased_kernel_row(const HistoryWindow& w, const Matrix& sigma, const RelocationLaw& tau,
                                    const TiltVector& a) {
  const auto theta = occupation_measure(w, tau, sigma.rows());
  return phi_map(theta, tilt(sigma, a));
}

ProbabilityVector biased_kernel_row_two_stage(const HistoryWindow& w, const Matrix& sigma,
                                              const RelocationLaw& tau, const TiltVector& a) {
  check_window(w, sigma.rows());
  const auto masses = window_masses(w, tau);
  const auto sa = apply_tilt(sigma, a);
  const Matrix pi = biased_transition(sigma, a);

  std::vector<double> pick(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) pick[i] = masses[i] * sa[w[i]];
  const double total = std::accumulate(pick.begin(), pick.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateImage, "K a vanishes on this window");

  std::vector<double> row(sigma.cols(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto p = pi.row(w[i]);
    for (std::size_t t = 0; t < row.size(); ++t) row[t] += pick[i] / total * p[t];
  }
  return ProbabilityVector::normalized(std::move(row));
}

std::string HypothesisReport::summary() const {
  std::ostringstream out;
  out << "finite_mean=" << finite_mean << " tail_o_inverse_sqrt=" << tail_o_inverse_sqrt
      << " exponential_tail=" << exponential_tail << " sigma_positive=" << sigma_positive
      << " tau_dirac=" << tau_dirac << " finite_mean_route=" << finite_mean_route
      << " positive_kernel_route=" << positive_kernel_route << " strict_improvement=" << strict_improvement;
  return out.str();
}

HypothesisReport hypothesis_report(const Matrix& sigma, const RelocationLaw& tau) {
  HypothesisReport r;
  // Every supported family has a finite mean and an exponentially small tail.
  r.finite_mean = std::isfinite(tau.mean());
  r.exponential_tail = true;
  r.tail_o_inverse_sqrt = true;
  r.sigma_positive = sigma.min_entry() > 0.0;
  r.tau_dirac = tau.is_dirac();
  r.finite_mean_route = r.finite_mean;
  r.positive_kernel_route = r.sigma_positive && r.tail_o_inverse_sqrt;
  const auto sums = sigma.row_sums();
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  const bool proportional = (*hi - *lo) <= kRowSumTolerance;
  r.strict_improvement = !r.tau_dirac && !proportional && r.unique_ergodicity();
  r.hoelder_kernel = r.exponential_tail;
  return r;
}

}  // namespace reloc
