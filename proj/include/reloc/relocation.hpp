#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reloc/matrix.hpp"
#include "reloc/projective.hpp"

namespace reloc {

/// Law of the relocation lag T on {0, 1, 2, ...}. Only closed-form families
/// are supported so that tails and means are exact.
class RelocationLaw {
 public:
  enum class Kind { Explicit, Dirac, Geometric };

  /// Masses over {0..d}; trailing zeros are trimmed. Must sum to 1 within
  /// 1e-12.
  static RelocationLaw explicit_law(std::vector<double> masses);
  static RelocationLaw dirac(std::size_t d);
  /// tau(k) = eps (1 - eps)^k, eps in (0, 1).
  static RelocationLaw geometric(double eps);

  /// `dirac d` | `geometric eps` | `explicit p0 p1 ... pd`.
  static RelocationLaw parse(std::string_view spec);
  std::string to_string() const;

  Kind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return eps_; }

  double mass(std::size_t i) const;
  /// sum_{i >= n} tau(i).
  double tail(std::size_t n) const;
  /// Possibly infinite.
  double mean() const;
  /// Largest i with tau(i) > 0, when bounded.
  std::optional<std::size_t> support_max() const;
  bool is_dirac() const;

  /// masses over {0..support_max()}; throws Unsupported for unbounded laws.
  std::vector<double> bounded_masses() const;

 private:
  Kind kind_ = Kind::Dirac;
  std::vector<double> masses_;
  std::vector<double> tails_;
  std::size_t dirac_at_ = 0;
  double eps_ = 0.0;
};

/// A finite memory window (s_0, ..., s_d), most recent first. Positions past
/// the stored window reuse the oldest stored entry.
class HistoryWindow {
 public:
  explicit HistoryWindow(std::vector<State> states);
  static HistoryWindow constant(State s, std::size_t length);

  std::size_t size() const noexcept { return states_.size(); }
  State operator[](std::size_t i) const { return i < states_.size() ? states_[i] : states_.back(); }
  const std::vector<State>& states() const noexcept { return states_; }

 private:
  std::vector<State> states_;
};

enum class TruncationMode { Conservative, Renormalized };

struct TruncationResult {
  std::vector<double> masses;  // over {0..d}
  std::size_t d = 0;
  double retained = 1.0;       // sum_{i <= d} tau(i)
  double dropped = 0.0;        // tail(d + 1)
  TruncationMode mode = TruncationMode::Conservative;
  bool cap_reached = false;    // d_max was hit before the tail fell below delta
};

/// Smallest d with tail(d+1) <= delta_tail, capped at d_max. Conservative
/// mode keeps the raw masses; renormalized mode divides by retained.
TruncationResult truncate_law(const RelocationLaw& tau, double delta_tail, std::size_t d_max,
                              TruncationMode mode = TruncationMode::Conservative);

/// Theta(w, t) = sum_{i : w_i = t} tau(i), with the mass beyond the window
/// assigned to its oldest entry, renormalized onto the simplex.
ProbabilityVector occupation_measure(const HistoryWindow& w, const RelocationLaw& tau, std::size_t m);

/// k(t | w) = (Theta(w) sigma)(t). Row sum is the survival probability of
/// the next step.
std::vector<double> defective_kernel_row(const HistoryWindow& w, const Matrix& sigma, const RelocationLaw& tau);

/// Raw truncated kernel sum_{i <= d} masses[i] sigma(w_i, .) for explicit
/// (possibly unnormalized) masses.
std::vector<double> truncated_kernel_row(const HistoryWindow& w, const Matrix& sigma, std::span<const double> masses);

/// g(t | w) = k(t | w) a(t) / (K a)(w).
ProbabilityVector biased_kernel_row(const HistoryWindow& w, const Matrix& sigma, const RelocationLaw& tau,
                                    const TiltVector& a);

/// The same row via the two-stage description: choose a window position i
/// with probability proportional to tau(i) (sigma a)(w_i), then move by
/// pi(w_i, .).
ProbabilityVector biased_kernel_row_two_stage(const HistoryWindow& w, const Matrix& sigma,
                                              const RelocationLaw& tau, const TiltVector& a);

/// Which ergodicity hypotheses hold for the pair (sigma, tau).
struct HypothesisReport {
  bool finite_mean = false;
  bool tail_o_inverse_sqrt = false;
  bool exponential_tail = false;
  bool sigma_positive = false;
  bool tau_dirac = false;
  /// Unique ergodicity via finite first moment.
  bool finite_mean_route = false;
  /// Unique ergodicity via positive sigma and tail o(n^{-1/2}).
  bool positive_kernel_route = false;
  /// Strict improvement over the benchmark rate is guaranteed.
  bool strict_improvement = false;
  /// Kernel is Hoelder on sequence space.
  bool hoelder_kernel = false;

  bool unique_ergodicity() const noexcept { return finite_mean_route || positive_kernel_route; }
  std::string summary() const;
};

HypothesisReport hypothesis_report(const Matrix& sigma, const RelocationLaw& tau);

}  // namespace reloc
