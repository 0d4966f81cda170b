#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "reloc/matrix.hpp"
#include "reloc/power.hpp"
#include "reloc/relocation.hpp"

namespace reloc {

inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 21;

enum class LiftMode { Exact, Lower, Upper };

/// The relocation chain restricted to memory windows (w_0, ..., w_d) in S^{d+1}.
/// Window w has index sum_k w_k m^{d-k}, so w_0 is the most significant digit
/// and the successor after moving to t is t m^d + index / m.
class LiftedChain {
 public:
  std::size_t m() const noexcept { return m_; }
  std::size_t d() const noexcept { return d_; }
  std::size_t size() const noexcept { return n_states_; }
  LiftMode mode() const noexcept { return mode_; }
  const Matrix& sigma() const noexcept { return sigma_; }
  std::span<const double> masses() const noexcept { return masses_; }
  double tail_mass() const noexcept { return tail_; }

  std::size_t successor(std::size_t index, std::size_t t) const noexcept { return t * stride_ + index / m_; }
  /// Weight of the move window(index) -> successor(index, t).
  double weight(std::size_t index, std::size_t t) const noexcept { return weights_[index * m_ + t]; }
  std::span<const double> weights() const noexcept { return weights_; }

  std::size_t index_of(const HistoryWindow& w) const;
  HistoryWindow window_at(std::size_t index) const;

  double max_row_sum() const;

  /// y = K_d x, serial.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// y = K_d x, OpenMP over windows; bitwise equal to apply().
  void apply_parallel(std::span<const double> x, std::span<double> y) const;

  /// Dense copy, for small chains only.
  Matrix to_dense() const;

 private:
  friend LiftedChain build_lifted(const Matrix&, std::span<const double>, LiftMode, double, std::size_t);

  Matrix sigma_;
  std::vector<double> masses_;
  double tail_ = 0.0;
  LiftMode mode_ = LiftMode::Exact;
  std::size_t m_ = 0;
  std::size_t d_ = 0;
  std::size_t n_states_ = 0;
  std::size_t stride_ = 1;
  std::vector<double> weights_;
};

/// Throws StateCapExceeded when m^{d+1} > state_cap. Upper mode adds
/// tail_mass * max_u sigma(u, t) to every weight toward t; tail_mass is
/// ignored otherwise.
LiftedChain build_lifted(const Matrix& sigma, std::span<const double> masses, LiftMode mode,
                         double tail_mass = 0.0, std::size_t state_cap = kDefaultStateCap);
/// Lower mode for conservative truncations, Exact for renormalized ones,
/// unless Upper is requested.
LiftedChain build_lifted(const Matrix& sigma, const TruncationResult& truncation, LiftMode mode,
                         std::size_t state_cap = kDefaultStateCap);
/// Exact lift of a law with bounded support.
LiftedChain build_lifted(const Matrix& sigma, const RelocationLaw& tau, std::size_t state_cap = kDefaultStateCap);

struct SpectralResult {
  double radius = 0.0;
  std::vector<double> right_vector;
  std::size_t iterations = 0;
  /// ||K v - radius v||_inf / radius.
  double residual = 0.0;
  /// Collatz-Wielandt bounds at the final iterate.
  double lower = 0.0;
  double upper = 0.0;
};

/// Matrix-free power iteration with a shift of 0.1 * max row sum.
SpectralResult lifted_spectral_radius(const LiftedChain& chain, PowerOptions opts = {});

/// P(zeta > n) started from the window init: (K_d^n 1)(init).
double survival_exact(const LiftedChain& chain, const HistoryWindow& init, std::size_t n);
/// log of the above, computed with rescaled sweeps so it stays finite.
double log_survival_exact(const LiftedChain& chain, const HistoryWindow& init, std::size_t n);

/// Irreducibility and aperiodicity of the support digraph of the lift.
StructureFlags lifted_structure_check(const LiftedChain& chain);

struct BracketOptions {
  double delta_tail = 1e-10;
  std::size_t d_max = 14;
  std::size_t state_cap = kDefaultStateCap;
  /// Tolerance of the window power iterations; the reported bounds are
  /// Collatz-Wielandt bounds and stay valid at any tolerance.
  double tolerance = 1e-11;
  /// Use the occupation-state bracket for geometric laws on two states.
  bool use_occupation = true;
  std::size_t occupation_cells = 16384;
};

struct RadiusBracket {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t d_used = 0;
  double tail_mass = 0.0;
  bool exact = false;
  /// The state cap or d_max stopped the window before the tail fell below
  /// delta_tail.
  bool cap_reached = false;
  /// Window-lift bounds before intersecting with the occupation bracket.
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::string method;
};

RadiusBracket bracket_radius(const Matrix& sigma, const RelocationLaw& tau, const BracketOptions& opts = {});

/// Largest d with m^{d+1} <= state_cap.
std::size_t max_affordable_depth(std::size_t m, std::size_t state_cap);

}  // namespace reloc
