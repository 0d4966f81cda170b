#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "reloc/matrix.hpp"
#include "reloc/projective.hpp"
#include "reloc/relocation.hpp"
#include "reloc/simulate.hpp"

namespace reloc {

/// J(a) = r_a exp(-rho_a . log a) for the tilt sigma_a.
struct ObjectiveEval {
  std::vector<double> a;
  double r_a = 0.0;
  std::vector<double> rho_a;
  double J = 0.0;
  double log_J = 0.0;
};

ObjectiveEval j_objective(const Matrix& sigma, const TiltVector& a);

struct OptimizeJOptions {
  std::size_t restarts = 8;
  double tolerance = 1e-12;
  /// Coordinate pinned to log a = 0; defaults to the last state.
  std::size_t gauge = std::numeric_limits<std::size_t>::max();
  std::uint64_t seed = 1;
};

struct OptimizeJResult {
  ObjectiveEval best;
  ObjectiveEval at_one;
  ObjectiveEval at_h;
  std::size_t evaluations = 0;
  std::vector<std::string> warnings;
};

/// Multi-start Nelder-Mead on log a with one coordinate pinned; starts at
/// log a = 0, log h and restarts - 2 standard Gaussian points.
OptimizeJResult optimize_j(const Matrix& sigma, const OptimizeJOptions& opts = {});

struct C2Estimate {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t steps = 0;
  std::size_t burnin = 0;
};

/// Time average of log K a(X(j-1)) - Theta(X(j-1)) . log a along the chain
/// with weighted relocations, a lower bound on the persistence exponent.
/// Throws Unsupported when no unique-ergodicity route applies.
C2Estimate c2_bound_estimate(const Matrix& sigma, const RelocationLaw& tau, const TiltVector& a,
                             const WeightedChainOptions& opts, RngSpec rng);

inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

/// Legendre transform value with the maximizing lambda (last coordinate 0).
struct LegendreValue {
  double value = 0.0;
  std::vector<double> lambda;
  bool unbounded_maximizer = false;
};

/// I(nu) = sup_lambda (nu . lambda - log r_{exp lambda}).
LegendreValue rate_function_I(const Matrix& sigma, std::span<const double> nu);

/// The same with the lifted radius of tilt(sigma, exp lambda) under the
/// bounded law tau.
LegendreValue rate_function_lifted_at(const Matrix& sigma, const RelocationLaw& tau, std::span<const double> nu);

struct RateFunctionTable {
  std::size_t m = 0;
  /// Row-major, m entries per grid point.
  std::vector<double> nu;
  std::vector<double> I;
  std::vector<double> I_bold;
  bool I_convex = true;
  bool I_bold_convex = true;
  /// Grid indices where I_bold > I + 1e-8.
  std::vector<std::size_t> violations;
  double log_r = 0.0;
  double log_r_bold = 0.0;

  std::size_t size() const noexcept { return I.size(); }
};

/// Simplex lattice with `resolution` points per edge (101 by default for
/// two states). Maximizers are shared between I and I_bold.
RateFunctionTable rate_function_lifted(const Matrix& sigma, const RelocationLaw& tau, std::size_t resolution = 101);

/// All nu with entries k/(resolution-1) summing to one.
std::vector<std::vector<double>> simplex_grid(std::size_t m, std::size_t resolution);

}  // namespace reloc
