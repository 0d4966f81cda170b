#pragma once

#include <vector>

#include "reloc/matrix.hpp"
#include "reloc/power.hpp"

namespace reloc {

/// Spectral radius r with right eigenvector h and left eigenvector rho,
/// normalized by sum(rho) = 1 and rho.h = 1.
struct PerronTriple {
  double r = 0.0;
  std::vector<double> h;
  std::vector<double> rho;
  std::size_t iterations = 0;
};

/// Relative diagonal shift used for dense Perron computations.
inline constexpr double kPerronShift = 0.1;

/// Power iteration on M and on its transpose. M must be nonnegative,
/// irreducible and aperiodic; a shift of 0.1 * max row sum is applied
/// internally.
PerronTriple perron_triple(const Matrix& m, PowerOptions opts = {});
PerronTriple perron_triple(const SubStochasticMatrix& sigma, PowerOptions opts = {});

/// Spectral radius only (right iteration).
double spectral_radius(const Matrix& m, PowerOptions opts = {});

}  // namespace reloc
