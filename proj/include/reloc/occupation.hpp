#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "reloc/matrix.hpp"

namespace reloc {

/// For a geometric law on two states the kernel depends on the history only
/// through x = Theta(w)(0) in [0,1], the weight on state index 0. Visiting t moves x to
/// eps [t = 0] + (1 - eps) x, with weight w_t(x) = x sigma(0,t) + (1-x) sigma(1,t).
/// Functions of x are approximated by piecewise-linear interpolants on the
/// nodes k/N.
class OccupationGrid {
 public:
  OccupationGrid(const Matrix& sigma, double eps, std::size_t cells);

  std::size_t cells() const noexcept { return cells_; }
  std::size_t nodes() const noexcept { return cells_ + 1; }
  double eps() const noexcept { return eps_; }
  const Matrix& sigma() const noexcept { return sigma_; }

  double weight(std::size_t t, double x) const noexcept {
    return x * sigma_(0, t) + (1.0 - x) * sigma_(1, t);
  }
  double image(std::size_t t, double x) const noexcept { return (t == 0 ? eps_ : 0.0) + (1.0 - eps_) * x; }

  /// Nodal values of K g where g interpolates the nodal values in.
  void sweep(std::span<const double> in, std::span<double> out) const;
  /// OpenMP version; bitwise equal to sweep().
  void sweep_parallel(std::span<const double> in, std::span<double> out) const;

  /// Exact min and max of (K g)(x) / g(x) over [x_k, x_{k+1}].
  std::pair<double, double> cell_ratio_range(std::span<const double> g, std::size_t k) const;

 private:
  double node_value(std::span<const double> in, std::size_t k) const noexcept;

  Matrix sigma_;
  double eps_;
  std::size_t cells_;
  // Per node and target state: left interpolation node and fraction.
  std::vector<std::size_t> left_;
  std::vector<double> frac_;
  std::vector<double> w_;
};

struct OccupationOptions {
  std::size_t cells = 16384;
  std::size_t coarse_cells = 256;
  double tolerance = 1e-11;
  std::size_t max_iterations = 200000;
  bool parallel = true;
};

struct OccupationBracket {
  double lo = 0.0;
  double hi = 0.0;
  /// Nodal power-iteration estimate.
  double estimate = 0.0;
  std::size_t cells = 0;
  std::size_t iterations = 0;
  std::vector<double> eigenfunction;
};

/// Certified bounds on the lifted radius for a geometric law on two states:
/// inf and sup over [0,1] of K g / g for the converged interpolant g.
/// Throws Unsupported unless sigma is 2x2.
OccupationBracket occupation_bracket(const Matrix& sigma, double eps, const OccupationOptions& opts = {});

}  // namespace reloc
