#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace reloc {

struct NelderMeadOptions {
  double initial_step = 0.5;
  /// Stop when the spread of simplex values is below f_tol (absolute) and
  /// the simplex diameter is below x_tol.
  double f_tol = 1e-13;
  double x_tol = 1e-9;
  std::size_t max_evaluations = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Minimizes f from x0. Non-finite values are treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts = {});

}  // namespace reloc
