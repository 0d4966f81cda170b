#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "reloc/error.hpp"

namespace reloc {

struct PowerOptions {
  /// Stop once the Collatz-Wielandt gap max_i (Av)_i/v_i - min_i (Av)_i/v_i
  /// falls below tolerance * max.
  double tolerance = 1e-14;
  std::size_t max_iterations = 100000;
  /// Absolute diagonal shift applied during the iteration and removed from
  /// the reported bounds.
  double shift = 0.0;
};

struct PowerResult {
  double radius = 0.0;
  /// Certified Collatz-Wielandt bounds for the unshifted operator.
  double lower = 0.0;
  double upper = 0.0;
  /// Positive vector, sup-norm 1.
  std::vector<double> vector;
  std::size_t iterations = 0;
};

/// Power iteration for a nonnegative operator given as apply(in, out).
/// Throws NoConvergence when the gap does not close within max_iterations.
template <class Apply>
PowerResult power_iterate(std::size_t n, Apply&& apply, const PowerOptions& opts,
                          std::vector<double> start = {}) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "power iteration on empty operator");
  std::vector<double> v = start.empty() ? std::vector<double>(n, 1.0) : std::move(start);
  if (v.size() != n) throw Error(ErrorCode::InvalidArgument, "start vector has wrong size");
  std::vector<double> w(n);

  PowerResult out;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    apply(std::span<const double>(v), std::span<double>(w));
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += opts.shift * v[i];
      if (v[i] > 0.0) {
        const double ratio = w[i] / v[i];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      } else if (w[i] > 0.0) {
        hi = std::numeric_limits<double>::infinity();
        lo = 0.0;
      } else {
        lo = 0.0;
      }
      top = std::max(top, w[i]);
    }
    if (!(top > 0.0) || !std::isfinite(top)) {
      throw Error(ErrorCode::NoConvergence, "iterate vanished or overflowed");
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / top;
    out.iterations = it;
    if (std::isfinite(hi) && hi - lo <= opts.tolerance * hi) {
      out.lower = lo - opts.shift;
      out.upper = hi - opts.shift;
      out.radius = 0.5 * (lo + hi) - opts.shift;
      out.vector = std::move(v);
      return out;
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "power iteration did not converge in " + std::to_string(opts.max_iterations) + " iterations");
}

/// Pairwise (cascade) summation; result does not depend on thread count.
double pairwise_sum(std::span<const double> xs);

}  // namespace reloc
