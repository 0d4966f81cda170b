#include "reloc/occupation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "reloc/power.hpp"

namespace reloc {

OccupationGrid::OccupationGrid(const Matrix& sigma, double eps, std::size_t cells)
    : sigma_(sigma), eps_(eps), cells_(cells) {
  if (sigma.rows() != 2 || sigma.cols() != 2) {
    throw Error(ErrorCode::Unsupported, "occupation grid is implemented for two states only");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0,1)");
  if (cells < 1) throw Error(ErrorCode::InvalidArgument, "need at least one cell");

  const std::size_t n = nodes();
  left_.resize(2 * n);
  frac_.resize(2 * n);
  w_.resize(2 * n);
  const double N = static_cast<double>(cells_);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / N;
    for (std::size_t t = 0; t < 2; ++t) {
      const double p = image(t, x) * N;
      const std::size_t j = std::min(static_cast<std::size_t>(std::floor(p)), cells_ - 1);
      left_[2 * k + t] = j;
      frac_[2 * k + t] = p - static_cast<double>(j);
      w_[2 * k + t] = weight(t, x);
    }
  }
}

double OccupationGrid::node_value(std::span<const double> in, std::size_t k) const noexcept {
  double acc = 0.0;
  for (std::size_t t = 0; t < 2; ++t) {
    const std::size_t j = left_[2 * k + t];
    const double f = frac_[2 * k + t];
    acc += w_[2 * k + t] * ((1.0 - f) * in[j] + f * in[j + 1]);
  }
  return acc;
}

void OccupationGrid::sweep(std::span<const double> in, std::span<double> out) const {
  for (std::size_t k = 0; k < nodes(); ++k) out[k] = node_value(in, k);
}

void OccupationGrid::sweep_parallel(std::span<const double> in, std::span<double> out) const {
  const auto n = static_cast<std::ptrdiff_t>(nodes());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = node_value(in, static_cast<std::size_t>(k));
}

std::pair<double, double> OccupationGrid::cell_ratio_range(std::span<const double> g, std::size_t k) const {
  // Local coordinate u in [0,1] on the cell [k/N, (k+1)/N].
  const double N = static_cast<double>(cells_);
  const double a = static_cast<double>(k) / N;
  const double contraction = 1.0 - eps_;
  const double A0 = g[k];
  const double A1 = g[k + 1] - g[k];

  // Grid coordinate of phi_t(a + u/N) is offset_t + contraction * u.
  std::array<double, 2> offset{};
  for (std::size_t t = 0; t < 2; ++t) offset[t] = N * (t == 0 ? eps_ : 0.0) + contraction * static_cast<double>(k);

  std::array<double, 4> cuts{0.0, 1.0, 0.0, 0.0};
  std::size_t n_cuts = 2;
  for (std::size_t t = 0; t < 2; ++t) {
    const double first = std::floor(offset[t]) + 1.0;
    if (first < offset[t] + contraction) cuts[n_cuts++] = (first - offset[t]) / contraction;
  }
  std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(n_cuts));

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t piece = 0; piece + 1 < n_cuts; ++piece) {
    const double u0 = cuts[piece];
    const double u1 = cuts[piece + 1];
    if (!(u1 > u0)) continue;
    const double mid = 0.5 * (u0 + u1);

    double q0 = 0.0, q1 = 0.0, q2 = 0.0;
    for (std::size_t t = 0; t < 2; ++t) {
      const double p = offset[t] + contraction * mid;
      const std::size_t j = std::min(static_cast<std::size_t>(std::floor(p)), cells_ - 1);
      const double slope = g[j + 1] - g[j];
      const double alpha = g[j] + slope * (offset[t] - static_cast<double>(j));
      const double beta = slope * contraction;
      const double omega = sigma_(1, t) + (sigma_(0, t) - sigma_(1, t)) * a;
      const double nu = (sigma_(0, t) - sigma_(1, t)) / N;
      q0 += omega * alpha;
      q1 += omega * beta + nu * alpha;
      q2 += nu * beta;
    }
    auto ratio = [&](double u) { return (q0 + u * (q1 + u * q2)) / (A0 + A1 * u); };
    auto consider = [&](double u) {
      if (u >= u0 && u <= u1) {
        const double r = ratio(u);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    };
    consider(u0);
    consider(u1);

    // Stationary points: q2 A1 u^2 + 2 q2 A0 u + (q1 A0 - q0 A1) = 0.
    const double c2 = q2 * A1;
    const double c1 = 2.0 * q2 * A0;
    const double c0 = q1 * A0 - q0 * A1;
    if (c2 != 0.0) {
      const double disc = c1 * c1 - 4.0 * c2 * c0;
      if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        const double qq = -0.5 * (c1 + std::copysign(s, c1));
        if (qq != 0.0) {
          consider(qq / c2);
          consider(c0 / qq);
        } else {
          consider(0.0);
        }
      }
    } else if (c1 != 0.0) {
      consider(-c0 / c1);
    }
  }
  return {lo, hi};
}

namespace {

std::vector<double> refine(const std::vector<double>& g) {
  std::vector<double> out(2 * (g.size() - 1) + 1);
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    out[2 * k] = g[k];
    out[2 * k + 1] = 0.5 * (g[k] + g[k + 1]);
  }
  out.back() = g.back();
  return out;
}

}  // namespace

OccupationBracket occupation_bracket(const Matrix& sigma, double eps, const OccupationOptions& opts) {
  if (sigma.rows() != 2 || sigma.cols() != 2) {
    throw Error(ErrorCode::Unsupported, "occupation bracket is implemented for two states only");
  }
  std::size_t level = opts.cells;
  while (level % 2 == 0 && level / 2 >= std::max<std::size_t>(opts.coarse_cells, 1)) level /= 2;

  PowerOptions power;
  power.tolerance = opts.tolerance;
  power.max_iterations = opts.max_iterations;

  OccupationBracket out;
  std::vector<double> g;
  while (true) {
    const OccupationGrid grid(sigma, eps, level);
    const PowerResult p = power_iterate(
        grid.nodes(),
        [&](std::span<const double> x, std::span<double> y) {
          if (opts.parallel) {
            grid.sweep_parallel(x, y);
          } else {
            grid.sweep(x, y);
          }
        },
        power, g);
    out.iterations += p.iterations;
    out.estimate = p.radius;
    g = p.vector;
    if (level >= opts.cells) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      const auto cells = static_cast<std::ptrdiff_t>(level);
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
      for (std::ptrdiff_t k = 0; k < cells; ++k) {
        const auto [a, b] = grid.cell_ratio_range(g, static_cast<std::size_t>(k));
        lo = std::min(lo, a);
        hi = std::max(hi, b);
      }
      out.lo = lo;
      out.hi = hi;
      out.cells = level;
      out.eigenfunction = std::move(g);
      return out;
    }
    g = refine(g);
    level *= 2;
  }
}

}  // namespace reloc
