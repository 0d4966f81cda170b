#include "reloc/perron.hpp"

#include <numeric>

namespace reloc {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace {

void check_square_nonnegative(const Matrix& m) {
  if (!m.is_square() || m.rows() == 0) throw Error(ErrorCode::NotSquare, "Perron computation needs a square matrix");
  if (m.min_entry() < 0.0) throw Error(ErrorCode::NegativeEntry, "Perron computation needs a nonnegative matrix");
}

}  // namespace

PerronTriple perron_triple(const Matrix& m, PowerOptions opts) {
  check_square_nonnegative(m);
  opts.shift = kPerronShift * m.max_row_sum();

  const PowerResult right = power_iterate(
      m.rows(), [&](std::span<const double> x, std::span<double> y) { m.multiply(x, y); }, opts);
  const PowerResult left = power_iterate(
      m.rows(), [&](std::span<const double> x, std::span<double> y) { m.left_multiply(x, y); }, opts);

  PerronTriple out;
  out.r = right.radius;
  out.iterations = right.iterations + left.iterations;
  out.rho = left.vector;
  const double mass = std::accumulate(out.rho.begin(), out.rho.end(), 0.0);
  for (double& x : out.rho) x /= mass;
  out.h = right.vector;
  double pairing = 0.0;
  for (std::size_t i = 0; i < out.h.size(); ++i) pairing += out.rho[i] * out.h[i];
  for (double& x : out.h) x /= pairing;
  return out;
}

PerronTriple perron_triple(const SubStochasticMatrix& sigma, PowerOptions opts) {
  return perron_triple(sigma.entries(), opts);
}

double spectral_radius(const Matrix& m, PowerOptions opts) {
  check_square_nonnegative(m);
  opts.shift = kPerronShift * m.max_row_sum();
  return power_iterate(
             m.rows(), [&](std::span<const double> x, std::span<double> y) { m.multiply(x, y); }, opts)
      .radius;
}

}  // namespace reloc
