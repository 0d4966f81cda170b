#include <cmath>
#include <vector>

#include "doctest.h"
#include "reloc/bounds.hpp"
#include "reloc/error.hpp"
#include "reloc/lifted.hpp"
#include "reloc/perron.hpp"

using namespace reloc;

namespace {

const RelocationLaw kHalf = RelocationLaw::explicit_law({0.5, 0.5});

}  // namespace

TEST_CASE("J at the trivial tilt is r") {
  const Matrix s = benchmark_sigma();
  const auto e = j_objective(s, TiltVector::ones(2));
  CHECK(e.J == doctest::Approx(perron_triple(s).r).epsilon(1e-14));
  CHECK(e.log_J == doctest::Approx(std::log(e.J)).epsilon(1e-14));
}

TEST_CASE("J is invariant under scaling a") {
  const Matrix s{{0.3, 0.2, 0.1}, {0.25, 0.25, 0.3}, {0.1, 0.4, 0.35}};
  const TiltVector a({0.4, 1.3, 2.2});
  const double base = j_objective(s, a).J;
  for (double c : {0.1, 7.0}) CHECK(j_objective(s, a.scaled(c)).J == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("optimized J dominates the starting tilts and a grid scan") {
  const Matrix s = benchmark_sigma();
  const auto res = optimize_j(s);
  CHECK(res.best.J >= res.at_one.J);
  CHECK(res.best.J >= res.at_h.J);
  double grid_best = 0.0;
  for (int k = -400; k <= 400; ++k) {
    const double a0 = std::exp(0.005 * k);
    grid_best = std::max(grid_best, j_objective(s, TiltVector({a0, 1.0})).J);
  }
  CHECK(res.best.J >= grid_best - 1e-12);
  CHECK(res.best.J - grid_best < 1e-6);

  OptimizeJOptions g0;
  g0.gauge = 0;
  CHECK(optimize_j(s, g0).best.J == doctest::Approx(res.best.J).epsilon(1e-10));
}

TEST_CASE("rate function closed forms") {
  const Matrix s = benchmark_sigma();
  const std::vector<double> d0{1.0, 0.0};
  // A point mass costs -log of the self-loop weight.
  CHECK(rate_function_I(s, d0).value == doctest::Approx(-std::log(0.72)).epsilon(1e-12));
  const auto p = perron_triple(s);
  // The minimizer is the gradient of log r_{exp lambda} at 0, namely rho h.
  const std::vector<double> star{p.rho[0] * p.h[0], p.rho[1] * p.h[1]};
  CHECK(rate_function_I(s, star).value == doctest::Approx(-std::log(p.r)).epsilon(1e-9));
}

TEST_CASE("rate function table") {
  const Matrix s = benchmark_sigma();
  const auto t = rate_function_lifted(s, kHalf, 21);
  REQUIRE(t.size() == 21);
  CHECK(t.violations.empty());
  CHECK(t.I_convex);
  CHECK(t.I_bold_convex);
  double min_I = 1e300, min_B = 1e300;
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t.I_bold[i] <= t.I[i] + 1e-8);
    min_I = std::min(min_I, t.I[i]);
    min_B = std::min(min_B, t.I_bold[i]);
  }
  CHECK(t.log_r == doctest::Approx(std::log(perron_triple(s).r)).epsilon(1e-12));
  CHECK(t.log_r_bold == doctest::Approx(std::log(0.7893433926663940)).epsilon(1e-10));
  CHECK(std::abs(-min_I - t.log_r) < 5e-3);
  CHECK(std::abs(-min_B - t.log_r_bold) < 5e-3);

  const auto dirac = rate_function_lifted(s, RelocationLaw::dirac(0), 11);
  for (std::size_t i = 0; i < dirac.size(); ++i) CHECK(dirac.I_bold[i] == doctest::Approx(dirac.I[i]).epsilon(1e-9));
}

TEST_CASE("simplex grid") {
  CHECK(simplex_grid(3, 3).size() == 6);
  const auto g = simplex_grid(2, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front()[0] == 0.0);
  CHECK(g.back()[0] == 1.0);
}

TEST_CASE("bound integrand") {
  const Matrix s = benchmark_sigma();
  const TiltVector h(perron_triple(s).h);
  WeightedChainOptions o;
  o.steps = 200000;
  const auto a = c2_bound_estimate(s, kHalf, h, o, RngSpec{6, 0});
  const auto b = c2_bound_estimate(s, kHalf, h.scaled(2.0), o, RngSpec{6, 0});
  CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-12));
  CHECK(a.estimate <= std::log(0.7893433926663940) + 4.0 * a.se);
  CHECK(a.estimate > std::log(perron_triple(s).r));
}
