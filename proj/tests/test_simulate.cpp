#include <cmath>
#include <vector>

#include <omp.h>

#include "doctest.h"
#include "reloc/lifted.hpp"
#include "reloc/perron.hpp"
#include "reloc/simulate.hpp"

using namespace reloc;

namespace {

const RelocationLaw kHalf = RelocationLaw::explicit_law({0.5, 0.5});
const HistoryWindow kInit = HistoryWindow::constant(0, 2);
constexpr double kP10 = 0.0988958374542095;

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(RngSpec{3, 1}, 7), b(RngSpec{3, 1}, 7), c(RngSpec{3, 1}, 8);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) sum += static_cast<double>(a.geometric(0.25));
  CHECK(sum / 20000.0 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("history lags past the start return the oldest entry") {
  History h(HistoryWindow({1, 0}));
  CHECK(h.current() == 1);
  CHECK(h.at_lag(1) == 0);
  CHECK(h.at_lag(5) == 0);
  h.push(0);
  CHECK(h.at_lag(1) == 1);
}

TEST_CASE("geometric occupation tracker matches the direct measure") {
  const auto g = RelocationLaw::geometric(0.3);
  const HistoryWindow init({1});
  History h(init);
  OccupationTracker tr(g, 2, init);
  std::vector<State> path{1};
  Rng rng(RngSpec{11, 0});
  for (int step = 0; step < 40; ++step) {
    const State s = rng.uniform() < 0.4 ? 0 : 1;
    h.push(s);
    path.push_back(s);
    tr.update(h);
  }
  std::vector<State> recent(path.rbegin(), path.rend());
  const auto theta = occupation_measure(HistoryWindow(recent), g, 2);
  CHECK(tr.theta()[0] == doctest::Approx(theta[0]).epsilon(1e-12));
}

TEST_CASE("killed chain is deterministic across thread counts") {
  const Matrix s = benchmark_sigma();
  omp_set_num_threads(1);
  const auto a = run_killed_chain(s, kHalf, kInit, 30, 5000, RngSpec{42, 0});
  omp_set_num_threads(4);
  const auto b = run_killed_chain(s, kHalf, kInit, 30, 5000, RngSpec{42, 0});
  CHECK(a.lifetimes == b.lifetimes);
  CHECK(a.curve.p_hat == b.curve.p_hat);
  for (std::size_t i = 1; i < a.curve.p_hat.size(); ++i) CHECK(a.curve.p_hat[i] <= a.curve.p_hat[i - 1]);
}

TEST_CASE("killed chain matches exact survival") {
  const auto res = run_killed_chain(benchmark_sigma(), kHalf, kInit, 10, 200000, RngSpec{1, 0});
  const std::size_t i = res.curve.n.size() - 1;
  REQUIRE(res.curve.n[i] == 10);
  CHECK(std::abs(res.curve.p_hat[i] - kP10) < 4.0 * res.curve.se[i]);
}

TEST_CASE("killed chain decay slope") {
  const Matrix s = benchmark_sigma();
  const auto chain = build_lifted(s, kHalf);
  const auto res = run_killed_chain(s, kHalf, kInit, 25, 1000000, RngSpec{9, 0});
  // Least-squares slope of log p over n in [5, 25], simulated and exact.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, ey = 0, exy = 0;
  int count = 0;
  for (std::size_t k = 0; k < res.curve.n.size(); ++k) {
    const std::size_t n = res.curve.n[k];
    if (n < 5 || n > 25) continue;
    const double x = static_cast<double>(n);
    const double y = std::log(res.curve.p_hat[k]);
    const double e = log_survival_exact(chain, kInit, n);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ey += e;
    exy += x * e;
    ++count;
  }
  REQUIRE(count == 21);
  const double den = count * sxx - sx * sx;
  const double slope = (count * sxy - sx * sy) / den;
  const double exact = (count * exy - sx * ey) / den;
  CHECK(std::abs(slope - exact) < 5e-3);
  CHECK(std::abs(exact - std::log(0.7893433926663940)) < 5e-3);
}

TEST_CASE("FK estimator") {
  const Matrix s = benchmark_sigma();
  const auto one = fk_survival_estimate(s, kHalf, TiltVector::ones(2), kInit, 1, 1000, RngSpec{2, 0});
  CHECK(one.estimate == doctest::Approx(0.80).epsilon(1e-14));
  CHECK(one.se == doctest::Approx(0.0).epsilon(1e-14));

  const TiltVector h(perron_triple(s).h);
  const auto est = fk_survival_estimate(s, kHalf, h, kInit, 10, 200000, RngSpec{3, 0});
  CHECK(std::abs(est.estimate - kP10) < 4.0 * est.se);
  CHECK(est.se < 1e-3);
}

TEST_CASE("weighted chain samples live on the simplex") {
  WeightedChainOptions o;
  o.steps = 20000;
  o.thin = 10;
  const auto st = run_weighted_chain(benchmark_sigma(), RelocationLaw::geometric(0.05), TiltVector::ones(2), o,
                                     RngSpec{4, 0});
  CHECK(st.burnin == 200);
  CHECK(st.samples() == (20000 - 200) / 10);
  for (std::size_t i = 0; i < st.samples(); ++i) {
    CHECK(st.theta_at(i, 0) >= 0.0);
    CHECK(st.theta_at(i, 0) + st.theta_at(i, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Dirac(0) integrand with a = h is log r at every step") {
  const Matrix s = benchmark_sigma();
  const auto p = perron_triple(s);
  WeightedChainOptions o;
  o.steps = 5000;
  const auto st = run_weighted_chain(s, RelocationLaw::dirac(0), TiltVector(p.h), o, RngSpec{5, 0});
  CHECK(std::abs(st.c2_mean - std::log(p.r)) < 1e-12);
  CHECK(st.c2_se < 1e-12);
}
