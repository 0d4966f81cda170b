#include <cmath>
#include <vector>

#include "doctest.h"
#include "reloc/error.hpp"
#include "reloc/lifted.hpp"
#include "reloc/perron.hpp"

using namespace reloc;

namespace {

const RelocationLaw kHalf = RelocationLaw::explicit_law({0.5, 0.5});
constexpr double kR = 0.7889244398944980;

}  // namespace

TEST_CASE("Dirac(0) lift is sigma") {
  const Matrix s = benchmark_sigma();
  const auto chain = build_lifted(s, RelocationLaw::dirac(0));
  CHECK(chain.size() == 2);
  const Matrix k = chain.to_dense();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(k(i, j) == s(i, j));
}

TEST_CASE("dense lift for tau = (1/2, 1/2)") {
  const auto chain = build_lifted(benchmark_sigma(), kHalf);
  REQUIRE(chain.size() == 4);
  const double expected[4][4] = {
      {0.72, 0, 0.08, 0}, {0.45, 0, 0.33, 0}, {0, 0.45, 0, 0.33}, {0, 0.18, 0, 0.58}};
  const Matrix k = chain.to_dense();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(k(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-15));

  const HistoryWindow w({1, 0});
  CHECK(chain.window_at(chain.index_of(w)).states() == w.states());
  CHECK(chain.successor(chain.index_of(w), 0) == chain.index_of(HistoryWindow({0, 1})));
}

TEST_CASE("upper mode with zero tail is exact") {
  const Matrix s = benchmark_sigma();
  const std::vector<double> masses{0.5, 0.5};
  const auto a = build_lifted(s, masses, LiftMode::Exact);
  const auto b = build_lifted(s, masses, LiftMode::Upper, 0.0);
  for (std::size_t i = 0; i < a.weights().size(); ++i) CHECK(a.weights()[i] == b.weights()[i]);
}

TEST_CASE("lifted radius for tau = (1/2, 1/2)") {
  const auto chain = build_lifted(benchmark_sigma(), kHalf);
  const auto res = lifted_spectral_radius(chain);
  CHECK(res.radius == doctest::Approx(0.7893433926663940).epsilon(1e-12));
  CHECK(res.radius - kR == doctest::Approx(4.1895277189596403e-04).epsilon(1e-8));
  CHECK(res.residual < 1e-12);
  CHECK(res.lower <= res.radius);
  CHECK(res.upper >= res.radius);
}

TEST_CASE("Dirac lifts reproduce r") {
  for (std::size_t d = 0; d <= 3; ++d) {
    const auto chain = build_lifted(benchmark_sigma(), RelocationLaw::dirac(d));
    CHECK(lifted_spectral_radius(chain).radius == doctest::Approx(kR).epsilon(1e-10));
  }
}

TEST_CASE("exact survival") {
  const auto chain = build_lifted(benchmark_sigma(), kHalf);
  const auto init = HistoryWindow::constant(0, 2);
  CHECK(survival_exact(chain, init, 0) == 1.0);
  CHECK(survival_exact(chain, init, 1) == doctest::Approx(0.80).epsilon(1e-15));
  // 0.72 * 0.80 + 0.08 * 0.78 from the dense rows above.
  CHECK(survival_exact(chain, init, 2) == doctest::Approx(0.6384).epsilon(1e-14));
  const auto dirac = build_lifted(benchmark_sigma(), RelocationLaw::dirac(0));
  CHECK(survival_exact(dirac, HistoryWindow({0}), 1) == doctest::Approx(0.80).epsilon(1e-15));
  CHECK(survival_exact(dirac, HistoryWindow({0}), 2) == doctest::Approx(0.6368).epsilon(1e-14));
  CHECK(survival_exact(chain, init, 10) == doctest::Approx(0.0988958374542095).epsilon(1e-13));
  CHECK(std::exp(log_survival_exact(chain, init, 10)) == doctest::Approx(0.0988958374542095).epsilon(1e-13));
  const double rate = std::exp(log_survival_exact(chain, init, 2000) / 2000.0);
  CHECK(std::abs(rate - 0.7893433926663940) < 1e-3);
}

TEST_CASE("structure of the lift") {
  const auto f = lifted_structure_check(build_lifted(benchmark_sigma(), kHalf));
  CHECK(f.irreducible);
  CHECK(f.aperiodic);
  CHECK_FALSE(f.strictly_positive);

  // Deterministic 2-cycle with relocation only to even lags keeps parity.
  const Matrix cycle{{0.0, 0.9}, {0.9, 0.0}};
  const auto even = RelocationLaw::explicit_law({0.5, 0.0, 0.5});
  CHECK_FALSE(lifted_structure_check(build_lifted(cycle, even)).irreducible);
}

TEST_CASE("serial and parallel apply agree bitwise") {
  const Matrix s{{0.3, 0.2, 0.1}, {0.25, 0.25, 0.3}, {0.1, 0.4, 0.35}};
  const auto t = truncate_law(RelocationLaw::geometric(0.3), 1e-12, 8);
  const auto chain = build_lifted(s, t, LiftMode::Lower);
  REQUIRE(chain.size() > 4096);
  std::vector<double> x(chain.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 + std::sin(static_cast<double>(i));
  std::vector<double> a(x.size()), b(x.size());
  chain.apply(x, a);
  chain.apply_parallel(x, b);
  CHECK(a == b);
}

TEST_CASE("window brackets") {
  const Matrix s = benchmark_sigma();
  const auto g = RelocationLaw::geometric(0.25);
  double prev_lo = 0.0;
  for (std::size_t d : {4, 6, 8, 10}) {
    BracketOptions o;
    o.d_max = d;
    o.delta_tail = 1e-300;
    o.use_occupation = false;
    const auto b = bracket_radius(s, g, o);
    CHECK(b.lo <= b.hi);
    CHECK(b.lo >= prev_lo - 1e-12);
    prev_lo = b.lo;
  }

  BracketOptions wide;
  wide.d_max = 16;
  wide.delta_tail = 1e-3;
  wide.use_occupation = false;
  const auto b = bracket_radius(s, g, wide);
  CHECK(b.method == "window");
  CHECK(b.cap_reached);
  // Lower drops at most tail * max row of sigma, upper adds tail * (0.72 + 0.58).
  CHECK(b.hi - b.lo <= 1.30 * b.tail_mass + 1e-9);

  const auto exact = bracket_radius(s, kHalf);
  CHECK(exact.exact);
  CHECK(exact.lo == doctest::Approx(0.7893433926663940).epsilon(1e-10));

  CHECK_THROWS_AS(build_lifted(s, RelocationLaw::dirac(5), 8), Error);
  CHECK(max_affordable_depth(2, 8) == 2);
}

TEST_CASE("tilted lift dominates tilted r") {
  const Matrix s = benchmark_sigma();
  const TiltVector a({1.7, 0.6});
  const Matrix sa = tilt(s, a);
  const double ra = perron_triple(sa).r;
  const double la = lifted_spectral_radius(build_lifted(sa, kHalf)).radius;
  CHECK(la >= ra - 1e-12);
}
