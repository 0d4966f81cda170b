#include <cmath>
#include <vector>

#include "doctest.h"
#include "reloc/error.hpp"
#include "reloc/lifted.hpp"
#include "reloc/occupation.hpp"

using namespace reloc;

TEST_CASE("occupation map geometry") {
  const OccupationGrid grid(benchmark_sigma(), 0.1, 64);
  CHECK(grid.nodes() == 65);
  CHECK(grid.image(0, 1.0) == doctest::Approx(1.0));
  CHECK(grid.image(1, 0.0) == 0.0);
  CHECK(grid.image(0, 0.5) == doctest::Approx(0.55));
  CHECK(grid.weight(0, 1.0) == 0.72);
  CHECK(grid.weight(1, 0.0) == 0.58);
}

TEST_CASE("serial and parallel sweeps agree bitwise") {
  const OccupationGrid grid(benchmark_sigma(), 0.01, 1 << 15);
  std::vector<double> g(grid.nodes());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = 1.0 + 0.3 * std::cos(0.001 * static_cast<double>(k));
  std::vector<double> a(g.size()), b(g.size());
  grid.sweep(g, a);
  grid.sweep_parallel(g, b);
  CHECK(a == b);
}

TEST_CASE("constant function ratio is the kernel row sum") {
  const OccupationGrid grid(benchmark_sigma(), 0.2, 8);
  const std::vector<double> ones(grid.nodes(), 1.0);
  // K 1 (x) = 0.8 x + 0.76 (1 - x), which is monotone in x.
  const auto [lo, hi] = grid.cell_ratio_range(ones, 0);
  CHECK(lo == doctest::Approx(0.76));
  CHECK(hi == doctest::Approx(0.76 + 0.04 / 8.0));
}

TEST_CASE("occupation bracket agrees with the window bracket") {
  const Matrix s = benchmark_sigma();
  for (double eps : {0.5, 0.2}) {
    OccupationOptions o;
    o.cells = 4096;
    const auto ob = occupation_bracket(s, eps, o);
    BracketOptions w;
    w.use_occupation = false;
    w.d_max = 16;
    w.delta_tail = 1e-13;
    const auto wb = bracket_radius(s, RelocationLaw::geometric(eps), w);
    CHECK(ob.lo <= ob.hi);
    CHECK(ob.lo <= ob.estimate);
    CHECK(ob.estimate <= ob.hi);
    CHECK(ob.lo <= wb.hi + 1e-12);
    CHECK(ob.hi >= wb.lo - 1e-12);
    CHECK(ob.hi - ob.lo < 1e-6);
  }
}

TEST_CASE("occupation bracket needs two states") {
  const Matrix s{{0.3, 0.2, 0.1}, {0.25, 0.25, 0.3}, {0.1, 0.4, 0.35}};
  CHECK_THROWS_AS(occupation_bracket(s, 0.1), Error);
}
