#include <cmath>

#include "doctest.h"
#include "reloc/perron.hpp"
#include "reloc/projective.hpp"
#include "reloc/rng.hpp"

using namespace reloc;

namespace {

const double kR = (1.30 + std::sqrt(0.0772)) / 2.0;

}  // namespace

TEST_CASE("Perron triple of the benchmark matches the quadratic root") {
  const PerronTriple p = perron_triple(benchmark_sigma());
  CHECK(std::abs(p.r - kR) < 1e-10);
  CHECK(std::abs(p.r - 0.7889244398944980) < 1e-12);

  const double rho1 = 1.0 / (1.0 + (kR - 0.72) / 0.18);
  CHECK(std::abs(p.rho[0] - rho1) < 1e-9);
  CHECK(std::abs(p.rho[1] - (1.0 - rho1)) < 1e-9);

  const double ratio = (kR - 0.72) / 0.08;
  const double h1 = 1.0 / (rho1 + (1.0 - rho1) * ratio);
  CHECK(std::abs(p.h[0] - h1) < 1e-9);
  CHECK(std::abs(p.h[1] - h1 * ratio) < 1e-9);
  CHECK(std::abs(p.rho[0] * p.h[0] + p.rho[1] * p.h[1] - 1.0) < 1e-12);
}

TEST_CASE("eigen-equations hold for a 3x3 matrix") {
  const Matrix m{{0.2, 0.3, 0.1}, {0.05, 0.5, 0.25}, {0.4, 0.0, 0.3}};
  const PerronTriple p = perron_triple(m);
  const auto mh = m * std::span<const double>(p.h);
  std::vector<double> rm(3);
  m.left_multiply(p.rho, rm);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(mh[i] - p.r * p.h[i]) < 1e-12);
    CHECK(std::abs(rm[i] - p.r * p.rho[i]) < 1e-12);
    CHECK(p.h[i] > 0.0);
    CHECK(p.rho[i] > 0.0);
  }
}

TEST_CASE("radius scales linearly") {
  const Matrix m = benchmark_sigma();
  for (double c : {0.1, 3.0}) CHECK(std::abs(spectral_radius(m.scaled(c)) - c * kR) < 1e-12 * c);
}

TEST_CASE("Perron errors") {
  CHECK_THROWS_AS(perron_triple(Matrix(2, 3)), Error);
  CHECK_THROWS_AS(perron_triple(Matrix{{0.5, -0.1}, {0.1, 0.5}}), Error);
}

TEST_CASE("probability and tilt vectors validate their input") {
  CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), Error);
  CHECK_THROWS_AS(ProbabilityVector({-0.1, 1.1}), Error);
  CHECK_THROWS_AS(ProbabilityVector::normalized({0.0, 0.0}), Error);
  CHECK_THROWS_AS(TiltVector({1.0, 0.0}), Error);
  CHECK(ProbabilityVector::uniform(4)[3] == 0.25);
}

TEST_CASE("projective map of the benchmark") {
  const Matrix s = benchmark_sigma();
  const auto out = phi_map(ProbabilityVector::point_mass(2, 0), tilt(s, TiltVector::ones(2)));
  CHECK(out[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.1).epsilon(1e-15));

  const Matrix pi = biased_transition(s, TiltVector::ones(2));
  CHECK(pi(0, 0) == doctest::Approx(0.9));
  CHECK(pi(1, 0) == doctest::Approx(0.18 / 0.76));
  // Rows of pi are stochastic for any tilt.
  const Matrix pa = biased_transition(s, TiltVector({3.0, 0.2}));
  for (std::size_t i = 0; i < 2; ++i) CHECK(pa(i, 0) + pa(i, 1) == doctest::Approx(1.0));
}

TEST_CASE("Birkhoff coefficient of the benchmark") {
  CHECK(std::abs(birkhoff_contraction(benchmark_sigma()) - 0.6867739423475354) < 1e-12);
  CHECK(std::abs(projective_diameter(benchmark_sigma()) - std::log(29.0)) < 1e-12);
  CHECK(birkhoff_contraction(Matrix{{0.5, 0.0}, {0.2, 0.3}}) == 1.0);
  CHECK_THROWS_AS(birkhoff_contraction(Matrix{{0.0, 0.0}, {0.2, 0.3}}), Error);
  // Tilting by a diagonal does not change the cross ratios.
  CHECK(birkhoff_contraction(tilt(benchmark_sigma(), TiltVector({5.0, 0.1}))) ==
        doctest::Approx(0.6867739423475354).epsilon(1e-12));
}

TEST_CASE("Hilbert distance") {
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> y{2.0, 1.0};
  CHECK(hilbert_distance(x, y) == doctest::Approx(2.0 * std::log(2.0)));
  const std::vector<double> z{3.0, 6.0};
  CHECK(hilbert_distance(x, z) == doctest::Approx(0.0));
  const std::vector<double> bad{0.0, 1.0};
  CHECK_THROWS_AS(hilbert_distance(x, bad), Error);
}

TEST_CASE("the projective map contracts by the Birkhoff coefficient") {
  const Matrix s = benchmark_sigma();
  Rng rng(RngSpec{11, 0});
  for (int k = 0; k < 200; ++k) {
    const TiltVector a({std::exp(2.0 * rng.normal()), std::exp(2.0 * rng.normal())});
    const Matrix sa = tilt(s, a);
    const double kappa = birkhoff_contraction(sa);
    const double u = 0.001 + 0.998 * rng.uniform();
    const double v = 0.001 + 0.998 * rng.uniform();
    const ProbabilityVector x({u, 1.0 - u});
    const ProbabilityVector y({v, 1.0 - v});
    const double before = hilbert_distance(x.span(), y.span());
    const double after = hilbert_distance(phi_map(x, sa).span(), phi_map(y, sa).span());
    CHECK(after <= kappa * before + 1e-12);
  }
}
