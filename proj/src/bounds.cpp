#include "reloc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>

#include "reloc/format.hpp"
#include "reloc/lifted.hpp"
#include "reloc/nelder_mead.hpp"
#include "reloc/perron.hpp"

namespace reloc {

ObjectiveEval j_objective(const Matrix& sigma, const TiltVector& a) {
  const PerronTriple p = perron_triple(tilt(sigma, a));
  ObjectiveEval out;
  out.a = a.values();
  out.r_a = p.r;
  out.rho_a = p.rho;
  double pairing = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) pairing += p.rho[s] * std::log(a[s]);
  out.log_J = std::log(p.r) - pairing;
  out.J = std::exp(out.log_J);
  return out;
}

namespace {

std::vector<double> expand_gauge(const std::vector<double>& free, std::size_t m, std::size_t gauge) {
  std::vector<double> full(m, 0.0);
  for (std::size_t s = 0, k = 0; s < m; ++s) {
    if (s != gauge) full[s] = free[k++];
  }
  return full;
}

std::vector<double> reduce_gauge(const std::vector<double>& full, std::size_t gauge) {
  std::vector<double> free;
  for (std::size_t s = 0; s < full.size(); ++s) {
    if (s != gauge) free.push_back(full[s] - full[gauge]);
  }
  return free;
}

double sup_norm(std::span<const double> x) {
  double best = 0.0;
  for (double v : x) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace

OptimizeJResult optimize_j(const Matrix& sigma, const OptimizeJOptions& opts) {
  const std::size_t m = sigma.rows();
  const std::size_t gauge = opts.gauge < m ? opts.gauge : m - 1;
  const PerronTriple base = perron_triple(sigma);

  OptimizeJResult out;
  out.at_one = j_objective(sigma, TiltVector::ones(m));
  out.at_h = j_objective(sigma, TiltVector(base.h));

  auto objective = [&](const std::vector<double>& x) {
    const auto log_a = expand_gauge(x, m, gauge);
    if (sup_norm(log_a) > 600.0) return std::numeric_limits<double>::infinity();
    try {
      return -j_objective(sigma, TiltVector::exp_of(log_a)).log_J;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(m - 1, 0.0));
  std::vector<double> log_h(m);
  for (std::size_t s = 0; s < m; ++s) log_h[s] = std::log(base.h[s]);
  starts.push_back(reduce_gauge(log_h, gauge));
  Rng rng(RngSpec{opts.seed, 0});
  for (std::size_t k = 2; k < opts.restarts; ++k) {
    std::vector<double> x(m - 1);
    for (double& v : x) v = rng.normal();
    starts.push_back(std::move(x));
  }

  NelderMeadOptions nm;
  nm.f_tol = opts.tolerance;
  nm.x_tol = 1e-9;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  for (const auto& x0 : starts) {
    const NelderMeadResult r = nelder_mead(objective, x0, nm);
    out.evaluations += r.evaluations;
    if (r.value < best_value) {
      best_value = r.value;
      best_x = r.x;
    }
  }
  const auto log_a = expand_gauge(best_x, m, gauge);
  out.best = j_objective(sigma, TiltVector::exp_of(log_a));
  if (sup_norm(log_a) > 20.0) {
    out.warnings.push_back("optimizer drifted toward the boundary: |log a*| = " + format_real(sup_norm(log_a)));
  }
  return out;
}

C2Estimate c2_bound_estimate(const Matrix& sigma, const RelocationLaw& tau, const TiltVector& a,
                             const WeightedChainOptions& opts, RngSpec rng) {
  const HypothesisReport hyp = hypothesis_report(sigma, tau);
  if (!hyp.unique_ergodicity()) {
    throw Error(ErrorCode::Unsupported, "no unique-ergodicity route applies: " + hyp.summary());
  }
  const WeightedChainStats st = run_weighted_chain(sigma, tau, a, opts, rng);
  C2Estimate out;
  out.estimate = st.c2_mean;
  out.se = st.c2_se;
  out.steps = opts.steps;
  out.burnin = st.burnin;
  return out;
}

namespace {

using LogRadius = std::function<double(const std::vector<double>& lambda)>;

/// Index of the single unit coordinate when nu is a point mass.
std::optional<std::size_t> point_mass_index(std::span<const double> nu) {
  for (std::size_t s = 0; s < nu.size(); ++s) {
    if (nu[s] == 1.0) return s;
  }
  return std::nullopt;
}

double legendre_objective(const LogRadius& log_radius, std::span<const double> nu, const std::vector<double>& lambda) {
  double pairing = 0.0;
  for (std::size_t s = 0; s < nu.size(); ++s) pairing += nu[s] * lambda[s];
  return pairing - log_radius(lambda);
}

LegendreValue legendre_sup(const LogRadius& log_radius, std::span<const double> nu,
                           const std::vector<std::vector<double>>& extra_starts = {}) {
  const std::size_t m = nu.size();
  auto objective = [&](const std::vector<double>& x) {
    const auto lambda = expand_gauge(x, m, m - 1);
    if (sup_norm(lambda) > 200.0) return std::numeric_limits<double>::infinity();
    try {
      return -legendre_objective(log_radius, nu, lambda);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<std::vector<double>> starts{std::vector<double>(m - 1, 0.0)};
  for (const auto& s : extra_starts) starts.push_back(reduce_gauge(s, m - 1));

  NelderMeadOptions nm;
  nm.f_tol = 1e-14;
  nm.x_tol = 1e-10;
  LegendreValue out;
  out.value = -std::numeric_limits<double>::infinity();
  for (const auto& x0 : starts) {
    const NelderMeadResult r = nelder_mead(objective, x0, nm);
    if (-r.value > out.value) {
      out.value = -r.value;
      out.lambda = expand_gauge(r.x, m, m - 1);
    }
  }
  if (sup_norm(out.lambda) > 20.0) {
    out.unbounded_maximizer = true;
    std::vector<double> further = out.lambda;
    for (double& x : further) x *= 2.0;
    const double v = -objective(reduce_gauge(further, m - 1));
    if (v > out.value + 1.0) out.value = kInfiniteRate;
  }
  return out;
}

LogRadius benchmark_log_radius(const Matrix& sigma) {
  return [sigma](const std::vector<double>& lambda) {
    return std::log(spectral_radius(tilt(sigma, TiltVector::exp_of(lambda))));
  };
}

LogRadius lifted_log_radius(const Matrix& sigma, std::vector<double> masses) {
  return [sigma, masses = std::move(masses)](const std::vector<double>& lambda) {
    const LiftedChain L = build_lifted(tilt(sigma, TiltVector::exp_of(lambda)), masses, LiftMode::Exact);
    return std::log(lifted_spectral_radius(L).radius);
  };
}

double point_mass_rate(double diagonal) { return diagonal > 0.0 ? -std::log(diagonal) : kInfiniteRate; }

void check_nu(std::span<const double> nu, std::size_t m) {
  if (nu.size() != m) throw Error(ErrorCode::InvalidArgument, "nu has the wrong dimension");
  (void)ProbabilityVector(std::vector<double>(nu.begin(), nu.end()));
}

}  // namespace

LegendreValue rate_function_I(const Matrix& sigma, std::span<const double> nu) {
  check_nu(nu, sigma.rows());
  if (const auto s = point_mass_index(nu)) {
    LegendreValue out;
    out.value = point_mass_rate(sigma(*s, *s));
    out.unbounded_maximizer = true;
    return out;
  }
  return legendre_sup(benchmark_log_radius(sigma), nu);
}

LegendreValue rate_function_lifted_at(const Matrix& sigma, const RelocationLaw& tau, std::span<const double> nu) {
  check_nu(nu, sigma.rows());
  const auto masses = tau.bounded_masses();
  if (const auto s = point_mass_index(nu)) {
    double total = 0.0;
    for (double x : masses) total += x;
    LegendreValue out;
    out.value = point_mass_rate(total * sigma(*s, *s));
    out.unbounded_maximizer = true;
    return out;
  }
  return legendre_sup(lifted_log_radius(sigma, masses), nu);
}

std::vector<std::vector<double>> simplex_grid(std::size_t m, std::size_t resolution) {
  if (m == 0 || resolution < 2) throw Error(ErrorCode::InvalidArgument, "grid needs m >= 1 and resolution >= 2");
  const std::size_t total = resolution - 1;
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> k(m, 0);
  // Compositions of total into m parts, first coordinate ascending.
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
    if (pos + 1 == m) {
      k[pos] = left;
      std::vector<double> nu(m);
      for (std::size_t s = 0; s < m; ++s) nu[s] = static_cast<double>(k[s]) / static_cast<double>(total);
      out.push_back(std::move(nu));
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      k[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, total);
  return out;
}

RateFunctionTable rate_function_lifted(const Matrix& sigma, const RelocationLaw& tau, std::size_t resolution) {
  const std::size_t m = sigma.rows();
  const auto masses = tau.bounded_masses();
  // Fail early on chains that do not fit.
  const LiftedChain base = build_lifted(sigma, masses, LiftMode::Exact);

  RateFunctionTable out;
  out.m = m;
  out.log_r = std::log(spectral_radius(sigma));
  out.log_r_bold = std::log(lifted_spectral_radius(base).radius);

  const auto grid = simplex_grid(m, resolution);
  const LogRadius plain = benchmark_log_radius(sigma);
  const LogRadius lifted = lifted_log_radius(sigma, masses);
  out.nu.reserve(grid.size() * m);
  out.I.resize(grid.size());
  out.I_bold.resize(grid.size());
  for (const auto& nu : grid) out.nu.insert(out.nu.end(), nu.begin(), nu.end());

  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto& nu = grid[i];
    if (point_mass_index(nu)) {
      out.I[i] = rate_function_I(sigma, nu).value;
      out.I_bold[i] = rate_function_lifted_at(sigma, tau, nu).value;
      continue;
    }
    const LegendreValue a = legendre_sup(plain, nu);
    const LegendreValue b = legendre_sup(lifted, nu, {a.lambda});
    double I = a.value;
    double I_bold = b.value;
    if (std::isfinite(I) && !b.lambda.empty()) I = std::max(I, legendre_objective(plain, nu, b.lambda));
    if (std::isfinite(I_bold) && !a.lambda.empty()) {
      I_bold = std::max(I_bold, legendre_objective(lifted, nu, a.lambda));
    }
    out.I[i] = I;
    out.I_bold[i] = I_bold;
  }

  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (out.I_bold[i] > out.I[i] + 1e-8) out.violations.push_back(i);
  }

  // Midpoint convexity along every lattice direction e_i - e_j.
  const double total = static_cast<double>(resolution - 1);
  std::map<std::vector<long>, std::size_t> index;
  std::vector<std::vector<long>> keys(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (double x : grid[i]) keys[i].push_back(std::lround(x * total));
    index.emplace(keys[i], i);
  }
  auto convex_at = [&](const std::vector<double>& f, std::size_t i, std::size_t a, std::size_t b) {
    auto up = keys[i];
    auto down = keys[i];
    ++up[a];
    --up[b];
    --down[a];
    ++down[b];
    const auto u = index.find(up);
    const auto d = index.find(down);
    if (u == index.end() || d == index.end()) return true;
    const double lo = f[u->second];
    const double hi = f[d->second];
    if (!std::isfinite(lo) || !std::isfinite(hi)) return true;
    return f[i] <= 0.5 * (lo + hi) + 1e-8;
  };
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b) {
        out.I_convex = out.I_convex && convex_at(out.I, i, a, b);
        out.I_bold_convex = out.I_bold_convex && convex_at(out.I_bold, i, a, b);
      }
  return out;
}

}  // namespace reloc
