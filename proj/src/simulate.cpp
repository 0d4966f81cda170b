#include "reloc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reloc/power.hpp"

namespace reloc {

std::size_t sample_lag(const RelocationLaw& tau, Rng& rng) {
  switch (tau.kind()) {
    case RelocationLaw::Kind::Dirac: return *tau.support_max();
    case RelocationLaw::Kind::Geometric: return static_cast<std::size_t>(rng.geometric(tau.epsilon()));
    case RelocationLaw::Kind::Explicit: {
      const std::size_t top = *tau.support_max();
      double u = rng.uniform();
      for (std::size_t i = 0; i < top; ++i) {
        u -= tau.mass(i);
        if (u < 0.0) return i;
      }
      return top;
    }
  }
  return 0;
}

History::History(const HistoryWindow& init, std::size_t reserve) {
  states_.reserve(init.size() + reserve);
  for (std::size_t i = init.size(); i-- > 0;) states_.push_back(init[i]);
}

OccupationTracker::OccupationTracker(const RelocationLaw& tau, std::size_t m, const HistoryWindow& init)
    : geometric_(tau.kind() == RelocationLaw::Kind::Geometric), eps_(tau.epsilon()) {
  if (!geometric_) masses_ = tau.bounded_masses();
  theta_ = occupation_measure(init, tau, m).weights();
}

void OccupationTracker::update(const History& h) {
  if (geometric_) {
    for (double& x : theta_) x *= 1.0 - eps_;
    theta_[h.current()] += eps_;
    return;
  }
  std::fill(theta_.begin(), theta_.end(), 0.0);
  for (std::size_t i = 0; i < masses_.size(); ++i) theta_[h.at_lag(i)] += masses_[i];
}

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

State draw_from_row(std::span<const double> row, double u) {
  std::size_t last = 0;
  for (std::size_t t = 0; t < row.size(); ++t) {
    if (row[t] > 0.0) last = t;
    u -= row[t];
    if (u < 0.0) return static_cast<State>(t);
  }
  return static_cast<State>(last);
}

/// Relocation source chosen with probability proportional to
/// tau(T) (sigma a)(s_T), by rejection.
State weighted_source(const RelocationLaw& tau, const History& h, std::span<const double> sa, double max_sa,
                      Rng& rng, std::size_t& tries) {
  while (true) {
    ++tries;
    const State s = h.at_lag(sample_lag(tau, rng));
    if (rng.uniform() * max_sa < sa[s]) return s;
  }
}

}  // namespace

KilledChainResult run_killed_chain(const Matrix& sigma, const RelocationLaw& tau, const HistoryWindow& init,
                                   std::size_t n_max, std::size_t replicas, RngSpec spec,
                                   const std::vector<std::size_t>& checkpoints) {
  if (replicas < 1) throw Error(ErrorCode::InvalidArgument, "replicas must be >= 1");
  const std::size_t m = sigma.rows();
  for (State s : init.states()) {
    if (s >= m) throw Error(ErrorCode::InvalidArgument, "initial window state out of range");
  }
  std::vector<std::size_t> marks;
  for (std::size_t c : checkpoints) {
    if (c >= 1 && c <= n_max) marks.push_back(c);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  KilledChainResult out;
  out.lifetimes.assign(replicas, 0);
  // Per replica and checkpoint: empirical measure, or NaN when dead.
  std::vector<double> measures(replicas * marks.size() * m, 0.0);

  const auto R = static_cast<std::ptrdiff_t>(replicas);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t rr = 0; rr < R; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    Rng rng(spec, r);
    History h(init, n_max);
    std::vector<double> counts(m, 0.0);
    std::size_t next_mark = 0;
    std::size_t alive = n_max;
    for (std::size_t j = 1; j <= n_max; ++j) {
      const State s = h.at_lag(sample_lag(tau, rng));
      double u = rng.uniform();
      const auto row = sigma.row(s);
      std::size_t t = m;
      for (std::size_t k = 0; k < m; ++k) {
        u -= row[k];
        if (u < 0.0) {
          t = k;
          break;
        }
      }
      if (t == m) {
        alive = j - 1;
        break;
      }
      h.push(static_cast<State>(t));
      counts[t] += 1.0;
      if (next_mark < marks.size() && marks[next_mark] == j) {
        double* dst = measures.data() + (r * marks.size() + next_mark) * m;
        for (std::size_t k = 0; k < m; ++k) dst[k] = counts[k] / static_cast<double>(j);
        ++next_mark;
      }
    }
    out.lifetimes[r] = alive;
  }

  std::vector<std::size_t> dead_at(n_max + 2, 0);
  for (std::size_t z : out.lifetimes) ++dead_at[z + 1];
  out.curve.replicas = replicas;
  std::size_t survivors = replicas;
  for (std::size_t n = 0; n <= n_max; ++n) {
    survivors -= dead_at[n];
    const double p = static_cast<double>(survivors) / static_cast<double>(replicas);
    out.curve.n.push_back(n);
    out.curve.p_hat.push_back(p);
    out.curve.se.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(replicas)));
  }

  for (std::size_t c = 0; c < marks.size(); ++c) {
    EmpiricalCheckpoint cp;
    cp.n = marks[c];
    cp.mean_measure.assign(m, 0.0);
    for (std::size_t r = 0; r < replicas; ++r) {
      if (out.lifetimes[r] < marks[c]) continue;
      ++cp.survivors;
      const double* src = measures.data() + (r * marks.size() + c) * m;
      for (std::size_t k = 0; k < m; ++k) cp.mean_measure[k] += src[k];
    }
    if (cp.survivors > 0) {
      for (double& x : cp.mean_measure) x /= static_cast<double>(cp.survivors);
    }
    out.empirical.push_back(std::move(cp));
  }
  return out;
}

std::size_t default_burnin(const RelocationLaw& tau) {
  if (tau.kind() == RelocationLaw::Kind::Geometric) {
    return static_cast<std::size_t>(std::ceil(10.0 / tau.epsilon()));
  }
  return 100 * (*tau.support_max() + 1);
}

WeightedChainStats run_weighted_chain(const Matrix& sigma, const RelocationLaw& tau, const TiltVector& a,
                                      const WeightedChainOptions& opts, RngSpec spec) {
  const std::size_t m = sigma.rows();
  if (a.size() != m) throw Error(ErrorCode::InvalidArgument, "tilt dimension mismatch");
  if (opts.start >= m) throw Error(ErrorCode::InvalidArgument, "start state out of range");
  if (opts.thin < 1) throw Error(ErrorCode::InvalidArgument, "thin must be >= 1");
  const std::size_t burnin = opts.burnin.value_or(default_burnin(tau));
  if (opts.steps <= burnin) throw Error(ErrorCode::InvalidArgument, "steps must exceed burn-in");

  const auto sa = apply_tilt(sigma, a);
  const Matrix pi = biased_transition(sigma, a);
  const double max_sa = *std::max_element(sa.begin(), sa.end());
  std::vector<double> log_a(m);
  for (std::size_t s = 0; s < m; ++s) log_a[s] = std::log(a[s]);

  WeightedChainStats st;
  st.m = m;
  st.burnin = burnin;
  st.histogram.assign(m, 0);

  const HistoryWindow init = HistoryWindow::constant(opts.start, 1);
  History h(init, opts.steps);
  OccupationTracker occ(tau, m, init);
  Rng rng(spec);

  std::vector<double> integrand;
  integrand.reserve(opts.steps - burnin);
  double sum = 0.0;
  double comp = 0.0;
  std::size_t tries = 0;

  for (std::size_t j = 1; j <= opts.steps; ++j) {
    const bool recording = j > burnin;
    if (recording) {
      const auto& th = occ.theta();
      const double f = std::log(dot(th, sa)) - dot(th, log_a);
      integrand.push_back(f);
      // Neumaier summation of the running total.
      const double t = sum + f;
      comp += std::abs(sum) >= std::abs(f) ? (sum - t) + f : (f - t) + sum;
      sum = t;
    }
    const State s = weighted_source(tau, h, sa, max_sa, rng, tries);
    const State next = draw_from_row(pi.row(s), rng.uniform());
    h.push(next);
    occ.update(h);
    if (recording) {
      ++st.histogram[next];
      if ((j - burnin) % opts.thin == 0) {
        st.sample_steps.push_back(j);
        st.theta.insert(st.theta.end(), occ.theta().begin(), occ.theta().end());
        st.c2_running.push_back((sum + comp) / static_cast<double>(integrand.size()));
      }
    }
  }

  st.integrand_count = integrand.size();
  st.c2_mean = pairwise_sum(integrand) / static_cast<double>(integrand.size());
  st.acceptance_rate = static_cast<double>(opts.steps) / static_cast<double>(tries);

  const std::size_t batches = std::min(opts.batches, integrand.size());
  if (batches >= 2) {
    const std::size_t size = integrand.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
      means[b] = pairwise_sum(std::span<const double>(integrand).subspan(b * size, size)) / static_cast<double>(size);
    }
    const double mean = pairwise_sum(means) / static_cast<double>(batches);
    double ss = 0.0;
    for (double x : means) ss += (x - mean) * (x - mean);
    st.c2_se = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  }
  return st;
}

FkEstimate fk_survival_estimate(const Matrix& sigma, const RelocationLaw& tau, const TiltVector& a,
                                const HistoryWindow& init, std::size_t n, std::size_t replicas, RngSpec spec) {
  if (replicas < 1) throw Error(ErrorCode::InvalidArgument, "replicas must be >= 1");
  const std::size_t m = sigma.rows();
  if (a.size() != m) throw Error(ErrorCode::InvalidArgument, "tilt dimension mismatch");
  for (State s : init.states()) {
    if (s >= m) throw Error(ErrorCode::InvalidArgument, "initial window state out of range");
  }
  const auto sa = apply_tilt(sigma, a);
  const Matrix pi = biased_transition(sigma, a);
  const double max_sa = *std::max_element(sa.begin(), sa.end());
  std::vector<double> log_a(m);
  for (std::size_t s = 0; s < m; ++s) log_a[s] = std::log(a[s]);
  const double log_guard = std::log(1e300);

  std::vector<double> log_w(replicas);
  const auto R = static_cast<std::ptrdiff_t>(replicas);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t rr = 0; rr < R; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    Rng rng(spec, r);
    History h(init, n);
    OccupationTracker occ(tau, m, init);
    std::size_t tries = 0;
    double lw = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      lw += std::log(dot(occ.theta(), sa));
      const State s = weighted_source(tau, h, sa, max_sa, rng, tries);
      const State next = draw_from_row(pi.row(s), rng.uniform());
      lw -= log_a[next];
      h.push(next);
      occ.update(h);
    }
    log_w[r] = lw;
  }

  FkEstimate out;
  out.replicas = replicas;
  out.max_log_weight = *std::max_element(log_w.begin(), log_w.end());
  if (out.max_log_weight > log_guard) {
    throw Error(ErrorCode::OverflowGuard, "Feynman-Kac weight exceeds 1e300");
  }
  std::vector<double> w(replicas);
  std::transform(log_w.begin(), log_w.end(), w.begin(), [](double x) { return std::exp(x); });
  out.estimate = pairwise_sum(w) / static_cast<double>(replicas);
  for (double& x : w) x = (x - out.estimate) * (x - out.estimate);
  const double var = replicas > 1 ? pairwise_sum(w) / static_cast<double>(replicas - 1) : 0.0;
  out.se = std::sqrt(var / static_cast<double>(replicas));
  return out;
}

}  // namespace reloc
