#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "reloc/matrix.hpp"
#include "reloc/projective.hpp"
#include "reloc/relocation.hpp"
#include "reloc/rng.hpp"

namespace reloc {

/// Draw T ~ tau.
std::size_t sample_lag(const RelocationLaw& tau, Rng& rng);

/// Chronological trajectory (oldest first). Lags reaching past the start
/// return the oldest entry, matching HistoryWindow.
class History {
 public:
  History(const HistoryWindow& init, std::size_t reserve = 0);
  State current() const noexcept { return states_.back(); }
  State at_lag(std::size_t lag) const noexcept {
    const std::size_t n = states_.size() - 1;
    return states_[lag >= n ? 0 : n - lag];
  }
  void push(State s) { states_.push_back(s); }
  std::size_t size() const noexcept { return states_.size(); }

 private:
  std::vector<State> states_;
};

/// Occupation measure Theta of the current history, updated step by step:
/// recursively for geometric laws, from the last d+1 entries otherwise.
class OccupationTracker {
 public:
  OccupationTracker(const RelocationLaw& tau, std::size_t m, const HistoryWindow& init);
  void update(const History& h);
  const std::vector<double>& theta() const noexcept { return theta_; }

 private:
  bool geometric_ = false;
  double eps_ = 0.0;
  std::vector<double> masses_;
  std::vector<double> theta_;
};

struct SurvivalCurve {
  std::vector<std::size_t> n;
  std::vector<double> p_hat;
  /// sqrt(p (1 - p) / replicas)
  std::vector<double> se;
  std::size_t replicas = 0;
};

/// Mean empirical measure L_n of the surviving replicas.
struct EmpiricalCheckpoint {
  std::size_t n = 0;
  std::size_t survivors = 0;
  std::vector<double> mean_measure;
};

struct KilledChainResult {
  SurvivalCurve curve;
  /// Steps survived, capped at n_max.
  std::vector<std::size_t> lifetimes;
  std::vector<EmpiricalCheckpoint> empirical;
};

/// Independent replicas of the killed chain; replica i draws from stream
/// (spec.seed, spec.stream, i) so results do not depend on the thread count.
KilledChainResult run_killed_chain(const Matrix& sigma, const RelocationLaw& tau, const HistoryWindow& init,
                                   std::size_t n_max, std::size_t replicas, RngSpec rng,
                                   const std::vector<std::size_t>& checkpoints = {});

struct WeightedChainOptions {
  std::size_t steps = 100000;
  /// Defaults to default_burnin(tau).
  std::optional<std::size_t> burnin;
  std::size_t thin = 1;
  State start = 0;
  std::size_t batches = 20;
};

struct WeightedChainStats {
  std::size_t m = 0;
  std::size_t burnin = 0;
  std::vector<std::size_t> sample_steps;
  /// Row-major, m entries per sample.
  std::vector<double> theta;
  /// Running mean of the bound integrand at each sample.
  std::vector<double> c2_running;
  /// Visits to each state after burn-in.
  std::vector<std::size_t> histogram;
  /// Time average of log(K a(X)) - Theta(X) . log a after burn-in, with a
  /// batch-means standard error.
  double c2_mean = 0.0;
  double c2_se = 0.0;
  std::size_t integrand_count = 0;
  double acceptance_rate = 0.0;

  std::size_t samples() const noexcept { return sample_steps.size(); }
  double theta_at(std::size_t sample, std::size_t s) const { return theta[sample * m + s]; }
};

/// 10/eps for geometric laws, 100 (d+1) for bounded ones.
std::size_t default_burnin(const RelocationLaw& tau);

/// The conservative chain with weighted relocations: the relocation lag is
/// drawn by rejection against (sigma a)(s_T) / max (sigma a), then the walk
/// moves by pi(s_T, .).
WeightedChainStats run_weighted_chain(const Matrix& sigma, const RelocationLaw& tau, const TiltVector& a,
                                      const WeightedChainOptions& opts, RngSpec rng);

struct FkEstimate {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t replicas = 0;
  /// Largest log weight seen over all replicas.
  double max_log_weight = 0.0;
};

/// Mean over replicas of prod_j K a(X(j-1)) / a(X(j)) along the weighted
/// chain; weights are accumulated in log space. Throws OverflowGuard if a
/// weight exceeds 1e300.
FkEstimate fk_survival_estimate(const Matrix& sigma, const RelocationLaw& tau, const TiltVector& a,
                                const HistoryWindow& init, std::size_t n, std::size_t replicas, RngSpec rng);

}  // namespace reloc
