#include "reloc/lifted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reloc/occupation.hpp"
#include "reloc/perron.hpp"

namespace reloc {

std::size_t max_affordable_depth(std::size_t m, std::size_t state_cap) {
  if (m == 0 || state_cap == 0) throw Error(ErrorCode::InvalidArgument, "empty state space");
  if (m == 1) return std::numeric_limits<std::uint32_t>::max();
  if (m > state_cap) throw Error(ErrorCode::StateCapExceeded, "state cap smaller than the number of states");
  std::size_t d = 0;
  std::size_t count = m;
  while (count <= state_cap / m) {
    count *= m;
    ++d;
  }
  return d;
}

std::size_t LiftedChain::index_of(const HistoryWindow& w) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k <= d_; ++k) {
    const State s = w[k];
    if (s >= m_) throw Error(ErrorCode::InvalidArgument, "window state " + std::to_string(s) + " out of range");
    idx = idx * m_ + s;
  }
  return idx;
}

HistoryWindow LiftedChain::window_at(std::size_t index) const {
  if (index >= n_states_) throw Error(ErrorCode::InvalidArgument, "window index out of range");
  std::vector<State> states(d_ + 1);
  for (std::size_t k = d_ + 1; k-- > 0;) {
    states[k] = static_cast<State>(index % m_);
    index /= m_;
  }
  return HistoryWindow(std::move(states));
}

double LiftedChain::max_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_states_; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < m_; ++t) sum += weights_[i * m_ + t];
    best = std::max(best, sum);
  }
  return best;
}

void LiftedChain::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_states_; ++i) {
    const double* w = weights_.data() + i * m_;
    const std::size_t base = i / m_;
    double acc = 0.0;
    for (std::size_t t = 0; t < m_; ++t) acc += w[t] * x[t * stride_ + base];
    y[i] = acc;
  }
}

void LiftedChain::apply_parallel(std::span<const double> x, std::span<double> y) const {
  const auto n = static_cast<std::ptrdiff_t>(n_states_);
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* w = weights_.data() + i * m_;
    const std::size_t base = i / m_;
    double acc = 0.0;
    for (std::size_t t = 0; t < m_; ++t) acc += w[t] * x[t * stride_ + base];
    y[i] = acc;
  }
}

Matrix LiftedChain::to_dense() const {
  if (n_states_ > 4096) throw Error(ErrorCode::StateCapExceeded, "dense copy limited to 4096 windows");
  Matrix out(n_states_, n_states_);
  for (std::size_t i = 0; i < n_states_; ++i)
    for (std::size_t t = 0; t < m_; ++t) out(i, successor(i, t)) += weight(i, t);
  return out;
}

LiftedChain build_lifted(const Matrix& sigma, std::span<const double> masses, LiftMode mode, double tail_mass,
                         std::size_t state_cap) {
  if (!sigma.is_square() || sigma.rows() == 0) throw Error(ErrorCode::NotSquare, "sigma must be square");
  if (masses.empty()) throw Error(ErrorCode::InvalidArgument, "lift needs at least one mass");
  for (double x : masses) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "lift masses must be >= 0");
  }
  if (!(tail_mass >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tail mass must be >= 0");

  const std::size_t m = sigma.rows();
  const std::size_t d = masses.size() - 1;
  if (d > max_affordable_depth(m, state_cap)) {
    throw Error(ErrorCode::StateCapExceeded, "m^(d+1) exceeds the state cap at d=" + std::to_string(d) +
                                                 " (largest affordable d is " +
                                                 std::to_string(max_affordable_depth(m, state_cap)) + ")");
  }

  LiftedChain L;
  L.sigma_ = sigma;
  L.masses_.assign(masses.begin(), masses.end());
  L.tail_ = mode == LiftMode::Upper ? tail_mass : 0.0;
  L.mode_ = mode;
  L.m_ = m;
  L.d_ = d;
  L.stride_ = 1;
  for (std::size_t k = 0; k < d; ++k) L.stride_ *= m;
  L.n_states_ = m == 1 ? 1 : L.stride_ * m;

  std::vector<double> extra(m, 0.0);
  if (mode == LiftMode::Upper) {
    for (std::size_t t = 0; t < m; ++t) {
      double top = 0.0;
      for (std::size_t u = 0; u < m; ++u) top = std::max(top, sigma(u, t));
      extra[t] = tail_mass * top;
    }
  }

  L.weights_.assign(L.n_states_ * m, 0.0);
  std::vector<std::size_t> digits(d + 1);
  for (std::size_t i = 0; i < L.n_states_; ++i) {
    std::size_t rest = i;
    for (std::size_t k = d + 1; k-- > 0;) {
      digits[k] = m == 1 ? 0 : rest % m;
      rest /= m;
    }
    double* w = L.weights_.data() + i * m;
    for (std::size_t t = 0; t < m; ++t) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= d; ++k) acc += masses[k] * sigma(digits[k], t);
      w[t] = acc + extra[t];
    }
  }
  if (m == 1) L.stride_ = 0;
  return L;
}

LiftedChain build_lifted(const Matrix& sigma, const TruncationResult& truncation, LiftMode mode,
                         std::size_t state_cap) {
  if (mode == LiftMode::Lower && truncation.mode != TruncationMode::Conservative) {
    throw Error(ErrorCode::InvalidArgument, "lower mode needs a conservative truncation");
  }
  return build_lifted(sigma, truncation.masses, mode, truncation.dropped, state_cap);
}

LiftedChain build_lifted(const Matrix& sigma, const RelocationLaw& tau, std::size_t state_cap) {
  return build_lifted(sigma, tau.bounded_masses(), LiftMode::Exact, 0.0, state_cap);
}

SpectralResult lifted_spectral_radius(const LiftedChain& chain, PowerOptions opts) {
  const double top = chain.max_row_sum();
  if (!(top > 0.0)) throw Error(ErrorCode::NoConvergence, "lifted operator is zero");
  opts.shift = kPerronShift * top;
  const PowerResult p = power_iterate(
      chain.size(), [&](std::span<const double> x, std::span<double> y) { chain.apply_parallel(x, y); }, opts);

  SpectralResult out;
  out.radius = p.radius;
  out.lower = p.lower;
  out.upper = p.upper;
  out.iterations = p.iterations;
  out.right_vector = p.vector;
  std::vector<double> image(chain.size());
  chain.apply_parallel(out.right_vector, image);
  double worst = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    worst = std::max(worst, std::abs(image[i] - out.radius * out.right_vector[i]));
  }
  out.residual = worst / out.radius;
  return out;
}

double survival_exact(const LiftedChain& chain, const HistoryWindow& init, std::size_t n) {
  const std::size_t start = chain.index_of(init);
  if (n == 0) return 1.0;
  std::vector<double> v(chain.size(), 1.0);
  std::vector<double> w(chain.size());
  for (std::size_t k = 0; k < n; ++k) {
    chain.apply_parallel(v, w);
    v.swap(w);
  }
  return v[start];
}

double log_survival_exact(const LiftedChain& chain, const HistoryWindow& init, std::size_t n) {
  const std::size_t start = chain.index_of(init);
  std::vector<double> v(chain.size(), 1.0);
  std::vector<double> w(chain.size());
  double log_scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    chain.apply_parallel(v, w);
    const double top = *std::max_element(w.begin(), w.end());
    if (!(top > 0.0)) return -std::numeric_limits<double>::infinity();
    for (double& x : w) x /= top;
    log_scale += std::log(top);
    v.swap(w);
  }
  return log_scale + std::log(v[start]);
}

StructureFlags lifted_structure_check(const LiftedChain& chain) {
  const std::size_t n = chain.size();
  const std::size_t m = chain.m();
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::size_t> targets;
  targets.reserve(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < m; ++t) {
      if (chain.weight(i, t) > 0.0) targets.push_back(chain.successor(i, t));
    }
    offsets[i + 1] = targets.size();
  }
  const GraphStructure g = analyze_digraph(offsets, targets);
  StructureFlags flags;
  flags.irreducible = g.strongly_connected;
  flags.aperiodic = g.strongly_connected && g.period == 1;
  flags.strictly_positive = chain.d() == 0 && targets.size() == n * m;
  return flags;
}

RadiusBracket bracket_radius(const Matrix& sigma, const RelocationLaw& tau, const BracketOptions& opts) {
  const std::size_t m = sigma.rows();
  const std::size_t d_cap = std::min(opts.d_max, max_affordable_depth(m, opts.state_cap));
  PowerOptions power;
  power.tolerance = opts.tolerance;

  RadiusBracket out;
  if (const auto top = tau.support_max(); top && *top <= d_cap) {
    const LiftedChain L = build_lifted(sigma, tau, opts.state_cap);
    const double r = lifted_spectral_radius(L).radius;
    out.lo = out.hi = out.window_lo = out.window_hi = r;
    out.d_used = *top;
    out.exact = true;
    out.method = "exact";
    return out;
  }

  TruncationResult trunc;
  try {
    trunc = truncate_law(tau, opts.delta_tail, d_cap, TruncationMode::Conservative);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidArgument) throw;
    throw Error(ErrorCode::StateCapExceeded,
                "no relocation mass within the affordable window d=" + std::to_string(d_cap));
  }
  out.d_used = trunc.d;
  out.tail_mass = trunc.dropped;
  out.cap_reached = trunc.cap_reached;

  const LiftedChain lower = build_lifted(sigma, trunc, LiftMode::Lower, opts.state_cap);
  const LiftedChain upper = build_lifted(sigma, trunc, LiftMode::Upper, opts.state_cap);
  out.window_lo = lifted_spectral_radius(lower, power).lower;
  out.window_hi = lifted_spectral_radius(upper, power).upper;
  out.lo = out.window_lo;
  out.hi = out.window_hi;
  out.method = "window";

  if (opts.use_occupation && m == 2 && tau.kind() == RelocationLaw::Kind::Geometric) {
    OccupationOptions occ;
    occ.cells = opts.occupation_cells;
    const OccupationBracket ob = occupation_bracket(sigma, tau.epsilon(), occ);
    out.lo = std::max(out.lo, ob.lo);
    out.hi = std::min(out.hi, ob.hi);
    out.method = "window+occupation";
  }
  return out;
}

}  // namespace reloc
