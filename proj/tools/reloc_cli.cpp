#include <omp.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "reloc/bounds.hpp"
#include "reloc/experiments.hpp"
#include "reloc/format.hpp"
#include "reloc/lifted.hpp"
#include "reloc/perron.hpp"
#include "reloc/simulate.hpp"

using namespace reloc;
using nlohmann::json;

namespace {

Matrix load_sigma(const std::string& path) { return path.empty() ? benchmark_sigma() : read_matrix_file(path); }

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + out_path);
  out << content;
}

TiltVector parse_tilt(const std::string& spec, const Matrix& sigma) {
  if (spec == "h") return TiltVector(perron_triple(sigma).h);
  if (spec == "1" || spec == "ones") return TiltVector::ones(sigma.rows());
  auto a = parse_real_list(spec);
  if (a.size() != sigma.rows()) throw Error(ErrorCode::InvalidArgument, "tilt needs one weight per state");
  return TiltVector(std::move(a));
}

std::vector<State> parse_window(const std::string& spec, std::size_t m) {
  std::vector<State> w;
  for (double x : parse_real_list(spec)) {
    if (x < 1 || x > static_cast<double>(m) || x != std::floor(x)) {
      throw Error(ErrorCode::InvalidArgument, "window entries are state labels 1..m");
    }
    w.push_back(static_cast<State>(x - 1));
  }
  return w;
}

void print_manifest_summary(const RunManifest& m, const std::string& dir) {
  std::cerr << m.experiment << ": wrote " << m.files.size() << " files to " << dir << '\n';
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistence rates of killed Markov chains with preferential relocation"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (1 gives byte-stable output)")->check(CLI::NonNegativeNumber);

  std::string sigma_path;
  std::string tau_spec = "explicit 0.5 0.5";
  std::string out_path;
  std::uint64_t seed = 1;

  auto* perron = app.add_subcommand("perron", "Perron triple of sigma");
  perron->add_option("--sigma", sigma_path, "matrix file (default: built-in benchmark)");

  double dtail = 1e-10;
  std::size_t dmax = 14;
  std::size_t state_cap = kDefaultStateCap;
  bool no_occupation = false;
  auto* lifted = app.add_subcommand("lifted-radius", "Bracket the lifted spectral radius");
  lifted->add_option("--sigma", sigma_path, "matrix file");
  lifted->add_option("--tau", tau_spec, "relocation law: 'dirac d' | 'geometric eps' | 'explicit p0 p1 ...'");
  lifted->add_option("--dtail", dtail, "tail mass allowed beyond the window");
  lifted->add_option("--dmax", dmax, "largest window depth");
  lifted->add_option("--state-cap", state_cap, "largest number of windows");
  lifted->add_flag("--no-occupation", no_occupation, "window bounds only");

  std::size_t n = 10;
  std::size_t replicas = 100000;
  std::string init_spec = "1";
  auto* surv = app.add_subcommand("simulate-survival", "Monte Carlo survival curve of the killed chain");
  surv->add_option("--sigma", sigma_path, "matrix file");
  surv->add_option("--tau", tau_spec, "relocation law");
  surv->add_option("--n", n, "largest time");
  surv->add_option("--replicas", replicas, "number of replicas");
  surv->add_option("--seed", seed, "seed");
  surv->add_option("--init", init_spec, "initial window, most recent first, e.g. 1,2");
  surv->add_option("--out", out_path, "CSV file (default stdout)");

  std::size_t steps = 100000;
  std::size_t burnin = 0;
  std::size_t thin = 1;
  std::string tilt_spec = "1";
  auto* weighted = app.add_subcommand("weighted-run", "Chain with weighted relocations");
  weighted->add_option("--sigma", sigma_path, "matrix file");
  weighted->add_option("--tau", tau_spec, "relocation law");
  weighted->add_option("--a", tilt_spec, "tilt: '1', 'h' or comma-separated weights");
  weighted->add_option("--steps", steps, "total steps");
  auto* burnin_opt = weighted->add_option("--burnin", burnin, "burn-in steps (default depends on tau)");
  weighted->add_option("--thin", thin, "record every thin-th step");
  weighted->add_option("--seed", seed, "seed");
  weighted->add_option("--out", out_path, "CSV file (default stdout)");

  std::size_t restarts = 8;
  auto* c3 = app.add_subcommand("bound-c3", "Maximize J(a) = r_a exp(-rho_a log a)");
  c3->add_option("--sigma", sigma_path, "matrix file");
  c3->add_option("--restarts", restarts, "Nelder-Mead starts");
  c3->add_option("--seed", seed, "seed for random starts");

  std::size_t grid = 101;
  auto* rate = app.add_subcommand("rate-function", "Rate functions I and I_bold on a simplex grid");
  rate->add_option("--sigma", sigma_path, "matrix file");
  rate->add_option("--tau", tau_spec, "bounded relocation law");
  rate->add_option("--grid", grid, "points per simplex edge");
  rate->add_option("--out", out_path, "CSV file (default stdout)");

  ExperimentConfig exp_cfg;
  std::string eps_list;
  std::string out_dir = "out";
  auto add_experiment_options = [&](CLI::App* sub) {
    sub->add_option("--sigma", sigma_path, "matrix file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed");
    sub->add_flag("--svg", exp_cfg.emit_svg, "also write an SVG figure");
  };
  auto* fig1 = app.add_subcommand("fig1", "Occupation-measure concentration experiment");
  add_experiment_options(fig1);
  fig1->add_option("--eps", eps_list, "decreasing epsilons, comma-separated");
  fig1->add_option("--steps", exp_cfg.steps, "steps per epsilon");
  fig1->add_option("--thin", exp_cfg.thin, "record every thin-th step");
  auto* fig2 = app.add_subcommand("fig2", "Lifted radius against epsilon with the J* bound");
  add_experiment_options(fig2);
  fig2->add_option("--eps", eps_list, "decreasing epsilons, comma-separated");
  fig2->add_option("--dmax", exp_cfg.d_max, "largest window depth");
  fig2->add_option("--cells", exp_cfg.occupation_cells, "occupation grid cells");
  auto* scan = app.add_subcommand("conjecture-scan", "Random search for lifted radii above J*");
  add_experiment_options(scan);
  scan->add_option("--count", exp_cfg.count, "number of random cases");
  scan->add_option("--m", exp_cfg.m, "number of states");
  scan->add_option("--law-dmax", exp_cfg.law_d_max, "largest support of the random laws");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("--config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);

    if (*perron) {
      const SubStochasticMatrix sigma = validate_substochastic(load_sigma(sigma_path));
      const PerronTriple p = perron_triple(sigma);
      json j{{"r", p.r}, {"h", p.h}, {"rho", p.rho}, {"iterations", p.iterations},
             {"strictly_positive", sigma.flags().strictly_positive},
             {"proportional_to_stochastic", sigma.proportional_to_stochastic()}, {"warnings", sigma.warnings()}};
      std::cout << j.dump(2) << '\n';
    } else if (*lifted) {
      const SubStochasticMatrix sigma = validate_substochastic(load_sigma(sigma_path));
      BracketOptions opts;
      opts.delta_tail = dtail;
      opts.d_max = dmax;
      opts.state_cap = state_cap;
      opts.use_occupation = !no_occupation;
      const RadiusBracket b = bracket_radius(sigma.entries(), RelocationLaw::parse(tau_spec), opts);
      json j{{"lo", b.lo},         {"hi", b.hi},          {"d_used", b.d_used},           {"tail_mass", b.tail_mass},
             {"exact", b.exact},   {"method", b.method},  {"cap_reached", b.cap_reached}, {"window_lo", b.window_lo},
             {"window_hi", b.window_hi}};
      std::cout << j.dump(2) << '\n';
    } else if (*surv) {
      const SubStochasticMatrix sigma = validate_substochastic(load_sigma(sigma_path));
      const HistoryWindow init(parse_window(init_spec, sigma.size()));
      const KilledChainResult k =
          run_killed_chain(sigma.entries(), RelocationLaw::parse(tau_spec), init, n, replicas, RngSpec{seed, 0});
      std::string csv = "n,p_hat,se\n";
      for (std::size_t i = 0; i < k.curve.n.size(); ++i) {
        csv += std::to_string(k.curve.n[i]) + ',' + format_real(k.curve.p_hat[i]) + ',' + format_real(k.curve.se[i]) +
               '\n';
      }
      emit(out_path, csv);
    } else if (*weighted) {
      const SubStochasticMatrix sigma = validate_substochastic(load_sigma(sigma_path));
      WeightedChainOptions opts;
      opts.steps = steps;
      if (burnin_opt->count() > 0) opts.burnin = burnin;
      opts.thin = thin;
      const WeightedChainStats st = run_weighted_chain(sigma.entries(), RelocationLaw::parse(tau_spec),
                                                       parse_tilt(tilt_spec, sigma.entries()), opts, RngSpec{seed, 0});
      std::string csv = "j";
      for (std::size_t s = 1; s <= st.m; ++s) csv += ",theta_" + std::to_string(s);
      csv += ",c2_running\n";
      for (std::size_t i = 0; i < st.samples(); ++i) {
        csv += std::to_string(st.sample_steps[i]);
        for (std::size_t s = 0; s < st.m; ++s) csv += ',' + format_real(st.theta_at(i, s));
        csv += ',' + format_real(st.c2_running[i]) + '\n';
      }
      emit(out_path, csv);
      std::cerr << "c2 estimate " << format_real(st.c2_mean) << " se " << format_real(st.c2_se) << " burn-in "
                << st.burnin << '\n';
    } else if (*c3) {
      const SubStochasticMatrix sigma = validate_substochastic(load_sigma(sigma_path));
      OptimizeJOptions opts;
      opts.restarts = restarts;
      opts.seed = seed;
      const OptimizeJResult r = optimize_j(sigma.entries(), opts);
      json j{{"a_star", r.best.a}, {"J_star", r.best.J}, {"J_at_one", r.at_one.J}, {"J_at_h", r.at_h.J},
             {"warnings", r.warnings}};
      std::cout << j.dump(2) << '\n';
    } else if (*rate) {
      const SubStochasticMatrix sigma = validate_substochastic(load_sigma(sigma_path));
      const RateFunctionTable t = rate_function_lifted(sigma.entries(), RelocationLaw::parse(tau_spec), grid);
      std::string csv;
      for (std::size_t s = 1; s <= t.m; ++s) csv += "nu_" + std::to_string(s) + ',';
      csv += "I,I_bold\n";
      for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t s = 0; s < t.m; ++s) csv += format_real(t.nu[i * t.m + s]) + ',';
        csv += format_real(t.I[i]) + ',' + format_real(t.I_bold[i]) + '\n';
      }
      emit(out_path, csv);
      if (!t.violations.empty()) std::cerr << "warning: I_bold > I at " << t.violations.size() << " grid points\n";
    } else if (*fig1 || *fig2 || *scan) {
      exp_cfg.experiment = *fig1 ? "fig1" : *fig2 ? "fig2" : "conjecture-scan";
      exp_cfg.sigma_path = sigma_path;
      exp_cfg.seed = seed;
      exp_cfg.output = out_dir;
      if (!eps_list.empty()) exp_cfg.epsilons = parse_real_list(eps_list);
      const RunManifest m = run_experiment(exp_cfg);
      print_manifest_summary(m, out_dir);
    } else if (*run) {
      const ExperimentConfig cfg = read_config_file(config_path);
      if (cfg.threads && threads == 0) omp_set_num_threads(*cfg.threads);
      const RunManifest m = run_experiment(cfg);
      print_manifest_summary(m, cfg.output.string());
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_usage_error() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
