#include "reloc/experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "reloc/bounds.hpp"
#include "reloc/format.hpp"
#include "reloc/lifted.hpp"
#include "reloc/perron.hpp"
#include "reloc/simulate.hpp"
#include "reloc/svg.hpp"

namespace reloc {

namespace fs = std::filesystem;

Matrix ExperimentConfig::load_sigma() const {
  return sigma_path.empty() ? benchmark_sigma() : read_matrix_file(sigma_path);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["sigma"] = sigma_path.empty() ? "builtin" : sigma_path;
  j["tau"] = tau;
  j["epsilons"] = epsilons;
  j["steps"] = steps;
  j["burnin"] = burnin ? nlohmann::json(*burnin) : nlohmann::json("default");
  j["thin"] = thin;
  j["replicas"] = replicas;
  j["seed"] = seed;
  j["output"] = output.generic_string();
  j["svg"] = emit_svg;
  j["d_max"] = d_max;
  j["delta_tail"] = delta_tail;
  j["occupation_cells"] = occupation_cells;
  j["restarts"] = restarts;
  j["count"] = count;
  j["m"] = m;
  j["law_d_max"] = law_d_max;
  return j;
}

std::vector<double> default_fig1_epsilons() { return {0.3, 0.1, 0.03, 0.01, 0.003, 0.001}; }

std::vector<double> default_fig2_epsilons() {
  std::vector<double> out;
  for (int k = 11; k >= 0; --k) out.push_back(0.001 * std::pow(500.0, k / 11.0));
  return out;
}

namespace {

const std::vector<std::string> kExperiments{"fig1", "fig2", "conjecture-scan"};

[[noreturn]] void parse_fail(std::size_t line, std::size_t col, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("bad number '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(v) + "'");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"experiment.name", [](ExperimentConfig& c, std::string_view v) { c.experiment = std::string(v); }},
      {"input.sigma", [](ExperimentConfig& c, std::string_view v) { c.sigma_path = std::string(v); }},
      {"input.tau", [](ExperimentConfig& c, std::string_view v) { c.tau = std::string(v); }},
      {"run.epsilons", [](ExperimentConfig& c, std::string_view v) { c.epsilons = parse_real_list(std::string(v)); }},
      {"run.steps", [](ExperimentConfig& c, std::string_view v) { c.steps = parse_number<std::size_t>(v); }},
      {"run.burnin", [](ExperimentConfig& c, std::string_view v) { c.burnin = parse_number<std::size_t>(v); }},
      {"run.thin", [](ExperimentConfig& c, std::string_view v) { c.thin = parse_number<std::size_t>(v); }},
      {"run.replicas", [](ExperimentConfig& c, std::string_view v) { c.replicas = parse_number<std::size_t>(v); }},
      {"run.seed", [](ExperimentConfig& c, std::string_view v) { c.seed = parse_number<std::uint64_t>(v); }},
      {"run.output", [](ExperimentConfig& c, std::string_view v) { c.output = std::string(v); }},
      {"run.svg", [](ExperimentConfig& c, std::string_view v) { c.emit_svg = parse_bool(v); }},
      {"run.threads", [](ExperimentConfig& c, std::string_view v) { c.threads = parse_number<int>(v); }},
      {"fig2.d_max", [](ExperimentConfig& c, std::string_view v) { c.d_max = parse_number<std::size_t>(v); }},
      {"fig2.delta_tail", [](ExperimentConfig& c, std::string_view v) { c.delta_tail = parse_number<double>(v); }},
      {"fig2.occupation_cells",
       [](ExperimentConfig& c, std::string_view v) { c.occupation_cells = parse_number<std::size_t>(v); }},
      {"fig2.restarts", [](ExperimentConfig& c, std::string_view v) { c.restarts = parse_number<std::size_t>(v); }},
      {"conjecture.count", [](ExperimentConfig& c, std::string_view v) { c.count = parse_number<std::size_t>(v); }},
      {"conjecture.m", [](ExperimentConfig& c, std::string_view v) { c.m = parse_number<std::size_t>(v); }},
      {"conjecture.law_d_max",
       [](ExperimentConfig& c, std::string_view v) { c.law_d_max = parse_number<std::size_t>(v); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t name_line = 0;
  std::size_t name_col = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const std::size_t col = raw.find_first_not_of(" \t") + 1;

    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(line_no, col, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "experiment" && section != "input" && section != "run" && section != "fig2" &&
          section != "conjecture") {
        parse_fail(line_no, col + 1, "unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, col, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) parse_fail(line_no, col, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) parse_fail(line_no, col, "unknown key '" + full + "'");
    const std::size_t value_col = raw.find('=') + 2 + (line.substr(eq + 1).size() - trim(line.substr(eq + 1)).size());
    if (value.empty()) parse_fail(line_no, value_col, "missing value for '" + full + "'");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      parse_fail(line_no, value_col, e.what());
    }
    if (full == "experiment.name") {
      name_line = line_no;
      name_col = value_col;
    }
  }
  if (cfg.experiment.empty()) parse_fail(line_no, 1, "missing [experiment] name");
  if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end()) {
    throw Error(ErrorCode::UnknownExperiment, "line " + std::to_string(name_line) + ", column " +
                                                  std::to_string(name_col) + ": unknown experiment '" +
                                                  cfg.experiment + "'");
  }
  return cfg;
}

ExperimentConfig read_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void finalize_config(ExperimentConfig& cfg) {
  if (cfg.epsilons.empty()) {
    if (cfg.experiment == "fig1") cfg.epsilons = default_fig1_epsilons();
    if (cfg.experiment == "fig2") cfg.epsilons = default_fig2_epsilons();
  }
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    const double e = cfg.epsilons[i];
    if (!(e > 0.0 && e < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon " + format_real(e) + " not in (0,1)");
    if (i > 0 && !(e < cfg.epsilons[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "epsilons must be strictly decreasing");
    }
  }
  if (cfg.thin < 1) throw Error(ErrorCode::InvalidArgument, "thin must be >= 1");
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["version"] = std::string(kVersion);
  j["config"] = config;
  j["stages"] = nlohmann::json::array();
  for (const auto& [name, seconds] : stages) j["stages"].push_back({{"name", name}, {"seconds", seconds}});
  j["files"] = nlohmann::json::array();
  for (const auto& f : files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["warnings"] = warnings;
  return j;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorCode::Io, "SHA-256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

bool verify_manifest(const RunManifest& manifest, const fs::path& dir) {
  for (const auto& f : manifest.files) {
    const fs::path p = dir / f.path;
    if (!fs::exists(p) || sha256_file(p) != f.sha256) return false;
  }
  return true;
}

void write_manifest(const RunManifest& manifest, const fs::path& dir) {
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write manifest in " + dir.string());
  out << manifest.to_json().dump(2) << '\n';
}

namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_file(RunManifest& manifest, const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + p.string());
  manifest.files.push_back({name, sha256_file(p), fs::file_size(p)});
}

RunManifest start_manifest(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output);
  RunManifest m;
  m.experiment = cfg.experiment;
  m.config = cfg.to_json();
  return m;
}

}  // namespace

Fig1Result run_fig1(const ExperimentConfig& input) {
  ExperimentConfig cfg = input;
  cfg.experiment = "fig1";
  finalize_config(cfg);
  Fig1Result out;
  out.manifest = start_manifest(cfg);
  Stopwatch clock;

  const SubStochasticMatrix sigma = validate_substochastic(cfg.load_sigma());
  const std::size_t m = sigma.size();
  const PerronTriple perron = perron_triple(sigma);
  for (const auto& w : sigma.warnings()) out.manifest.warnings.push_back(w);
  out.manifest.stages.emplace_back("perron", clock.lap());

  std::vector<svg::Histogram> panels;
  for (std::size_t k = 0; k < cfg.epsilons.size(); ++k) {
    const double eps = cfg.epsilons[k];
    WeightedChainOptions opts;
    opts.steps = cfg.steps;
    opts.burnin = cfg.burnin;
    opts.thin = cfg.thin;
    const WeightedChainStats st = run_weighted_chain(sigma.entries(), RelocationLaw::geometric(eps),
                                                     TiltVector::ones(m), opts, RngSpec{cfg.seed, k});

    std::string csv = "j";
    for (std::size_t s = 1; s <= m; ++s) csv += ",theta_" + std::to_string(s);
    csv += ",c2_running\n";
    std::vector<double> first(st.samples());
    for (std::size_t i = 0; i < st.samples(); ++i) {
      csv += std::to_string(st.sample_steps[i]);
      for (std::size_t s = 0; s < m; ++s) csv += ',' + format_real(st.theta_at(i, s));
      csv += ',' + format_real(st.c2_running[i]) + '\n';
      first[i] = st.theta_at(i, 0);
    }
    write_file(out.manifest, cfg.output, "fig1_eps" + format_real(eps) + ".csv", csv);

    Fig1Row row;
    row.eps = eps;
    row.rho_1 = perron.rho[0];
    const double n = static_cast<double>(first.size());
    row.mean_theta_1 = pairwise_sum(first) / n;
    std::vector<double> dev(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) dev[i] = (first[i] - row.mean_theta_1) * (first[i] - row.mean_theta_1);
    row.std_theta_1 = first.size() > 1 ? std::sqrt(pairwise_sum(dev) / (n - 1.0)) : 0.0;
    out.rows.push_back(row);
    panels.push_back({"eps = " + format_real(eps), std::move(first)});
    out.manifest.stages.emplace_back("eps=" + format_real(eps), clock.lap());
  }

  std::string summary = "eps,mean_theta_1,std_theta_1,rho_1\n";
  for (const auto& r : out.rows) {
    summary += format_real(r.eps) + ',' + format_real(r.mean_theta_1) + ',' + format_real(r.std_theta_1) + ',' +
               format_real(r.rho_1) + '\n';
  }
  write_file(out.manifest, cfg.output, "fig1_summary.csv", summary);
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (!(out.rows[i].std_theta_1 < out.rows[i - 1].std_theta_1)) {
      out.manifest.warnings.push_back("std_theta_1 did not decrease at eps=" + format_real(out.rows[i].eps));
    }
  }
  if (cfg.emit_svg) {
    write_file(out.manifest, cfg.output, "fig1.svg",
               svg::histogram_panels("occupation of state 1 under a = 1", panels, 0.0, 1.0, 50, perron.rho[0]));
  }
  out.manifest.stages.emplace_back("write", clock.lap());
  write_manifest(out.manifest, cfg.output);
  return out;
}

Fig2Result run_fig2(const ExperimentConfig& input) {
  ExperimentConfig cfg = input;
  cfg.experiment = "fig2";
  finalize_config(cfg);
  Fig2Result out;
  out.manifest = start_manifest(cfg);
  Stopwatch clock;

  const SubStochasticMatrix sigma = validate_substochastic(cfg.load_sigma());
  for (const auto& w : sigma.warnings()) out.manifest.warnings.push_back(w);
  const double log_r = std::log(perron_triple(sigma).r);
  OptimizeJOptions jopts;
  jopts.restarts = cfg.restarts;
  jopts.seed = cfg.seed;
  const OptimizeJResult j = optimize_j(sigma.entries(), jopts);
  for (const auto& w : j.warnings) out.manifest.warnings.push_back(w);
  const double log_J = j.best.log_J;
  out.manifest.stages.emplace_back("optimize_j", clock.lap());

  BracketOptions bopts;
  bopts.delta_tail = cfg.delta_tail;
  bopts.d_max = cfg.d_max;
  bopts.occupation_cells = cfg.occupation_cells;
  for (const double eps : cfg.epsilons) {
    Fig2Row row;
    row.eps = eps;
    row.log_r_benchmark = log_r;
    row.log_J_star = log_J;
    try {
      const RadiusBracket b = bracket_radius(sigma.entries(), RelocationLaw::geometric(eps), bopts);
      row.log_r_lo = std::log(b.lo);
      row.log_r_hi = std::log(b.hi);
      row.d_used = b.d_used;
      row.cap_reached = b.cap_reached;
      row.method = b.method;
      if (b.cap_reached && b.method == "window") {
        out.manifest.warnings.push_back("eps=" + format_real(eps) + ": window stopped at d=" +
                                        std::to_string(b.d_used) + " with tail " + format_real(b.tail_mass));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StateCapExceeded) throw;
      row.log_r_lo = row.log_r_hi = std::numeric_limits<double>::quiet_NaN();
      row.method = "failed";
      out.manifest.warnings.push_back("eps=" + format_real(eps) + ": " + e.what());
    }
    if (row.log_r_lo < log_r - 1e-9) {
      out.manifest.warnings.push_back("eps=" + format_real(eps) + ": lower bound below log r");
    }
    if (row.log_r_hi > log_J + 0.02) {
      out.manifest.warnings.push_back("eps=" + format_real(eps) + ": upper bound above log J* + 0.02");
    }
    out.rows.push_back(row);
    out.manifest.stages.emplace_back("eps=" + format_real(eps), clock.lap());
  }

  std::string csv = "eps,log_r_lo,log_r_hi,log_r_benchmark,log_Jstar\n";
  for (const auto& r : out.rows) {
    csv += format_real(r.eps) + ',' + format_real(r.log_r_lo) + ',' + format_real(r.log_r_hi) + ',' +
           format_real(r.log_r_benchmark) + ',' + format_real(r.log_J_star) + '\n';
  }
  write_file(out.manifest, cfg.output, "fig2.csv", csv);
  if (cfg.emit_svg) {
    std::vector<double> x, lo, hi, br, bj;
    for (const auto& r : out.rows) {
      x.push_back(std::log10(r.eps));
      lo.push_back(r.log_r_lo);
      hi.push_back(r.log_r_hi);
      br.push_back(r.log_r_benchmark);
      bj.push_back(r.log_J_star);
    }
    write_file(out.manifest, cfg.output, "fig2.svg",
               svg::line_chart("persistence exponent against relocation rate", "log10 eps", "log rate",
                               {{"log r bold (lower)", x, lo, "steelblue"},
                                {"log r bold (upper)", x, hi, "navy"},
                                {"log r", x, br, "gray"},
                                {"log J*", x, bj, "crimson"}}));
  }
  out.manifest.stages.emplace_back("write", clock.lap());
  write_manifest(out.manifest, cfg.output);
  return out;
}

namespace {

Matrix random_sigma(std::size_t m, Rng& rng) {
  while (true) {
    Matrix s(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      double sum = 0.0;
      for (std::size_t t = 0; t < m; ++t) sum += (s(i, t) = rng.uniform());
      const double target = 0.2 + 0.79 * rng.uniform();
      if (!(sum > 0.0)) continue;
      for (std::size_t t = 0; t < m; ++t) s(i, t) *= target / sum;
    }
    try {
      const SubStochasticMatrix v = validate_substochastic(s);
      if (!v.proportional_to_stochastic()) return v.entries();
    } catch (const Error&) {
    }
  }
}

RelocationLaw random_bounded_law(std::size_t d_max, Rng& rng) {
  const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(std::max<std::size_t>(d_max, 1)));
  std::vector<double> w(d + 1);
  double total = 0.0;
  for (double& x : w) total += (x = -std::log(rng.uniform_open0()) + 1e-12);
  for (double& x : w) x /= total;
  return RelocationLaw::explicit_law(std::move(w));
}

}  // namespace

ConjectureResult run_conjecture_scan(const ExperimentConfig& input) {
  ExperimentConfig cfg = input;
  cfg.experiment = "conjecture-scan";
  finalize_config(cfg);
  if (cfg.m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
  ConjectureResult out;
  out.manifest = start_manifest(cfg);
  Stopwatch clock;

  for (std::size_t id = 0; id < cfg.count; ++id) {
    Rng rng(RngSpec{cfg.seed, id});
    const Matrix sigma = random_sigma(cfg.m, rng);
    const RelocationLaw tau = random_bounded_law(cfg.law_d_max, rng);
    ConjectureRow row;
    row.case_id = id;
    row.r = perron_triple(sigma).r;
    OptimizeJOptions jopts;
    jopts.restarts = 4;
    jopts.seed = cfg.seed + id;
    row.J_star = optimize_j(sigma, jopts).best.J;
    row.r_bold = lifted_spectral_radius(build_lifted(sigma, tau)).radius;
    row.violated = row.r_bold > row.J_star + 1e-6;
    if (row.r_bold < row.r - 1e-12) {
      out.manifest.warnings.push_back("case " + std::to_string(id) + ": lifted radius below r");
    }
    out.violations += row.violated ? 1 : 0;
    out.rows.push_back(row);
  }
  out.manifest.stages.emplace_back("scan", clock.lap());

  std::string csv = "case_id,r,J_star,r_bold,violated\n";
  for (const auto& r : out.rows) {
    csv += std::to_string(r.case_id) + ',' + format_real(r.r) + ',' + format_real(r.J_star) + ',' +
           format_real(r.r_bold) + ',' + (r.violated ? "1" : "0") + '\n';
  }
  write_file(out.manifest, cfg.output, "conjecture.csv", csv);
  out.manifest.warnings.push_back(std::to_string(out.violations) + " of " + std::to_string(cfg.count) +
                                  " cases exceed J* + 1e-6");
  out.manifest.stages.emplace_back("write", clock.lap());
  write_manifest(out.manifest, cfg.output);
  return out;
}

RunManifest run_experiment(ExperimentConfig cfg) {
  if (cfg.experiment == "fig1") return run_fig1(cfg).manifest;
  if (cfg.experiment == "fig2") return run_fig2(cfg).manifest;
  if (cfg.experiment == "conjecture-scan") return run_conjecture_scan(cfg).manifest;
  throw Error(ErrorCode::UnknownExperiment, "unknown experiment '" + cfg.experiment + "'");
}

RunManifest run_config(const fs::path& path) { return run_experiment(read_config_file(path)); }

}  // namespace reloc
