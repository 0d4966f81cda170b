#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "reloc/matrix.hpp"

namespace reloc {

inline constexpr std::string_view kVersion = "0.1.0";

/// Parsed from an INI-like file:
///
///   [experiment]
///   name = fig2
///   [input]
///   sigma = data/sigma_fig.txt
///   [run]
///   epsilons = 0.5, 0.1, 0.01
///   output = out/fig2
///
/// Unset keys keep the defaults of the chosen experiment.
struct ExperimentConfig {
  std::string experiment;
  /// Empty means the built-in benchmark matrix.
  std::string sigma_path;
  std::string tau = "explicit 0.5 0.5";
  std::vector<double> epsilons;
  std::size_t steps = 2000000;
  std::optional<std::size_t> burnin;
  std::size_t thin = 100;
  std::size_t replicas = 100000;
  std::uint64_t seed = 1;
  std::filesystem::path output = "out";
  bool emit_svg = false;
  std::optional<int> threads;
  // fig2
  std::size_t d_max = 14;
  double delta_tail = 1e-10;
  std::size_t occupation_cells = 16384;
  std::size_t restarts = 8;
  // conjecture scan
  std::size_t count = 50;
  std::size_t m = 2;
  std::size_t law_d_max = 3;

  Matrix load_sigma() const;
  nlohmann::json to_json() const;
};

std::vector<double> default_fig1_epsilons();
/// Twelve values 0.001 * 500^{k/11}, largest first.
std::vector<double> default_fig2_epsilons();

/// Throws ParseError (with line and column) or UnknownExperiment.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig read_config_file(const std::filesystem::path& path);

/// Fills experiment-specific defaults and validates epsilons.
void finalize_config(ExperimentConfig& cfg);

struct ManifestFile {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string experiment;
  nlohmann::json config;
  std::vector<std::pair<std::string, double>> stages;
  std::vector<ManifestFile> files;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

std::string sha256_file(const std::filesystem::path& path);
/// True when every listed file exists under dir with the recorded digest.
bool verify_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

struct Fig1Row {
  double eps = 0.0;
  double mean_theta_1 = 0.0;
  double std_theta_1 = 0.0;
  double rho_1 = 0.0;
};

struct Fig1Result {
  RunManifest manifest;
  std::vector<Fig1Row> rows;
};

struct Fig2Row {
  double eps = 0.0;
  double log_r_lo = 0.0;
  double log_r_hi = 0.0;
  double log_r_benchmark = 0.0;
  double log_J_star = 0.0;
  std::size_t d_used = 0;
  bool cap_reached = false;
  std::string method;
};

struct Fig2Result {
  RunManifest manifest;
  std::vector<Fig2Row> rows;
};

struct ConjectureRow {
  std::size_t case_id = 0;
  double r = 0.0;
  double J_star = 0.0;
  double r_bold = 0.0;
  bool violated = false;
};

struct ConjectureResult {
  RunManifest manifest;
  std::vector<ConjectureRow> rows;
  std::size_t violations = 0;
};

/// Weighted chain with a = 1 per epsilon; writes fig1_eps{eps}.csv and
/// fig1_summary.csv (and fig1.svg) into cfg.output.
Fig1Result run_fig1(const ExperimentConfig& cfg);
/// Radius brackets per geometric epsilon; writes fig2.csv (and fig2.svg).
Fig2Result run_fig2(const ExperimentConfig& cfg);
/// Random sigma and bounded tau; writes conjecture.csv.
ConjectureResult run_conjecture_scan(const ExperimentConfig& cfg);

/// Runs the configured experiment and writes manifest.json next to its
/// outputs.
RunManifest run_experiment(ExperimentConfig cfg);
RunManifest run_config(const std::filesystem::path& path);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

}  // namespace reloc
