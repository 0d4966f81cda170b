#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "reloc/error.hpp"
#include "reloc/experiments.hpp"

using namespace reloc;
namespace fs = std::filesystem;

namespace {

std::string error_text(const std::string& cfg, ErrorCode expected) {
  try {
    parse_config_text(cfg);
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("no error raised");
  return {};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("reloc_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config_text(
      "# comment\n[experiment]\nname = fig2\n[run]\nepsilons = 0.5, 0.1\nseed = 9\n[fig2]\nd_max = 10\n");
  CHECK(cfg.experiment == "fig2");
  CHECK(cfg.epsilons == std::vector<double>{0.5, 0.1});
  CHECK(cfg.seed == 9);
  CHECK(cfg.d_max == 10);
}

TEST_CASE("config errors carry line and column") {
  CHECK(error_text("[experiment]\nname = fig1\n[run]\n  steps = abc\n", ErrorCode::ParseError).find("line 4, column 11") !=
        std::string::npos);
  CHECK(error_text("[experiment]\nname = fig1\nbogus = 1\n", ErrorCode::ParseError).find("line 3, column 1") !=
        std::string::npos);
  CHECK(error_text("[nowhere]\n", ErrorCode::ParseError).find("line 1") != std::string::npos);
  CHECK(error_text("[run]\nseed = 1\n", ErrorCode::ParseError).find("missing") != std::string::npos);
  CHECK(error_text("[experiment]\nname = fig9\n", ErrorCode::UnknownExperiment).find("line 2, column 8") !=
        std::string::npos);
  CHECK_THROWS_AS(read_config_file("/nonexistent/cfg.ini"), Error);
}

TEST_CASE("epsilon validation") {
  ExperimentConfig cfg;
  cfg.experiment = "fig1";
  cfg.epsilons = {0.1, 0.3};
  CHECK_THROWS_AS(finalize_config(cfg), Error);
  cfg.epsilons = {1.0};
  CHECK_THROWS_AS(finalize_config(cfg), Error);
  cfg.epsilons.clear();
  finalize_config(cfg);
  CHECK(cfg.epsilons == default_fig1_epsilons());

  const auto f2 = default_fig2_epsilons();
  REQUIRE(f2.size() == 12);
  CHECK(f2.front() == doctest::Approx(0.5));
  CHECK(f2.back() == doctest::Approx(0.001));
}

TEST_CASE("fig1 run is deterministic and its manifest verifies") {
  ExperimentConfig cfg;
  cfg.experiment = "fig1";
  cfg.epsilons = {0.3, 0.05};
  cfg.steps = 20000;
  cfg.thin = 10;
  cfg.output = scratch("fig1a");
  const auto a = run_fig1(cfg);
  CHECK(verify_manifest(a.manifest, cfg.output));
  CHECK(fs::exists(cfg.output / "manifest.json"));
  const std::string first = slurp(cfg.output / "fig1_summary.csv");

  cfg.output = scratch("fig1b");
  const auto b = run_fig1(cfg);
  CHECK(slurp(cfg.output / "fig1_summary.csv") == first);
  REQUIRE(a.manifest.files.size() == b.manifest.files.size());
  for (std::size_t i = 0; i < a.manifest.files.size(); ++i) CHECK(a.manifest.files[i].sha256 == b.manifest.files[i].sha256);

  // Tampering is detected.
  std::ofstream(cfg.output / "fig1_summary.csv", std::ios::app) << "x";
  CHECK_FALSE(verify_manifest(b.manifest, cfg.output));
}

TEST_CASE("sha256 of a known string") {
  const fs::path p = scratch("sha") ;
  fs::create_directories(p);
  std::ofstream(p / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(p / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("empty conjecture scan") {
  ExperimentConfig cfg;
  cfg.experiment = "conjecture-scan";
  cfg.count = 0;
  cfg.output = scratch("scan0");
  const auto res = run_conjecture_scan(cfg);
  CHECK(res.rows.empty());
  CHECK(res.violations == 0);
  CHECK(slurp(cfg.output / "conjecture.csv") == "case_id,r,J_star,r_bold,violated\n");
}

TEST_CASE("small conjecture scan") {
  ExperimentConfig cfg;
  cfg.experiment = "conjecture-scan";
  cfg.count = 3;
  cfg.output = scratch("scan3");
  const auto res = run_conjecture_scan(cfg);
  REQUIRE(res.rows.size() == 3);
  for (const auto& r : res.rows) CHECK(r.r_bold >= r.r - 1e-12);
}
