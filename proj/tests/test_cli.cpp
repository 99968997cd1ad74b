#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lsvr/config.hpp"
#include "lsvr/run.hpp"

using namespace lsvr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "lsvr_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Invocation {
  int exit_code;
  std::string err;
};

// Runs the installed tool with stderr captured.
Invocation invoke(const std::string& args, const fs::path& dir) {
  const char* bin = std::getenv("LSV_RESPONSE_BIN");
  REQUIRE(bin != nullptr);
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(bin) + " " + args + " --out-dir " +
                          (dir / "out").string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(err)};
}

std::vector<std::vector<double>> read_csv(const fs::path& p,
                                          std::vector<std::string>& header) {
  std::ifstream in(p);
  std::string line, cell;
  std::getline(in, line);
  std::stringstream hs(line);
  header.clear();
  while (std::getline(hs, cell, ',')) header.push_back(cell);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    rows.emplace_back();
    while (std::getline(ls, cell, ',')) rows.back().push_back(std::stod(cell));
  }
  return rows;
}

}  // namespace

TEST_CASE("round-trip number formatting") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::exp(u(rng)) * (i % 2 ? -1 : 1);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-8) == "1e-08");
}

TEST_CASE("config file and flag precedence") {
  const auto dir = scratch("precedence");
  const auto file = dir / "run.cfg";
  std::ofstream(file) << "# sweep point\n"
                         "alpha = 0.5\n"
                         "gamma = auto   # resolved later\n"
                         "eps = 0.02, 0.01\n"
                         "max-branches = 1e5\n"
                         "mode = validate\n";
  const auto cfg = build_config(file.string(), {{"alpha", "0.6"}, {"cheb", "32"}});
  CHECK(cfg.alpha == 0.6);
  CHECK(cfg.cheb == 32);
  CHECK_FALSE(cfg.gamma.has_value());
  CHECK(cfg.resolved_gamma() == default_gamma(0.6));
  CHECK(cfg.eps == std::vector<double>{0.02, 0.01});
  CHECK(cfg.max_branches == 100000);
  CHECK(cfg.mode == Mode::validate);

  // Settings round-trip.
  std::vector<std::string> errors;
  const auto again = apply_settings(RunConfig{}, to_settings(cfg), errors);
  CHECK(errors.empty());
  CHECK(to_settings(again) == to_settings(cfg));
}

TEST_CASE("config errors are listed exhaustively") {
  const auto dir = scratch("errors");
  const auto file = dir / "bad.cfg";
  std::ofstream(file) << "alpha = 0.75\nbeta = 3\nnot a setting\n";
  try {
    (void)build_config(file.string(), {{"cheb", "2"},
                                       {"ulam_bins", "1000"},
                                       {"gamma", "0.5"},
                                       {"tail_tol", "abc"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("unknown config key: beta") != std::string::npos);
    CHECK(msg.find("expected key = value") != std::string::npos);
    CHECK(msg.find("cheb") != std::string::npos);
    CHECK(msg.find("ulam_bins") != std::string::npos);
    CHECK(msg.find("gamma (0.5) must exceed alpha") != std::string::npos);
    CHECK(msg.find("tail_tol") != std::string::npos);
  }
  // gamma <= alpha is allowed only in diagnose mode.
  CHECK_NOTHROW(build_config(std::nullopt, {{"gamma", "0.3"}, {"mode", "diagnose"}}));
  CHECK_THROWS_AS(build_config(std::nullopt, {{"mode", "sweep"}}), ConfigError);
  CHECK_THROWS_AS(build_config(std::nullopt, {{"alpha", "0.005"}, {"mode", "validate"}}),
                  ConfigError);
}

TEST_CASE("density mode output") {
  const auto dir = scratch("density");
  const auto r = invoke("--alpha 0.75 --mode density", dir);
  REQUIRE(r.exit_code == kExitOk);
  std::vector<std::string> header;
  const auto rows = read_csv(dir / "out" / "results.csv", header);
  CHECK(header == std::vector<std::string>{"x", "h"});
  REQUIRE(rows.size() > 100);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][0] > rows[i - 1][0]);
  const auto nodes = read_csv(dir / "out" / "induced.csv", header);
  CHECK(header == std::vector<std::string>{"y", "hat_h", "hat_h_prime"});
  CHECK(nodes.size() == 48);
  for (const auto& row : nodes) CHECK(row[1] > 0.0);
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(summary["schema_version"] == kSummarySchemaVersion);
  CHECK(summary["induced"]["fixed_point_residual"].get<double>() < 1e-8);
}

TEST_CASE("response mode is reproducible byte for byte") {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  const std::string args = "--alpha 1.25 --gamma 1.35 --mode response";
  REQUIRE(invoke(args, a).exit_code == kExitOk);
  REQUIRE(invoke(args, b).exit_code == kExitOk);
  for (const char* f : {"results.csv", "induced.csv", "summary.json"}) {
    CAPTURE(f);
    const auto x = slurp(a / "out" / f);
    CHECK_FALSE(x.empty());
    CHECK(x == slurp(b / "out" / f));
  }
  std::vector<std::string> header;
  read_csv(a / "out" / "results.csv", header);
  // No normalized response in the infinite-measure case.
  CHECK(header == std::vector<std::string>{"x", "h", "h_star"});
}

TEST_CASE("validate mode at alpha = 0.5") {
  const auto dir = scratch("validate");
  const auto r = invoke("--alpha 0.5 --mode validate --ulam-bins 1024", dir);
  CHECK(r.err.empty());
  REQUIRE(r.exit_code == kExitOk);
  const auto s = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  const auto norms = s["validation"]["fd"]["fd_norms"].get<std::vector<double>>();
  REQUIRE(norms.size() == 3);
  CHECK(norms[1] < norms[0]);
  CHECK(norms[2] < norms[1]);
  CHECK(s["kac"]["kac_gap"].get<double>() < 1e-6);
  CHECK(s["validation"]["failures"].empty());
  std::vector<std::string> header;
  read_csv(dir / "out" / "results.csv", header);
  CHECK(header.back() == "normalized_response");
}

TEST_CASE("exit codes") {
  SUBCASE("diagnose with gamma = alpha/2 names (a4')") {
    const auto dir = scratch("diagnose");
    const auto r = invoke("--alpha 0.75 --gamma 0.375 --mode diagnose", dir);
    CHECK(r.exit_code == kExitValidation);
    CHECK(r.err.find("(a4')") != std::string::npos);
    const auto s = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
    CHECK_FALSE(s["diagnostics"]["violations"].empty());
  }
  SUBCASE("diagnose at the default gamma passes") {
    const auto dir = scratch("diagnose_ok");
    CHECK(invoke("--alpha 0.75 --mode diagnose", dir).exit_code == kExitOk);
  }
  SUBCASE("config errors stop before any output") {
    const auto dir = scratch("config");
    const auto r = invoke("--alpha 0.75 --gamma 0.5 --cheb 1", dir);
    CHECK(r.exit_code == kExitConfig);
    CHECK(r.err.find("gamma") != std::string::npos);
    CHECK(r.err.find("cheb") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out"));
  }
  SUBCASE("unknown flag or key") {
    const auto dir = scratch("unknown");
    CHECK(invoke("--colour blue", dir).exit_code == kExitConfig);
    std::ofstream(dir / "x.cfg") << "colour = blue\n";
    const auto r = invoke("--config " + (dir / "x.cfg").string(), dir);
    CHECK(r.exit_code == kExitConfig);
    CHECK(r.err.find("unknown config key: colour") != std::string::npos);
  }
  SUBCASE("unmet truncation target is a solver failure") {
    const auto dir = scratch("solver");
    const auto r = invoke("--alpha 0.75 --max-branches 8", dir);
    CHECK(r.exit_code == kExitSolver);
    CHECK(r.err.find("branch truncation") != std::string::npos);
  }
}

TEST_CASE("in-process run reports the failing stage") {
  RunConfig cfg;
  cfg.max_branches = 8;
  cfg.out_dir = scratch("inproc").string();
  std::ostringstream log;
  CHECK(run(cfg, log) == kExitSolver);
  CHECK(log.str().find("stage branch truncation") != std::string::npos);
}
