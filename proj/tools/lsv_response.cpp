// Command-line front end: flags override the optional key = value file.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "lsvr/config.hpp"
#include "lsvr/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Linear response of LSV maps through the induced map on [1/2,1]"};

  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "key = value file; flags take precedence");

  // Each flag maps to the config key of the same name (dashes -> underscores).
  const std::vector<std::pair<std::string, std::string>> flags{
      {"alpha", "map parameter alpha > 0"},
      {"gamma", "weight exponent, or auto"},
      {"cheb", "Chebyshev nodes on [1/2,1]"},
      {"tail-tol", "branch-sum tail target"},
      {"max-branches", "upper bound on explicit branches"},
      {"grid-min-exp", "evaluation grid reaches down to 2^-k"},
      {"grid-per-octave", "geometric grid points per octave"},
      {"grid-delta-points", "uniform grid points on [1/2,1]"},
      {"eps", "comma-separated FD steps, strictly decreasing"},
      {"ulam-bins", "Ulam bins (power of two)"},
      {"mode", "density | response | validate | diagnose"},
      {"out-dir", "output directory"},
  };
  std::vector<std::optional<std::string>> values(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i)
    app.add_option("--" + flags[i].first, values[i], flags[i].second);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lsvr::kExitConfig;
  }

  lsvr::Settings overrides;
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (values[i]) overrides[flags[i].first] = *values[i];

  lsvr::RunConfig cfg;
  try {
    cfg = lsvr::build_config(config_path, overrides);
  } catch (const lsvr::ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << '\n';
    return lsvr::kExitConfig;
  }
  return lsvr::run(cfg, std::cerr);
}
