#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsvr/map_params.hpp"

namespace lsvr {

enum class Mode { density, response, validate, diagnose };

std::string to_string(Mode m);

/// One run of the command-line tool. Every field has a key of the same name
/// in the config file (eps is a comma-separated list, gamma may be "auto").
struct RunConfig {
  double alpha = 0.75;
  std::optional<double> gamma;  ///< empty: default_gamma(alpha)
  int cheb = 48;
  double tail_tol = 1e-8;
  std::int64_t max_branches = 4'000'000;
  int grid_min_exp = 40;
  int grid_per_octave = 8;
  int grid_delta_points = 65;
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
  int ulam_bins = 4096;
  Mode mode = Mode::response;
  std::string out_dir = ".";

  [[nodiscard]] MapParams params() const;
  [[nodiscard]] double resolved_gamma() const;

  /// Every problem with the configuration, one message each. gamma <= alpha
  /// is accepted only in diagnose mode, which exists to report it.
  [[nodiscard]] std::vector<std::string> violations() const;
};

using Settings = std::map<std::string, std::string>;

/// Known keys, in output order.
const std::vector<std::string>& config_keys();

/// Reads `key = value` lines; '#' starts a comment, blank lines are
/// skipped. Problems are appended to `errors`, not thrown.
Settings read_config_file(const std::string& path,
                          std::vector<std::string>& errors);

/// Applies settings in order over `base`, collecting unknown keys and
/// unparsable values into `errors`.
RunConfig apply_settings(RunConfig base, const Settings& settings,
                         std::vector<std::string>& errors);

/// File settings overridden by flag settings, then validated. Throws
/// ConfigError listing every problem found.
RunConfig build_config(const std::optional<std::string>& config_path,
                       const Settings& flags);

/// Settings that reproduce `cfg`, with shortest round-trip numbers.
Settings to_settings(const RunConfig& cfg);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

}  // namespace lsvr
