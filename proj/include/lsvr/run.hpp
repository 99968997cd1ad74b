#pragma once

#include <ostream>

#include "lsvr/config.hpp"

namespace lsvr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitValidation = 4;

inline constexpr int kSummarySchemaVersion = 1;

/// Runs the stages selected by cfg.mode and writes results.csv,
/// induced.csv and summary.json into cfg.out_dir (diagnose mode writes
/// summary.json only). Errors are reported on `log` with the failing stage
/// named; the return value is one of the exit codes above.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace lsvr
