#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsvr {

/// Raised for any invalid parameter combination. The message lists every
/// violation found, one per line.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative solver or a truncation target cannot be met.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters of one run on the intermittent family
/// T(x) = x(1 + (2x)^alpha) on [0,1/2], 2x - 1 on (1/2,1].
struct MapParams {
  double alpha = 0.75;
  /// Exponent of the weighted norm sup_{x in (0,1]} |x^gamma f(x)|.
  double gamma = 1.0;
  /// Residual tolerance for the left-branch inversion.
  double newton_tol = 1e-13;
  /// Target for the neglected branch-sum tail.
  double branch_tail_tol = 1e-8;
  std::int64_t max_branches = 4'000'000;
  /// Request the L1 statement; needs gamma < 1 in the finite-measure case.
  bool l1_reporting = false;

  /// Violations of the basic invariants (alpha, gamma > 0, positive
  /// tolerances, max_branches >= 1). Empty when valid.
  [[nodiscard]] std::vector<std::string> violations() const;

  /// Violations of the weighted-norm requirement gamma > alpha (and
  /// gamma < 1 when L1 reporting is requested with alpha < 1).
  [[nodiscard]] std::vector<std::string> weight_violations() const;

  /// Throws ConfigError listing violations(); when `require_weight` also
  /// includes weight_violations().
  void validate(bool require_weight = true) const;

  [[nodiscard]] MapParams with_alpha(double a) const {
    MapParams p = *this;
    p.alpha = a;
    return p;
  }
};

/// gamma = alpha + 0.25 for alpha < 0.75 (stays below 1), alpha + 0.1 otherwise.
double default_gamma(double alpha);

}  // namespace lsvr
