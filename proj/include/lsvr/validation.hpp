#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsvr/collocation.hpp"
#include "lsvr/map_params.hpp"
#include "lsvr/pullback.hpp"

namespace lsvr {

/// Difference-quotient deviations from the computed response, per step.
struct FdReport {
  std::vector<double> eps_list;
  /// ||(h_eps - h)/eps - h*||_B (grid-sup).
  std::vector<double> norms;
  /// norms[k] / norms[k+1].
  std::vector<double> ratios;
  /// ||(h - h_{-eps})/eps - h*||_B; NaN where alpha - eps <= 0.
  std::vector<double> minus_norms;
  /// ||(h_eps - h_{-eps})/(2 eps) - h*||_B; NaN where alpha - eps <= 0.
  std::vector<double> central_norms;
  /// sup-at-nodes |(hat_h_eps - hat_h)/eps - hat_h*|.
  std::vector<double> induced_norms;
  double response_norm = 0.0;  ///< ||h*||_B
  double induced_response_norm = 0.0;  ///< sup-at-nodes |hat_h*|
  bool zero_response = false;  ///< h* and hat_h* replaced by 0

  /// Strictly decreasing with an observed order of at least 1/2 at every
  /// step, i.e. consistent with convergence to 0.
  [[nodiscard]] bool converging() const;
  [[nodiscard]] bool induced_converging() const;
};

/// Observed order log(n_k/n_{k+1}) / log(eps_k/eps_{k+1}) per step.
std::vector<double> observed_orders(const std::vector<double>& norms,
                                    const std::vector<double>& eps);

/// Runs the pipeline at alpha and at alpha +- eps (fresh assembly each),
/// and compares difference quotients with the response at alpha.
/// `zero_response` is the negative control. Throws SolverError naming the
/// failing parameter if a pipeline fails.
FdReport fd_response_check(const MapParams& params,
                           const std::vector<double>& eps_list,
                           const CollocationBasis& basis, const EvalGrid& grid,
                           bool zero_response = false);

struct UlamDensity {
  int bins = 0;
  /// Density value per cell of [1/2,1].
  Eigen::VectorXd values;
  double l1_distance_to_spectral = 0.0;
  /// max_j |row sum_j - 1| of the transition matrix.
  double row_sum_defect = 0.0;
  std::int64_t n_branches = 0;
  int iterations = 0;
};

/// Ulam discretization of the induced map: exact cell-preimage measures
/// branch by branch for n < n_branches, the remaining cylinders (inside the
/// first cell) distributed like the last explicit one. Stationary vector
/// by power iteration. l1_distance_to_spectral is left at 0; see
/// ulam_l1_distance.
UlamDensity ulam_induced_density(const MapParams& params, int bins,
                                 std::int64_t n_branches = 4096);

/// int_Delta |u - hat_h| with hat_h interpolated from node values.
double ulam_l1_distance(const UlamDensity& ulam, const CollocationBasis& basis,
                        const Eigen::VectorXd& hat_h);

/// One summability or boundedness condition, probed at n = N/4, N/2, N.
struct ConditionReport {
  std::string name;         ///< e.g. "(a4')"
  std::string description;
  bool summable = true;     ///< sum condition (else sup condition)
  std::vector<std::int64_t> n;
  /// Partial sums (summable) or running sups over n' < n.
  std::vector<double> values;
  /// (S(N) - S(N/2)) / (S(N/2) - S(N/4)); sup conditions: S(N)/S(N/2).
  double cauchy_ratio = 0.0;
  /// Decay exponent of the terms after removing the expected log factor.
  /// NaN for sup conditions.
  double decay_exponent = 0.0;
  bool violated = false;
};

struct DiagnosticsReport {
  double alpha = 0.0;
  double gamma = 0.0;
  std::int64_t n_probe = 0;
  std::vector<ConditionReport> conditions;

  [[nodiscard]] std::vector<std::string> violations() const;
};

/// Empirical check of the summability and distortion assumptions on a probe
/// grid (33 points of [1/2,1] and 2^{-k/4} for k <= 256). Never throws for
/// divergence; violations are reported. n_probe must be a multiple of 4 and
/// at most max_branches.
DiagnosticsReport assumption_diagnostics(const MapParams& params,
                                         std::int64_t n_probe = 4096);

}  // namespace lsvr
