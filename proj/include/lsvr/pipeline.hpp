#pragma once

#include <cstdint>

#include "lsvr/collocation.hpp"
#include "lsvr/density_field.hpp"
#include "lsvr/induced_operator.hpp"
#include "lsvr/lsv_map.hpp"
#include "lsvr/map_params.hpp"
#include "lsvr/pullback.hpp"

namespace lsvr {

/// Everything computed for one parameter value.
struct Pipeline {
  MapParams params;
  std::int64_t n_branches = 0;
  /// Closure error estimate behind n_branches (seeds 1/2 and 1).
  double closure_tail = 0.0;
  OperatorMatrix op;
  InvariantDensity inv;
  DensityField q;           ///< nodes
  DensityField hat_h_star;  ///< nodes
  DensityField h;           ///< grid, empty without a grid
  DensityField h_star;      ///< grid, empty without a grid
};

/// Runs truncation, assembly, eigensolve, source, resolvent and (with a
/// grid) the pullback. n_branches = 0 picks the count from
/// closure_truncation(params, params.branch_tail_tol) and throws
/// SolverError if that target cannot be met within max_branches.
Pipeline run_pipeline(const MapParams& params, const CollocationBasis& basis,
                      const EvalGrid* grid, std::int64_t n_branches = 0);

/// Branch count used by run_pipeline when none is given.
Truncation pipeline_truncation(const MapParams& params);

}  // namespace lsvr
