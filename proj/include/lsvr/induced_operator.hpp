#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lsvr/collocation.hpp"
#include "lsvr/density_field.hpp"
#include "lsvr/map_params.hpp"

namespace lsvr {

/// Collocation matrix of the induced transfer operator
///   (L Phi)(x) = sum_n Phi(g_n(x)) g_n'(x)
/// acting on node values: (L v)_i = entries.row(i).dot(v).
struct OperatorMatrix {
  Eigen::MatrixXd entries;
  std::int64_t n_branches = 0;
  /// Max row l1-norm of the change between the closures at N/2 and N.
  double tail_bound = 0.0;
};

/// Explicit branches n < n_branches, remainder closed analytically.
OperatorMatrix assemble_operator(const MapParams& params,
                                 const CollocationBasis& basis,
                                 std::int64_t n_branches);

struct InvariantDensity {
  DensityField hat_h;  ///< kind hat_h; error = sup-at-nodes |L h - h|
  double eigenvalue = 0.0;
  /// Second largest eigenvalue modulus (spectral gap witness).
  double second_modulus = 0.0;
};

/// Eigenvector for the eigenvalue nearest 1, normalized to unit integral.
/// Throws SolverError if it is not of one sign or the eigensolve fails.
InvariantDensity invariant_density(const OperatorMatrix& op,
                                   const CollocationBasis& basis);

/// q = d/dalpha (L_alpha hat_h) at the nodes, branch by branch:
///   sum_n hat_h'(g_n) a_n g_n' + hat_h(g_n) b_n.
/// error is the sup of the closure error estimates.
DensityField response_source(const MapParams& params,
                             const CollocationBasis& basis,
                             const DensityField& hat_h,
                             std::int64_t n_branches);

/// Solves (I - L) u = q with int u = 0 as the (M+1) x M least-squares
/// problem [(I - L); w^T] u = [q; 0]. error = sup |(I - L) u - q|.
DensityField solve_response(const OperatorMatrix& op,
                            const CollocationBasis& basis,
                            const DensityField& q);

}  // namespace lsvr
