#include "lsvr/induced_operator.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lsvr/branch_sum.hpp"
#include "lsvr/lsv_map.hpp"
#include "lsvr/tail_closure.hpp"

namespace lsvr {
namespace {

// Closure of the remainder beyond s.n as a row acting on node values.
Eigen::RowVectorXd closure_row(const MapParams& params,
                               const CollocationBasis& basis,
                               const OrbitState& s) {
  const auto w = tail_weights<double>(s.z, s.dz, params.alpha);
  const double y = kDeltaLeft + 0.5 * s.z;
  return w.integral * basis.cumulative_row(0.5 * s.z) +
         w.value * basis.cardinal(y).transpose() +
         w.slope * basis.cardinal_derivative(y).transpose();
}

}  // namespace

OperatorMatrix assemble_operator(const MapParams& params,
                                 const CollocationBasis& basis,
                                 std::int64_t n_branches) {
  params.validate(false);
  if (n_branches < 2 || n_branches > params.max_branches)
    throw ConfigError("assemble_operator: n_branches outside [2, max_branches]");
  const int m = basis.degree();
  const std::int64_t half = n_branches / 2;
  OperatorMatrix op;
  op.n_branches = n_branches;
  op.entries.setZero(m, m);
  Eigen::VectorXd change(m);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double ulp =
      64.0 * eps * std::sqrt(static_cast<double>(n_branches));

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < m; ++i) {
    OrbitState s = OrbitState::start(basis.nodes()(i));
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
    Eigen::RowVectorXd at_half;
    double mag = 0.0;
    for (; s.n < n_branches; s.advance(params)) {
      if (s.n == half) at_half = row + closure_row(params, basis, s);
      const BranchData b = branch_of(s);
      row += b.dg * basis.cardinal(b.g).transpose();
      mag += b.dg;
    }
    const Eigen::RowVectorXd tail = closure_row(params, basis, s);
    row += tail;
    op.entries.row(i) = row;
    change(i) = (row - at_half).cwiseAbs().sum() +
                ulp * (mag + tail.cwiseAbs().sum());
  }
  op.tail_bound = change.maxCoeff();
  return op;
}

InvariantDensity invariant_density(const OperatorMatrix& op,
                                   const CollocationBasis& basis) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(op.entries);
  if (es.info() != Eigen::Success)
    throw SolverError("invariant_density: eigensolver failed");
  const Eigen::VectorXcd& lambda = es.eigenvalues();
  Eigen::Index lead = 0;
  for (Eigen::Index k = 1; k < lambda.size(); ++k)
    if (std::abs(lambda(k) - 1.0) < std::abs(lambda(lead) - 1.0)) lead = k;

  InvariantDensity out;
  out.eigenvalue = lambda(lead).real();
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (k != lead)
      out.second_modulus = std::max(out.second_modulus, std::abs(lambda(k)));

  Eigen::VectorXd v = es.eigenvectors().col(lead).real();
  const double mass = basis.quad_weights().dot(v);
  if (mass == 0.0 || !std::isfinite(mass))
    throw SolverError("invariant_density: eigenvector has zero integral");
  v /= mass;
  if ((v.array() <= 0.0).any())
    throw SolverError("invariant_density: eigenvector is not positive");

  out.hat_h.values = v;
  out.hat_h.kind = FieldKind::hat_h;
  out.hat_h.integral = basis.quad_weights().dot(v);
  out.hat_h.error = (op.entries * v - v).cwiseAbs().maxCoeff();
  return out;
}

DensityField response_source(const MapParams& params,
                             const CollocationBasis& basis,
                             const DensityField& hat_h,
                             std::int64_t n_branches) {
  const NodalFunction h(basis, hat_h.values);
  const int m = basis.degree();
  DensityField q;
  q.kind = FieldKind::source_q;
  q.values.resize(m);
  Eigen::VectorXd err(m);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < m; ++i) {
    const auto c = closed_branch_sum(params, basis.nodes()(i), n_branches, h, true);
    q.values(i) = c.dalpha;
    err(i) = c.dalpha_err;
  }
  q.integral = basis.integrate(q.values);
  q.error = err.maxCoeff();
  return q;
}

DensityField solve_response(const OperatorMatrix& op,
                            const CollocationBasis& basis,
                            const DensityField& q) {
  const Eigen::Index m = op.entries.rows();
  Eigen::MatrixXd a(m + 1, m);
  a.topRows(m) = Eigen::MatrixXd::Identity(m, m) - op.entries;
  a.row(m) = basis.quad_weights().transpose();
  Eigen::VectorXd rhs(m + 1);
  rhs << q.values, 0.0;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < m)
    throw SolverError("solve_response: augmented resolvent system is singular");
  DensityField u;
  u.kind = FieldKind::hat_h_star;
  u.values = qr.solve(rhs);
  u.integral = basis.integrate(u.values);
  u.error = (a.topRows(m) * u.values - q.values).cwiseAbs().maxCoeff();
  return u;
}

}  // namespace lsvr
