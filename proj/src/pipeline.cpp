#include "lsvr/pipeline.hpp"

#include <sstream>

#include "lsvr/branch_sum.hpp"

namespace lsvr {

Truncation pipeline_truncation(const MapParams& params) {
  const Truncation t = closure_truncation(params, params.branch_tail_tol);
  if (!(t.tail_estimate < params.branch_tail_tol)) {
    std::ostringstream msg;
    msg << "branch truncation: closure error " << t.tail_estimate
        << " at max_branches = " << params.max_branches
        << " does not meet branch_tail_tol = " << params.branch_tail_tol;
    throw SolverError(msg.str());
  }
  return t;
}

Pipeline run_pipeline(const MapParams& params, const CollocationBasis& basis,
                      const EvalGrid* grid, std::int64_t n_branches) {
  params.validate(false);
  Pipeline p;
  p.params = params;
  if (n_branches > 0) {
    p.n_branches = n_branches;
  } else {
    const Truncation t = pipeline_truncation(params);
    p.n_branches = t.n_branches;
    p.closure_tail = t.tail_estimate;
  }
  p.op = assemble_operator(params, basis, p.n_branches);
  p.inv = invariant_density(p.op, basis);
  p.q = response_source(params, basis, p.inv.hat_h, p.n_branches);
  p.hat_h_star = solve_response(p.op, basis, p.q);
  if (grid != nullptr) {
    const NodalFunction h(basis, p.inv.hat_h.values);
    const NodalFunction hs(basis, p.hat_h_star.values);
    p.h = apply_F(params, h, *grid, p.n_branches);
    p.h_star = full_response(params, h, hs, *grid, p.n_branches);
  }
  return p;
}

}  // namespace lsvr
