#include "lsvr/branch_sum.hpp"

namespace lsvr {

Truncation closure_truncation(const MapParams& params, double target) {
  if (!(target > 0.0))
    throw std::invalid_argument("closure_truncation: target must be > 0");
  Truncation t;
  for (std::int64_t n = 256;; n *= 2) {
    const std::int64_t capped = std::min(n, params.max_branches);
    double err = 0.0;
    for (double seed : {0.5, 1.0}) {
      const auto c =
          closed_branch_sum(params, seed, capped, ConstantField{}, true);
      err = std::max({err, c.value_err, c.dalpha_err});
    }
    t.n_branches = capped;
    t.tail_estimate = err;
    if (err < target || capped == params.max_branches) return t;
  }
}

}  // namespace lsvr
