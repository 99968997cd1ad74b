#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lsvr/map_params.hpp"

namespace lsvr {

/// The full map on [0,1]. Templated so it can be evaluated on autodiff
/// scalars; the branch test uses the value part.
template <typename Scalar>
Scalar forward(const Scalar& x, const Scalar& alpha) {
  using std::exp;
  using std::log;
  if (x <= Scalar(0.5)) {
    if (x == Scalar(0)) return x;
    return x * (Scalar(1) + exp(alpha * log(Scalar(2) * x)));
  }
  return Scalar(2) * x - Scalar(1);
}

/// Throws std::domain_error outside [0,1].
double forward(const MapParams& params, double x);

/// Inverse of the left branch x -> x(1 + (2x)^alpha) on [0,1/2].
/// Safeguarded Newton inside the bracket [y/2, min(y,1/2)], falling back to
/// bisection whenever a step leaves the bracket.
double left_inverse(const MapParams& params, double y);
double left_inverse(const MapParams& params, double y, double guess);

/// Running state of one backward orbit z_{n+1} = E^{-1}(z_n), together
/// with the spatial derivative dz = dz_n/dz_0 and the parameter derivatives
/// pz = d z_n / d alpha, pdz = d dz_n / d alpha.
struct OrbitState {
  double z = 1.0;
  double dz = 1.0;
  double pz = 0.0;
  double pdz = 0.0;
  std::int64_t n = 0;

  static OrbitState start(double seed) {
    OrbitState s;
    s.z = seed;
    return s;
  }
  void advance(const MapParams& params);

 private:
  // Compensated running sum of the dz-logarithmic increments; pdz = -dz*sum.
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct BackwardOrbit {
  double seed = 1.0;
  std::vector<double> z, dz, pz, pdz;

  [[nodiscard]] std::int64_t length() const {
    return static_cast<std::int64_t>(z.size());
  }
};

/// Orbit arrays for n = 0..n_max. Requires seed in (0,1] and
/// n_max <= params.max_branches.
BackwardOrbit backward_orbit(const MapParams& params, double seed,
                             std::int64_t n_max);

/// Inverse branch g_w of the induced map for w = 1 0^n, evaluated at x.
struct BranchData {
  std::int64_t n = 0;
  double g = 0.0;    ///< g_w(x) = (z_n + 1)/2
  double dg = 0.0;   ///< g_w'(x)
  double pg = 0.0;   ///< d g_w / d alpha
  double pdg = 0.0;  ///< d g_w' / d alpha
};

inline BranchData branch_of(const OrbitState& s) {
  return {s.n, 0.5 * (s.z + 1.0), 0.5 * s.dz, 0.5 * s.pz, 0.5 * s.pdz};
}

/// Entries n = 0..n_branches-1 from one orbit of x. Requires x in (0,1].
std::vector<BranchData> branch_table(const MapParams& params, double x,
                                     std::int64_t n_branches);

struct Truncation {
  std::int64_t n_branches = 1;
  /// Estimated sum of the neglected terms (raw or after closure).
  double tail_estimate = 0.0;
  /// Calibrated constant of the n^{-1-1/alpha} decay (raw rule only).
  double constant = 0.0;
};

/// Smallest N with C*alpha*N^{-1/alpha} < target_tail, where C bounds
/// x^gamma g_w'(x) n^{1+1/alpha} over probe seeds in [1/2,1]. C is fitted
/// over n in [N_cal/2, N_cal] and inflated by 4. Throws SolverError when
/// N would exceed max_branches.
Truncation choose_truncation(const MapParams& params, double target_tail);

}  // namespace lsvr
