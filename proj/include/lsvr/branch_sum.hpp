#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "lsvr/collocation.hpp"
#include "lsvr/lsv_map.hpp"
#include "lsvr/tail_closure.hpp"

namespace lsvr {

/// A branch sum  sum_n Phi(g_n(x)) g_n'(x)  and its alpha-derivative
///   sum_n Phi'(g_n) a_n g_n' + Phi(g_n) b_n,
/// with the remainder beyond N closed analytically.
struct ClosedSum {
  double value = 0.0;
  double dalpha = 0.0;
  /// |closed(N) - closed(N/2)| plus a rounding allowance that grows with N.
  double value_err = 0.0;
  double dalpha_err = 0.0;
};

/// Phi(y) = c on [1/2,1].
struct ConstantField {
  double c = 1.0;
  [[nodiscard]] double value(double) const { return c; }
  [[nodiscard]] double first(double) const { return 0.0; }
  [[nodiscard]] NodalFunction::Probe probe(double offset) const {
    return {c, 0.0, 0.0, c * offset};
  }
};

namespace detail {

template <typename Field>
void closed_remainder(const MapParams& params, const OrbitState& s,
                      const Field& phi, bool with_alpha, double& tail,
                      double& dtail) {
  const auto p = phi.probe(0.5 * s.z);
  if (!with_alpha) {
    const auto w = tail_weights<double>(s.z, s.dz, params.alpha);
    tail = w.integral * p.integral + w.value * p.value + w.slope * p.first;
    dtail = 0.0;
    return;
  }
  const auto t =
      tail_weights_and_derivative(s.z, s.dz, s.pz, s.pdz, params.alpha);
  tail = t.w.integral * p.integral + t.w.value * p.value + t.w.slope * p.first;
  dtail = t.dw.integral * p.integral + t.dw.value * p.value +
          t.dw.slope * p.first +
          0.5 * s.pz *
              (t.w.integral * p.value + t.w.value * p.first +
               t.w.slope * p.second);
}

}  // namespace detail

/// Explicit terms n < n_branches from the orbit of `seed`, then the closed
/// remainder. The error estimate compares against the closure at N/2.
template <typename Field>
ClosedSum closed_branch_sum(const MapParams& params, double seed,
                            std::int64_t n_branches, const Field& phi,
                            bool with_alpha) {
  const std::int64_t half = n_branches / 2;
  OrbitState s = OrbitState::start(seed);
  double head = 0.0, dhead = 0.0, mag = 0.0, dmag = 0.0;
  double at_half = 0.0, dat_half = 0.0;
  ClosedSum out;
  for (;;) {
    if (s.n == half || s.n == n_branches) {
      double tail = 0.0, dtail = 0.0;
      detail::closed_remainder(params, s, phi, with_alpha, tail, dtail);
      if (s.n == n_branches) {
        mag += std::abs(tail);
        dmag += std::abs(dtail);
        out.value = head + tail;
        out.dalpha = dhead + dtail;
        break;
      }
      at_half = head + tail;
      dat_half = dhead + dtail;
    }
    const BranchData b = branch_of(s);
    const double v = phi.value(b.g);
    head += v * b.dg;
    mag += std::abs(v * b.dg);
    if (with_alpha) {
      const double d = phi.first(b.g) * b.pg * b.dg + v * b.pdg;
      dhead += d;
      dmag += std::abs(d);
    }
    s.advance(params);
  }
  // Orbit roundoff grows like a random walk in the number of steps.
  const double ulp = 64.0 * std::numeric_limits<double>::epsilon() *
                     std::sqrt(static_cast<double>(std::max<std::int64_t>(n_branches, 1)));
  out.value_err = std::abs(out.value - at_half) + ulp * mag;
  out.dalpha_err =
      with_alpha ? std::abs(out.dalpha - dat_half) + ulp * dmag : 0.0;
  return out;
}

/// Branch count for closed sums: the smallest power of two N >= 256 whose
/// closure error (value and alpha-derivative, seeds 1/2 and 1, Phi = 1) is
/// below `target`, capped at max_branches. `tail_estimate` is that error.
Truncation closure_truncation(const MapParams& params, double target);

}  // namespace lsvr
