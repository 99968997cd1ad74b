#include "lsvr/lsv_map.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace lsvr {

double forward(const MapParams& params, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("forward: x outside [0,1]: " + std::to_string(x));
  return forward<double>(x, params.alpha);
}

double left_inverse(const MapParams& params, double y) {
  if (y >= 0.0 && y <= 1.0)
    return left_inverse(params, y, y / (1.0 + std::pow(2.0 * y, params.alpha)));
  return left_inverse(params, y, 0.0);
}

double left_inverse(const MapParams& params, double y, double guess) {
  if (!(y >= 0.0 && y <= 1.0))
    throw std::domain_error("left_inverse: y outside [0,1]: " +
                            std::to_string(y));
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 0.5;

  const double a = params.alpha;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double lo = 0.5 * y;
  double hi = std::min(y, 0.5);
  double x = std::clamp(guess, lo, hi);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const double u = std::pow(2.0 * x, a);
    const double r = x * (1.0 + u) - y;
    if (r == 0.0) {
      converged = true;
      break;
    }
    (r > 0.0 ? hi : lo) = x;
    double next = x - r / (1.0 + (a + 1.0) * u);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 2.0 * eps * x || hi - lo <= 2.0 * eps * hi) {
      converged = true;
      break;
    }
  }
  const double resid = std::abs(x * (1.0 + std::pow(2.0 * x, a)) - y);
  if (!converged || resid > params.newton_tol)
    throw SolverError("left_inverse: no convergence for y=" +
                      std::to_string(y) + " alpha=" + std::to_string(a) +
                      " (residual " + std::to_string(resid) + ")");
  return x;
}

void OrbitState::advance(const MapParams& params) {
  const double a = params.alpha;
  const double y = left_inverse(params, z, z / (1.0 + std::pow(2.0 * z, a)));
  const double u = std::pow(2.0 * y, a);  // 2^a y^a
  const double l = std::log(2.0 * y);
  const double denom = 1.0 + (a + 1.0) * u;

  z = y;
  dz /= denom;
  pz = (pz - u * y * l) / denom;

  // Neumaier summation of the increments of -pdz/dz.
  const double term =
      (u + (a + 1.0) * u * l + a * (a + 1.0) * (u / y) * pz) / denom;
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term))
    carry_ += (sum_ - t) + term;
  else
    carry_ += (term - t) + sum_;
  sum_ = t;
  pdz = -dz * (sum_ + carry_);
  ++n;
}

BackwardOrbit backward_orbit(const MapParams& params, double seed,
                             std::int64_t n_max) {
  if (!(seed > 0.0 && seed <= 1.0))
    throw std::domain_error("backward_orbit: seed outside (0,1]");
  if (n_max < 0 || n_max > params.max_branches)
    throw std::invalid_argument("backward_orbit: n_max exceeds max_branches");

  BackwardOrbit orbit;
  orbit.seed = seed;
  const auto len = static_cast<std::size_t>(n_max + 1);
  orbit.z.reserve(len);
  orbit.dz.reserve(len);
  orbit.pz.reserve(len);
  orbit.pdz.reserve(len);
  OrbitState s = OrbitState::start(seed);
  for (std::int64_t n = 0;; ++n) {
    orbit.z.push_back(s.z);
    orbit.dz.push_back(s.dz);
    orbit.pz.push_back(s.pz);
    orbit.pdz.push_back(s.pdz);
    if (n == n_max) break;
    s.advance(params);
  }
  return orbit;
}

std::vector<BranchData> branch_table(const MapParams& params, double x,
                                     std::int64_t n_branches) {
  if (!(x > 0.0 && x <= 1.0))
    throw std::domain_error("branch_table: x outside (0,1]");
  if (n_branches < 1 || n_branches > params.max_branches)
    throw std::invalid_argument("branch_table: bad branch count");
  std::vector<BranchData> out;
  out.reserve(static_cast<std::size_t>(n_branches));
  OrbitState s = OrbitState::start(x);
  for (std::int64_t n = 0; n < n_branches; ++n) {
    if (n > 0) s.advance(params);
    out.push_back(branch_of(s));
  }
  return out;
}

Truncation choose_truncation(const MapParams& params, double target_tail) {
  if (!(target_tail > 0.0))
    throw std::invalid_argument("choose_truncation: target must be > 0");
  constexpr std::int64_t n_cal = 4096;
  constexpr double probes[] = {0.5, 0.625, 0.75, 0.875, 1.0};
  const double a = params.alpha;
  const double expo = 1.0 + 1.0 / a;

  double c = 0.0;
  for (double x : probes) {
    OrbitState s = OrbitState::start(x);
    const double w = std::pow(x, params.gamma);
    while (s.n < n_cal) {
      s.advance(params);
      if (s.n >= n_cal / 2)
        c = std::max(c, w * 0.5 * s.dz *
                            std::pow(static_cast<double>(s.n), expo));
    }
  }
  c *= 4.0;

  Truncation t;
  t.constant = c;
  const double n_real = std::pow(c * a / target_tail, a);
  if (!(n_real < static_cast<double>(params.max_branches))) {
    throw SolverError("choose_truncation: max_branches=" +
                      std::to_string(params.max_branches) +
                      " cannot reach tail target " +
                      std::to_string(target_tail) + " (needs ~" +
                      std::to_string(n_real) + ")");
  }
  t.n_branches = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(n_real)));
  t.tail_estimate =
      c * a * std::pow(static_cast<double>(t.n_branches), -1.0 / a);
  return t;
}

}  // namespace lsvr
