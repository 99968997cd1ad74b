#include "lsvr/pullback.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "lsvr/branch_sum.hpp"
#include "lsvr/lsv_map.hpp"
#include "lsvr/quadrature.hpp"

namespace lsvr {
namespace {

// Trapezoid with Gregory end corrections through fifth differences.
double gregory(const Eigen::VectorXd& g, double h) {
  const Eigen::Index n = g.size() - 1;
  double s = g.sum() - 0.5 * (g(0) + g(n));
  constexpr std::array<double, 5> c = {1.0 / 12, 1.0 / 24, 19.0 / 720,
                                       3.0 / 160, 863.0 / 60480};
  // k-th forward difference at 0 and backward difference at n.
  Eigen::VectorXd fwd = g.head(6), bwd = g.tail(6).reverse();
  for (int k = 1; k <= 5; ++k) {
    for (int j = 0; j + k < 6; ++j) {
      fwd(j) = fwd(j + 1) - fwd(j);
      bwd(j) = bwd(j) - bwd(j + 1);
    }
    s -= c[k - 1] * (bwd(0) + (k % 2 == 0 ? 1.0 : -1.0) * fwd(0));
  }
  return h * s;
}

// int_0^a x^{-alpha}(c + d log x) dx with c, d matched to f at a and 2a.
double power_law_head(double a, double fa, double f2a, double alpha) {
  const double la = std::log(a), l2a = std::log(2.0 * a);
  const double ya = fa * std::pow(a, alpha);
  const double y2a = f2a * std::pow(2.0 * a, alpha);
  const double d = (y2a - ya) / (l2a - la);
  const double c = ya - d * la;
  const double r = 1.0 - alpha;
  return std::pow(a, r) * (c / r + d * (la / r - 1.0 / (r * r)));
}

void require_finite_measure(double alpha, const char* what) {
  if (!(alpha < 1.0))
    throw ConfigError(std::string(what) +
                      ": needs alpha < 1 (the invariant measure is infinite)");
}

}  // namespace

EvalGrid EvalGrid::make(int min_exp, int per_octave, int delta_points) {
  if (min_exp < 2 || per_octave < 1 || delta_points < 12)
    throw ConfigError(
        "EvalGrid: need min_exp >= 2, per_octave >= 1, delta_points >= 12");
  // Tag 0: geometric in (0,1/2], 1: uniform on [1/2,1], 2: geometric above 1/2.
  std::vector<std::pair<double, int>> raw;
  const int kmax = min_exp * per_octave;
  for (int k = 0; k <= kmax; ++k)
    raw.emplace_back(std::exp2(-double(k) / per_octave), k >= per_octave ? 0 : 2);
  for (int j = 0; j < delta_points; ++j)
    raw.emplace_back(0.5 + 0.5 * j / (delta_points - 1), 1);
  std::sort(raw.begin(), raw.end());

  EvalGrid g;
  g.min_exp = min_exp;
  g.per_octave = per_octave;
  std::vector<double> pts;
  for (const auto& [x, tag] : raw) {
    if (pts.empty() || x != pts.back()) pts.push_back(x);
    const auto idx = static_cast<Eigen::Index>(pts.size() - 1);
    if (tag == 0) g.geometric.push_back(idx);
    if (tag == 1) g.uniform.push_back(idx);
  }
  g.points = Eigen::Map<const Eigen::VectorXd>(
      pts.data(), static_cast<Eigen::Index>(pts.size()));
  return g;
}

DensityField apply_F(const MapParams& params, const NodalFunction& phi,
                     const EvalGrid& grid, std::int64_t n_branches) {
  const Eigen::Index n = grid.size();
  DensityField out;
  out.kind = FieldKind::pullback_h;
  out.values.resize(n);
  Eigen::VectorXd err = Eigen::VectorXd::Zero(n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.points(i);
    if (x >= kDeltaLeft) {
      out.values(i) = phi.value(x);
      continue;
    }
    const auto c = closed_branch_sum(params, x, n_branches, phi, false);
    out.values(i) = c.value;
    err(i) = std::pow(x, params.gamma) * c.value_err;
  }
  out.error = err.maxCoeff();
  return out;
}

DensityField apply_Q(const MapParams& params, const NodalFunction& phi,
                     const EvalGrid& grid, std::int64_t n_branches) {
  const Eigen::Index n = grid.size();
  DensityField out;
  out.values = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd err = Eigen::VectorXd::Zero(n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.points(i);
    if (x >= kDeltaLeft) continue;
    const auto c = closed_branch_sum(params, x, n_branches, phi, true);
    out.values(i) = c.dalpha;
    err(i) = std::pow(x, params.gamma) * c.dalpha_err;
  }
  out.error = err.maxCoeff();
  return out;
}

DensityField full_response(const MapParams& params, const NodalFunction& hat_h,
                           const NodalFunction& hat_h_star,
                           const EvalGrid& grid, std::int64_t n_branches) {
  const DensityField f = apply_F(params, hat_h_star, grid, n_branches);
  const DensityField q = apply_Q(params, hat_h, grid, n_branches);
  DensityField out;
  out.kind = FieldKind::response_h_star;
  out.values = f.values + q.values;
  out.error = f.error + q.error;
  return out;
}

double grid_integral(const EvalGrid& grid, const Eigen::VectorXd& f,
                     double alpha) {
  require_finite_measure(alpha, "grid_integral");
  Eigen::VectorXd left(grid.geometric.size());
  for (std::size_t k = 0; k < grid.geometric.size(); ++k) {
    const Eigen::Index i = grid.geometric[k];
    left(static_cast<Eigen::Index>(k)) = f(i) * grid.points(i);
  }
  Eigen::VectorXd right(grid.uniform.size());
  for (std::size_t k = 0; k < grid.uniform.size(); ++k)
    right(static_cast<Eigen::Index>(k)) = f(grid.uniform[k]);

  const double h_log = std::log(2.0) / grid.per_octave;
  const double h_lin = 0.5 / static_cast<double>(right.size() - 1);
  const Eigen::Index i0 = grid.geometric.front();
  const Eigen::Index i1 = grid.geometric[grid.per_octave];
  const double head =
      power_law_head(grid.points(i0), f(i0), f(i1), alpha);
  return head + gregory(left, h_log) + gregory(right, h_lin);
}

DensityField normalized_response(const MapParams& params, const EvalGrid& grid,
                                 const DensityField& h,
                                 const DensityField& h_star) {
  require_finite_measure(params.alpha, "normalized_response");
  const double m = grid_integral(grid, h.values, params.alpha);
  const double ms = grid_integral(grid, h_star.values, params.alpha);
  DensityField out;
  out.values = (h_star.values * m - h.values * ms) / (m * m);
  out.integral = grid_integral(grid, out.values, params.alpha);
  return out;
}

WeightedNormValue weighted_norm(const EvalGrid& grid, const Eigen::VectorXd& f,
                                double gamma) {
  WeightedNormValue out;
  out.gamma = gamma;
  out.argmax_point = grid.points(0);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid.points(i);
    const double v = std::abs(std::pow(x, gamma) * f(i));
    if (v > out.value) {
      out.value = v;
      out.argmax_point = x;
    }
  }
  return out;
}

double pullback_mass(const MapParams& params, const NodalFunction& phi,
                     std::int64_t n_branches, int min_exp, bool dalpha) {
  require_finite_measure(params.alpha, "pullback_mass");
  const auto field = [&](double x) {
    const auto c = closed_branch_sum(params, x, n_branches, phi, dalpha);
    return dalpha ? c.dalpha : c.value;
  };
  const GaussRule rule = gauss_legendre(16);
  Eigen::VectorXd panel(min_exp);
#pragma omp parallel for schedule(dynamic)
  for (int k = 1; k <= min_exp; ++k)
    panel(k - 1) = integrate(rule, std::exp2(-k - 1), std::exp2(-k), field);
  const double a = std::exp2(-min_exp - 1);
  double total = power_law_head(a, field(a), field(2.0 * a), params.alpha);
  for (int k = min_exp - 1; k >= 0; --k) total += panel(k);
  if (!dalpha) total += phi.basis().integrate(phi.values());
  return total;
}

double return_time_mass(const MapParams& params, const NodalFunction& phi,
                        std::int64_t head) {
  require_finite_measure(params.alpha, "return_time_mass");
  const CollocationBasis& basis = phi.basis();
  // Taylor data at 1/2 for the running integral over tiny cylinders.
  std::array<double, 4> taylor{};
  Eigen::VectorXd d = phi.values();
  for (int k = 0; k < 4; ++k) {
    taylor[k] = d(0);
    d = basis.diff_matrix() * d;
  }
  const auto running = [&](double w) {
    const double u = 0.5 * w;
    if (w >= 1e-3) return basis.cumulative_row(u).dot(phi.values());
    return u * (taylor[0] + u * (taylor[1] / 2 + u * (taylor[2] / 6 + u * taylor[3] / 24)));
  };

  OrbitState s = OrbitState::start(1.0);
  double sum = 0.0, carry = 0.0;
  for (; s.n < head; s.advance(params)) {
    const double t = running(s.z);
    const double y = sum + t;
    carry += std::abs(sum) >= std::abs(t) ? (sum - y) + t : (t - y) + sum;
    sum = y;
  }
  // Terms decay like c n^{-1/alpha}; fit c at the last term and apply
  // Euler-Maclaurin. The neglected log correction is O(log(head)/head).
  const double p = 1.0 / params.alpha;
  const double t = running(s.z);
  const double n = static_cast<double>(head);
  const double tail = t * (n / (p - 1.0) + 0.5 + p / (12.0 * n));
  return sum + carry + tail;
}

}  // namespace lsvr
