#include "lsvr/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/SparseCore>

#include "lsvr/lsv_map.hpp"
#include "lsvr/pipeline.hpp"
#include "lsvr/quadrature.hpp"

namespace lsvr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool decreasing_with_order(const std::vector<double>& norms,
                           const std::vector<double>& eps) {
  if (norms.size() < 2) return false;
  for (std::size_t k = 0; k + 1 < norms.size(); ++k)
    if (!(norms[k + 1] < norms[k])) return false;
  for (double p : observed_orders(norms, eps))
    if (!(p >= 0.5)) return false;
  return true;
}

Pipeline run_at(const MapParams& params, double alpha,
                const CollocationBasis& basis, const EvalGrid& grid) {
  try {
    return run_pipeline(params.with_alpha(alpha), basis, &grid);
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "fd_response_check: pipeline at alpha = " << alpha
        << " failed: " << e.what();
    throw SolverError(msg.str());
  }
}

}  // namespace

std::vector<double> observed_orders(const std::vector<double>& norms,
                                    const std::vector<double>& eps) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < norms.size() && k + 1 < eps.size(); ++k)
    out.push_back(std::log(norms[k] / norms[k + 1]) /
                  std::log(eps[k] / eps[k + 1]));
  return out;
}

bool FdReport::converging() const {
  return decreasing_with_order(norms, eps_list);
}

bool FdReport::induced_converging() const {
  return decreasing_with_order(induced_norms, eps_list);
}

FdReport fd_response_check(const MapParams& params,
                           const std::vector<double>& eps_list,
                           const CollocationBasis& basis, const EvalGrid& grid,
                           bool zero_response) {
  if (eps_list.empty()) throw ConfigError("fd_response_check: empty eps list");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0))
      throw ConfigError("fd_response_check: eps must be positive");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw ConfigError("fd_response_check: eps list must be strictly decreasing");
  }
  const double a = params.alpha;
  const double g = params.gamma;
  const Pipeline base = run_at(params, a, basis, grid);

  FdReport r;
  r.eps_list = eps_list;
  r.zero_response = zero_response;
  const Eigen::VectorXd h_star =
      zero_response ? Eigen::VectorXd::Zero(grid.size()) : base.h_star.values;
  const Eigen::VectorXd hat_h_star =
      zero_response ? Eigen::VectorXd::Zero(basis.degree())
                    : base.hat_h_star.values;
  r.response_norm = weighted_norm(grid, base.h_star.values, g).value;
  r.induced_response_norm = base.hat_h_star.values.cwiseAbs().maxCoeff();

  for (double e : eps_list) {
    const Pipeline plus = run_at(params, a + e, basis, grid);
    r.norms.push_back(
        weighted_norm(grid, (plus.h.values - base.h.values) / e - h_star, g).value);
    r.induced_norms.push_back(
        ((plus.inv.hat_h.values - base.inv.hat_h.values) / e - hat_h_star)
            .cwiseAbs()
            .maxCoeff());
    if (a - e > 0.0) {
      const Pipeline minus = run_at(params, a - e, basis, grid);
      r.minus_norms.push_back(
          weighted_norm(grid, (base.h.values - minus.h.values) / e - h_star, g).value);
      r.central_norms.push_back(
          weighted_norm(grid,
                        (plus.h.values - minus.h.values) / (2.0 * e) - h_star, g)
              .value);
    } else {
      r.minus_norms.push_back(kNaN);
      r.central_norms.push_back(kNaN);
    }
  }
  for (std::size_t k = 0; k + 1 < r.norms.size(); ++k)
    r.ratios.push_back(r.norms[k] / r.norms[k + 1]);
  return r;
}

UlamDensity ulam_induced_density(const MapParams& params, int bins,
                                 std::int64_t n_branches) {
  params.validate(false);
  if (bins < 2 || (bins & (bins - 1)) != 0)
    throw ConfigError("ulam_induced_density: bins must be a power of two >= 2");
  if (n_branches < 1 || n_branches > params.max_branches)
    throw ConfigError("ulam_induced_density: n_branches outside [1, max_branches]");

  const int nb = bins;
  const double width = 0.5 / nb;
  const auto left_cell = [&](double y) {
    return std::clamp(static_cast<int>(std::floor((y - kDeltaLeft) / width)), 0,
                      nb - 1);
  };
  const auto right_cell = [&](double y) {
    return std::clamp(static_cast<int>(std::ceil((y - kDeltaLeft) / width)) - 1,
                      0, nb - 1);
  };

  std::vector<OrbitState> seeds(nb + 1);
  for (int k = 0; k <= nb; ++k)
    seeds[k] = OrbitState::start(k == nb ? kDeltaRight : kDeltaLeft + k * width);

  std::vector<Eigen::Triplet<double>> triplets;
  std::map<int, Eigen::VectorXd> dense;
  Eigen::VectorXd image(nb + 1), last(nb);
  for (std::int64_t n = 0; n < n_branches; ++n) {
    for (int k = 0; k <= nb; ++k) image(k) = 0.5 * (1.0 + seeds[k].z);
    last = image.tail(nb) - image.head(nb);
    const int j0 = left_cell(image(0)), j1 = right_cell(image(nb));
    if (j0 == j1) {
      // Whole cylinder inside one cell.
      auto it = dense.try_emplace(j0, Eigen::VectorXd::Zero(nb)).first;
      it->second += last / width;
    } else {
      for (int k = 0; k < nb; ++k) {
        const double a = image(k), b = image(k + 1);
        for (int j = left_cell(a); j <= right_cell(b); ++j) {
          const double lo = std::max(a, kDeltaLeft + j * width);
          const double hi = std::min(b, kDeltaLeft + (j + 1) * width);
          if (hi > lo) triplets.emplace_back(j, k, (hi - lo) / width);
        }
      }
    }
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= nb; ++k) seeds[k].advance(params);
  }
  // Cylinders n >= n_branches fill [1/2, (1 + z_N(1))/2].
  const double rest = 0.5 * seeds[nb].z;
  if (rest > width)
    throw ConfigError("ulam_induced_density: n_branches too small for the bin count");
  {
    auto it = dense.try_emplace(0, Eigen::VectorXd::Zero(nb)).first;
    it->second += (rest / last.sum()) * last / width;
  }
  for (const auto& [j, row] : dense)
    for (int k = 0; k < nb; ++k)
      if (row(k) != 0.0) triplets.emplace_back(j, k, row(k));

  Eigen::SparseMatrix<double, Eigen::RowMajor> p(nb, nb);
  p.setFromTriplets(triplets.begin(), triplets.end());

  UlamDensity out;
  out.bins = nb;
  out.n_branches = n_branches;
  out.row_sum_defect =
      ((p * Eigen::VectorXd::Ones(nb)).array() - 1.0).abs().maxCoeff();

  const Eigen::SparseMatrix<double, Eigen::RowMajor> pt = p.transpose();
  Eigen::VectorXd mass = Eigen::VectorXd::Constant(nb, 1.0 / nb);
  for (out.iterations = 1;; ++out.iterations) {
    Eigen::VectorXd next = pt * mass;
    next /= next.sum();
    const double change = (next - mass).cwiseAbs().sum();
    mass = std::move(next);
    if (change < 1e-15) break;
    if (out.iterations >= 10000)
      throw SolverError("ulam_induced_density: power iteration did not converge");
  }
  out.values = mass / width;
  return out;
}

double ulam_l1_distance(const UlamDensity& ulam, const CollocationBasis& basis,
                        const Eigen::VectorXd& hat_h) {
  const GaussRule rule = gauss_legendre(8);
  const double width = 0.5 / ulam.bins;
  double total = 0.0;
  for (int j = 0; j < ulam.bins; ++j) {
    const double lo = kDeltaLeft + j * width;
    const double u = ulam.values(j);
    total += integrate(rule, lo, lo + width, [&](double x) {
      return std::abs(u - basis.interpolate(hat_h, x));
    });
  }
  return total;
}

std::vector<std::string> DiagnosticsReport::violations() const {
  std::vector<std::string> out;
  for (const auto& c : conditions)
    if (c.violated) out.push_back(c.name);
  return out;
}

DiagnosticsReport assumption_diagnostics(const MapParams& params,
                                         std::int64_t n_probe) {
  params.validate(false);
  if (n_probe < 16 || n_probe % 4 != 0 || n_probe > params.max_branches)
    throw ConfigError(
        "assumption_diagnostics: n_probe must be a multiple of 4 in [16, max_branches]");
  const std::int64_t nn = n_probe;
  const double gamma = params.gamma;

  // Per-branch sups over the probe points.
  enum Field { a1, a2, a3_1, a3_2, a4, a4_0, a4_w, a5, n_fields };
  std::vector<Eigen::VectorXd> sup(n_fields, Eigen::VectorXd::Zero(nn));

  constexpr int n_delta = 33;
  constexpr double h = 1e-6;
  for (int j = 0; j < n_delta; ++j) {
    const double x = kDeltaLeft + (j + 0.5) / (2.0 * n_delta);
    OrbitState s = OrbitState::start(x);
    OrbitState lo = OrbitState::start(x - h), hi = OrbitState::start(x + h);
    for (std::int64_t n = 0; n < nn; ++n) {
      const BranchData b = branch_of(s), bl = branch_of(lo), bh = branch_of(hi);
      sup[a1](n) = std::max(sup[a1](n), b.dg);
      sup[a2](n) = std::max(sup[a2](n), std::abs((bh.dg - bl.dg) / (2 * h) / b.dg));
      sup[a3_1](n) = std::max(sup[a3_1](n), std::abs(b.pdg));
      sup[a3_2](n) = std::max(sup[a3_2](n), std::abs((bh.pdg - bl.pdg) / (2 * h)));
      s.advance(params);
      lo.advance(params);
      hi.advance(params);
    }
  }
  for (int k = 0; k <= 256; ++k) {
    const double x = std::exp2(-k / 4.0);
    const double w = std::pow(x, gamma);
    OrbitState s = OrbitState::start(x);
    for (std::int64_t n = 0; n < nn; ++n) {
      const BranchData b = branch_of(s);
      sup[a4](n) = std::max(sup[a4](n), b.dg);
      sup[a4_0](n) = std::max(sup[a4_0](n), std::abs(b.pg));
      sup[a4_w](n) = std::max(sup[a4_w](n), w * b.dg);
      sup[a5](n) = std::max(sup[a5](n), w * std::abs(b.pdg));
      s.advance(params);
    }
  }

  struct Condition {
    Field field;
    const char* name;
    const char* description;
    bool summable;
    int log_power;  // (log n)^k factor of the terms at the sup point
  };
  const Condition table[] = {
      {a1, "(a1)", "sum_n sup_Delta |g_n'|", true, 0},
      {a2, "(a2)", "sup_n sup_Delta |g_n''/g_n'| (finite differences of g')", false, 0},
      {a3_1, "(a3) i=1", "sum_n sup_Delta |d_alpha g_n'|", true, 2},
      {a3_2, "(a3) i=2", "sum_n sup_Delta |d_alpha g_n''| (finite differences)", true, 2},
      {a4, "(a4)", "sup_n sup_(0,1] |g_n'|", false, 0},
      {a4_0, "(a4.0)", "sup_n sup_(0,1] |d_alpha g_n|", false, 0},
      {a4_w, "(a4')", "sum_n ||g_n'||_B", true, 0},
      {a5, "(a5)", "sum_n ||d_alpha g_n'||_B", true, 1},
  };

  DiagnosticsReport rep;
  rep.alpha = params.alpha;
  rep.gamma = gamma;
  rep.n_probe = nn;
  const std::int64_t marks[] = {nn / 4, nn / 2, nn};
  for (const Condition& sp : table) {
    ConditionReport c;
    c.name = sp.name;
    c.description = sp.description;
    c.summable = sp.summable;
    const Eigen::VectorXd& t = sup[sp.field];
    for (std::int64_t m : marks) {
      c.n.push_back(m);
      c.values.push_back(sp.summable ? t.head(m).sum() : t.head(m).maxCoeff());
    }
    if (sp.summable) {
      const double d1 = c.values[1] - c.values[0];
      const double d2 = c.values[2] - c.values[1];
      c.cauchy_ratio = d1 > 0.0 ? d2 / d1 : 0.0;
      c.decay_exponent =
          d2 > 0.0 ? 1.0 - std::log2(c.cauchy_ratio) +
                         sp.log_power * std::log2(std::log(double(nn)) /
                                                  std::log(double(nn / 2)))
                   : std::numeric_limits<double>::infinity();
      // Exponents within 0.02 of 1 cannot be told from divergence at
      // this probe depth.
      c.violated = !(c.decay_exponent > 1.02);
    } else {
      c.cauchy_ratio = c.values[1] > 0.0 ? c.values[2] / c.values[1] : 1.0;
      c.decay_exponent = kNaN;
      c.violated = !(c.cauchy_ratio <= 1.01);
    }
    rep.conditions.push_back(std::move(c));
  }
  return rep;
}

}  // namespace lsvr
