#include <doctest.h>

#include <cmath>
#include <random>

#include "lsvr/branch_sum.hpp"
#include "lsvr/pipeline.hpp"
#include "lsvr/pullback.hpp"

using namespace lsvr;

namespace {

MapParams params_for(double alpha, double gamma = 0.0) {
  MapParams p;
  p.alpha = alpha;
  p.gamma = gamma > 0.0 ? gamma : default_gamma(alpha);
  return p;
}

Eigen::VectorXd random_poly(const CollocationBasis& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd c(8);
  for (auto& ck : c) ck = u(rng);
  c(0) += 3.0;
  Eigen::VectorXd v(b.degree());
  for (int j = 0; j < b.degree(); ++j) {
    const double t = 4.0 * b.nodes()(j) - 3.0;
    double s = 0.0;
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) s = s * t + c(k);
    v(j) = s;
  }
  return v;
}

}  // namespace

TEST_CASE("evaluation grid") {
  const auto g = EvalGrid::make();
  CHECK(g.size() == 321 + 65 - 2);
  CHECK(g.points(0) == std::exp2(-40.0));
  CHECK(g.points(g.size() - 1) == 1.0);
  for (Eigen::Index i = 1; i < g.size(); ++i) CHECK(g.points(i) > g.points(i - 1));
  CHECK(g.geometric.size() == 313);
  CHECK(g.points(g.geometric.back()) == 0.5);
  CHECK(g.uniform.size() == 65);
  CHECK(g.points(g.uniform.front()) == 0.5);
  CHECK_THROWS_AS(EvalGrid::make(1), ConfigError);
  CHECK_THROWS_AS(EvalGrid::make(40, 8, 5), ConfigError);
}

TEST_CASE("weighted norm") {
  const auto g = EvalGrid::make(20, 4, 17);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(g.size());
  CHECK(weighted_norm(g, zero, 0.8).value == 0.0);
  const Eigen::VectorXd flat = g.points.array().pow(-0.8);
  CHECK(weighted_norm(g, flat, 0.8).value == doctest::Approx(1.0).epsilon(1e-14));
  const auto one = weighted_norm(g, Eigen::VectorXd::Ones(g.size()), 0.8);
  CHECK(one.value == 1.0);
  CHECK(one.argmax_point == 1.0);
}

TEST_CASE("grid integral") {
  const auto g = EvalGrid::make();
  for (double a : {0.25, 0.5, 0.9}) {
    // x^{-a}(1 + log x) + x^2 on (0,1].
    const Eigen::VectorXd f =
        g.points.array().pow(-a) * (1.0 + g.points.array().log()) +
        g.points.array().square();
    const double exact = 1.0 / (1 - a) - 1.0 / ((1 - a) * (1 - a)) + 1.0 / 3;
    CHECK(std::abs(grid_integral(g, f, a) - exact) < 1e-7);
    // Pure power laws are integrated almost exactly.
    const Eigen::VectorXd pure = g.points.array().pow(-a);
    CHECK(std::abs(grid_integral(g, pure, a) - 1.0 / (1 - a)) < 1e-10);
  }
  CHECK_THROWS_AS(grid_integral(g, Eigen::VectorXd::Ones(g.size()), 1.0),
                  ConfigError);
}

TEST_CASE("pullback structure") {
  const CollocationBasis basis(48);
  const auto grid = EvalGrid::make();
  for (double a : {0.5, 1.25}) {
    const auto p = params_for(a);
    const auto run = run_pipeline(p, basis, &grid);
    const Eigen::VectorXd& hh = run.inv.hat_h.values;
    const NodalFunction H(basis, hh);
    const auto q = apply_Q(p, H, grid, run.n_branches);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double x = grid.points(i);
      if (x < 0.5) continue;
      CHECK(run.h.values(i) == H.value(x));
      CHECK(q.values(i) == 0.0);
      CHECK(run.h_star.values(i) ==
            doctest::Approx(basis.interpolate(run.hat_h_star.values, x)).epsilon(1e-14));
    }
    // Both h and h* are continuous across 1/2.
    const double x = 0.5 - 1e-9;
    const auto c = closed_branch_sum(p, x, run.n_branches, H, true);
    CHECK(c.value == doctest::Approx(hh(0)).epsilon(1e-7));
    const NodalFunction HS(basis, run.hat_h_star.values);
    const auto cs = closed_branch_sum(p, x, run.n_branches, HS, false);
    CHECK(cs.value + c.dalpha ==
          doctest::Approx(run.hat_h_star.values(0)).epsilon(1e-7));

    // x^alpha h(x) flattens toward 0.
    double prev_step = 1.0;
    for (int k = 4; k >= 1; --k) {
      const Eigen::Index i = grid.geometric[static_cast<std::size_t>(8 * 8 * (k - 1))];
      const Eigen::Index j = grid.geometric[static_cast<std::size_t>(8 * 8 * k)];
      const double s = std::abs(std::pow(grid.points(i), a) * run.h.values(i) -
                                std::pow(grid.points(j), a) * run.h.values(j));
      CHECK(s < prev_step);
      prev_step = s;
    }
    CHECK(std::pow(grid.points(0), a) * run.h.values(0) > 0.1);
  }
}

TEST_CASE("Q is the parameter derivative of F") {
  const CollocationBasis basis(48);
  const auto grid = EvalGrid::make(30, 4, 17);
  const auto p = params_for(0.75);
  const auto run = run_pipeline(p, basis, nullptr);
  const NodalFunction H(basis, run.inv.hat_h.values);
  const auto f0 = apply_F(p, H, grid, run.n_branches);
  const auto q = apply_Q(p, H, grid, run.n_branches);
  double prev = 0.0;
  for (double d : {1e-4, 5e-5, 2.5e-5}) {
    const auto f = apply_F(p.with_alpha(0.75 + d), H, grid, run.n_branches);
    const double err =
        weighted_norm(grid, (f.values - f0.values) / d - q.values, p.gamma).value;
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(2.0).epsilon(0.1));
    prev = err;
  }
  CHECK(prev < 1e-3 * weighted_norm(grid, q.values, p.gamma).value);

  // Constant field: only the b_n term survives. Compare with a long raw sum.
  const auto pc = params_for(0.5);
  const NodalFunction c(basis, Eigen::VectorXd::Constant(48, 2.5));
  const auto g2 = EvalGrid::make(3, 1, 12);
  const auto qc = apply_Q(pc, c, g2, 512);
  for (Eigen::Index i = 0; i < g2.size(); ++i) {
    const double x = g2.points(i);
    if (x >= 0.5) continue;
    double raw = 0.0;
    for (const auto& b : branch_table(pc, x, 1 << 16)) raw += b.pdg;
    CHECK(qc.values(i) == doctest::Approx(2.5 * raw).epsilon(1e-7));
  }
}

TEST_CASE("F is linear and bounded") {
  const CollocationBasis basis(48);
  const auto grid = EvalGrid::make(30, 4, 17);
  const auto p = params_for(0.75);
  std::mt19937_64 rng(5);
  const Eigen::VectorXd a = random_poly(basis, rng), b = random_poly(basis, rng);
  const auto fa = apply_F(p, NodalFunction(basis, a), grid, 256);
  const auto fb = apply_F(p, NodalFunction(basis, b), grid, 256);
  const auto fab = apply_F(p, NodalFunction(basis, 2.0 * a - 3.0 * b), grid, 256);
  const Eigen::VectorXd diff = fab.values - (2.0 * fa.values - 3.0 * fb.values);
  CHECK(weighted_norm(grid, diff, p.gamma).value <
        1e-12 * weighted_norm(grid, fab.values, p.gamma).value);
  for (const auto* v : {&a, &b}) {
    const auto f = apply_F(p, NodalFunction(basis, *v), grid, 256);
    const double ratio = weighted_norm(grid, f.values, p.gamma).value /
                         v->cwiseAbs().maxCoeff();
    CHECK(std::isfinite(ratio));
    CHECK(ratio < 10.0);
  }
}

TEST_CASE("tail estimates bound the change under branch doubling") {
  const CollocationBasis basis(48);
  const auto grid = EvalGrid::make();
  for (double a : {0.5, 1.25}) {
    const auto p = params_for(a);
    const auto run = run_pipeline(p, basis, nullptr);
    const NodalFunction H(basis, run.inv.hat_h.values);
    const auto f1 = apply_F(p, H, grid, run.n_branches);
    const auto f2 = apply_F(p, H, grid, 2 * run.n_branches);
    const auto q1 = apply_Q(p, H, grid, run.n_branches);
    const auto q2 = apply_Q(p, H, grid, 2 * run.n_branches);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double w = std::pow(grid.points(i), p.gamma);
      CHECK(w * std::abs(f1.values(i) - f2.values(i)) <= f1.error + f2.error);
      CHECK(w * std::abs(q1.values(i) - q2.values(i)) <= q1.error + q2.error);
    }
    CHECK(f1.error < 1e-8);
    CHECK(q1.error < 1e-8);
  }
}

TEST_CASE("Kac identity and mass transport at alpha = 0.5") {
  const CollocationBasis basis(48);
  const auto p = params_for(0.5, 0.75);
  const auto run = run_pipeline(p, basis, nullptr);
  const NodalFunction H(basis, run.inv.hat_h.values);
  CHECK(std::abs(pullback_mass(p, H, run.n_branches) - return_time_mass(p, H)) <
        1e-6);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const NodalFunction phi(basis, random_poly(basis, rng));
    CHECK(std::abs(pullback_mass(p, phi, run.n_branches) -
                   return_time_mass(p, phi)) < 1e-6);
  }
  CHECK_THROWS_AS(pullback_mass(params_for(1.25), H, 256), ConfigError);
  CHECK_THROWS_AS(return_time_mass(params_for(1.0), H), ConfigError);
}

TEST_CASE("normalized response") {
  const CollocationBasis basis(48);
  const auto grid = EvalGrid::make();
  const auto p = params_for(0.5, 0.75);
  const auto base = run_pipeline(p, basis, &grid);

  DensityField scaled;
  scaled.values = 3.0 * base.h.values;
  CHECK(normalized_response(p, grid, base.h, scaled).values.cwiseAbs().maxCoeff() <
        1e-12 * base.h.values.cwiseAbs().maxCoeff());

  const auto nr = normalized_response(p, grid, base.h, base.h_star);
  CHECK(std::abs(nr.integral) < 1e-10);

  // Grid mass agrees with the Gauss-Legendre pullback mass, and the mass
  // of h* with the derivative of the mass.
  const NodalFunction H(basis, base.inv.hat_h.values);
  const NodalFunction HS(basis, base.hat_h_star.values);
  const double m = pullback_mass(p, H, base.n_branches);
  CHECK(grid_integral(grid, base.h.values, p.alpha) == doctest::Approx(m).epsilon(1e-7));
  const double ms = pullback_mass(p, HS, base.n_branches) +
                    pullback_mass(p, H, base.n_branches, 40, true);
  CHECK(grid_integral(grid, base.h_star.values, p.alpha) ==
        doctest::Approx(ms).epsilon(1e-7));

  const double m0 = grid_integral(grid, base.h.values, p.alpha);
  double prev = 0.0;
  for (double e : {1e-2, 5e-3, 2.5e-3}) {
    const auto moved = run_pipeline(p.with_alpha(0.5 + e), basis, &grid);
    const double m1 = grid_integral(grid, moved.h.values, p.alpha);
    const Eigen::VectorXd fd = (moved.h.values / m1 - base.h.values / m0) / e;
    const double err = weighted_norm(grid, fd - nr.values, p.gamma).value;
    if (prev > 0.0) CHECK(err < prev);
    prev = err;
  }
  CHECK_THROWS_AS(normalized_response(params_for(1.25), grid, base.h, base.h_star),
                  ConfigError);
}

TEST_CASE("difference quotients of h approach h* in the weighted norm") {
  const CollocationBasis basis(48);
  const auto grid = EvalGrid::make();
  for (const auto& [a, g] : {std::pair{0.5, 0.75}, std::pair{1.25, 1.35}}) {
    const auto p = params_for(a, g);
    const auto base = run_pipeline(p, basis, &grid);
    double prev = 0.0;
    for (double e : {1e-2, 5e-3, 2.5e-3}) {
      const auto moved = run_pipeline(p.with_alpha(a + e), basis, &grid);
      const double err =
          weighted_norm(grid, (moved.h.values - base.h.values) / e - base.h_star.values,
                        g).value;
      if (prev > 0.0) {
        CHECK(err < prev);
        CHECK(prev / err > 1.5);
      }
      prev = err;
    }
    CHECK(std::isfinite(weighted_norm(grid, base.h_star.values, g).value));
  }
}
