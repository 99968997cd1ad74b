#include "lsvr/run.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "lsvr/branch_sum.hpp"
#include "lsvr/induced_operator.hpp"
#include "lsvr/pipeline.hpp"
#include "lsvr/pullback.hpp"
#include "lsvr/validation.hpp"

namespace lsvr {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Thresholds applied by validate mode.
constexpr double kKacTol = 1e-6;
constexpr double kUlamTol = 5e-3;

json norm_json(const WeightedNormValue& n) {
  return {{"value", n.value}, {"gamma", n.gamma}, {"argmax", n.argmax_point}};
}

json diagnostics_json(const DiagnosticsReport& r) {
  json conds = json::array();
  for (const auto& c : r.conditions) {
    conds.push_back({{"name", c.name},
                     {"description", c.description},
                     {"summable", c.summable},
                     {"n", c.n},
                     {"values", c.values},
                     {"cauchy_ratio", c.cauchy_ratio},
                     {"decay_exponent", c.decay_exponent},
                     {"violated", c.violated}});
  }
  return {{"alpha", r.alpha},
          {"gamma", r.gamma},
          {"n_probe", r.n_probe},
          {"conditions", conds},
          {"violations", r.violations()}};
}

json fd_json(const FdReport& r) {
  return {{"eps", r.eps_list},
          {"fd_norms", r.norms},
          {"ratios", r.ratios},
          {"observed_orders", observed_orders(r.norms, r.eps_list)},
          {"minus_norms", r.minus_norms},
          {"central_norms", r.central_norms},
          {"induced_norms", r.induced_norms},
          {"response_norm", r.response_norm},
          {"induced_response_norm", r.induced_response_norm},
          {"converging", r.converging()},
          {"induced_converging", r.induced_converging()}};
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<const Eigen::VectorXd*>& cols) {
  std::ofstream out(path, std::ios::binary);
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << header[c];
  out << '\n';
  for (Eigen::Index i = 0; i < cols.front()->size(); ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c)
      out << (c ? "," : "") << format_double((*cols[c])(i));
    out << '\n';
  }
  if (!out) throw SolverError("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw SolverError("cannot write " + path.string());
}

std::int64_t diagnostic_probe(std::int64_t max_branches) {
  return std::min<std::int64_t>(4096, max_branches / 4 * 4);
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
  if (const auto v = cfg.violations(); !v.empty()) {
    log << "config error:\n";
    for (const auto& s : v) log << "  " << s << '\n';
    return kExitConfig;
  }
  const MapParams params = cfg.params();
  const fs::path dir(cfg.out_dir);
  std::string stage = "setup";
  try {
    fs::create_directories(dir);

    json summary;
    summary["schema_version"] = kSummarySchemaVersion;
    summary["mode"] = to_string(cfg.mode);
    json config;
    for (const auto& [k, v] : to_settings(cfg))
      if (k != "out_dir") config[k] = v;
    summary["config"] = config;
    summary["alpha"] = params.alpha;
    summary["gamma"] = params.gamma;

    if (cfg.mode == Mode::diagnose) {
      stage = "assumption diagnostics";
      const auto d = assumption_diagnostics(params, diagnostic_probe(params.max_branches));
      summary["diagnostics"] = diagnostics_json(d);
      write_json(dir / "summary.json", summary);
      const auto bad = d.violations();
      if (bad.empty()) return kExitOk;
      log << "validation failure: assumption diagnostics flag";
      for (const auto& b : bad) log << ' ' << b;
      log << " at alpha = " << params.alpha << ", gamma = " << params.gamma
          << '\n';
      return kExitValidation;
    }

    const CollocationBasis basis(cfg.cheb);
    const EvalGrid grid =
        EvalGrid::make(cfg.grid_min_exp, cfg.grid_per_octave, cfg.grid_delta_points);
    const bool finite = params.alpha < 1.0;
    const bool with_response = cfg.mode != Mode::density;

    stage = "branch truncation";
    const Truncation trunc = pipeline_truncation(params);
    const std::int64_t n = trunc.n_branches;

    stage = "operator assembly";
    const OperatorMatrix op = assemble_operator(params, basis, n);

    stage = "invariant density";
    const InvariantDensity inv = invariant_density(op, basis);
    const Eigen::VectorXd& hat_h = inv.hat_h.values;
    const NodalFunction hat_h_fn(basis, hat_h);

    json induced;
    induced["eigenvalue"] = inv.eigenvalue;
    induced["fixed_point_residual"] =
        (op.entries * hat_h - hat_h).cwiseAbs().maxCoeff();
    induced["normalization_defect"] = basis.integrate(hat_h) - 1.0;
    induced["gap_witness"] = inv.second_modulus;
    induced["min_hat_h"] = hat_h.minCoeff();

    DensityField q, hat_h_star;
    if (with_response) {
      stage = "response source";
      q = response_source(params, basis, inv.hat_h, n);
      stage = "resolvent solve";
      hat_h_star = solve_response(op, basis, q);
      induced["source_integral"] = basis.integrate(q.values);
      induced["source_tail"] = q.error;
      induced["resolvent_residual"] = hat_h_star.error;
      induced["response_integral"] = basis.integrate(hat_h_star.values);
    }

    stage = "pullback";
    const DensityField h = apply_F(params, hat_h_fn, grid, n);
    json pull;
    pull["h_error"] = h.error;
    pull["h_norm"] = norm_json(weighted_norm(grid, h.values, params.gamma));
    DensityField h_star, normalized;
    if (with_response) {
      stage = "response pullback";
      const NodalFunction hs_fn(basis, hat_h_star.values);
      h_star = full_response(params, hat_h_fn, hs_fn, grid, n);
      pull["h_star_error"] = h_star.error;
      pull["h_star_norm"] = norm_json(weighted_norm(grid, h_star.values, params.gamma));
      if (finite) {
        normalized = normalized_response(params, grid, h, h_star);
        pull["normalized_response_norm"] =
            norm_json(weighted_norm(grid, normalized.values, params.gamma));
      }
    }

    summary["truncation"] = {{"n_branches", n},
                             {"closure_tail", trunc.tail_estimate},
                             {"operator_tail_bound", op.tail_bound}};
    summary["induced"] = induced;
    summary["pullback"] = pull;

    std::vector<std::string> failures;
    json kac = nullptr;
    if (finite) {
      stage = "Kac check";
      const double mass = pullback_mass(params, hat_h_fn, n, cfg.grid_min_exp);
      const double ret = return_time_mass(params, hat_h_fn);
      kac = {{"pullback_mass", mass},
             {"return_time_mass", ret},
             {"kac_gap", std::abs(mass - ret)}};
      if (cfg.mode == Mode::validate && !(std::abs(mass - ret) < kKacTol))
        failures.push_back("kac_gap above 1e-6");
    }
    summary["kac"] = kac;

    if (cfg.mode == Mode::validate) {
      json val;
      stage = "finite-difference check";
      const FdReport fd = fd_response_check(params, cfg.eps, basis, grid);
      val["fd"] = fd_json(fd);
      if (!fd.converging()) failures.push_back("fd_norms not converging");
      if (!fd.induced_converging())
        failures.push_back("induced fd norms not converging");

      stage = "Ulam oracle";
      auto ulam = ulam_induced_density(params, cfg.ulam_bins,
                                       std::min<std::int64_t>(4096, params.max_branches));
      ulam.l1_distance_to_spectral = ulam_l1_distance(ulam, basis, hat_h);
      val["ulam"] = {{"bins", ulam.bins},
                     {"l1_distance", ulam.l1_distance_to_spectral},
                     {"row_sum_defect", ulam.row_sum_defect},
                     {"n_branches", ulam.n_branches},
                     {"iterations", ulam.iterations}};
      if (!(ulam.l1_distance_to_spectral < kUlamTol))
        failures.push_back("Ulam L1 distance above 5e-3");

      stage = "assumption diagnostics";
      const auto d = assumption_diagnostics(params, diagnostic_probe(params.max_branches));
      val["diagnostics"] = diagnostics_json(d);
      for (const auto& b : d.violations())
        failures.push_back("assumption " + b + " violated");
      val["failures"] = failures;
      summary["validation"] = val;
    }

    stage = "output";
    const Eigen::VectorXd hat_h_prime = hat_h_fn.derivative_values();
    if (with_response) {
      std::vector<std::string> head{"x", "h", "h_star"};
      std::vector<const Eigen::VectorXd*> cols{&grid.points, &h.values, &h_star.values};
      if (finite) {
        head.emplace_back("normalized_response");
        cols.push_back(&normalized.values);
      }
      write_csv(dir / "results.csv", head, cols);
      write_csv(dir / "induced.csv", {"y", "hat_h", "hat_h_prime", "q", "hat_h_star"},
                {&basis.nodes(), &hat_h, &hat_h_prime, &q.values, &hat_h_star.values});
    } else {
      write_csv(dir / "results.csv", {"x", "h"}, {&grid.points, &h.values});
      write_csv(dir / "induced.csv", {"y", "hat_h", "hat_h_prime"},
                {&basis.nodes(), &hat_h, &hat_h_prime});
    }
    write_json(dir / "summary.json", summary);

    if (!failures.empty()) {
      log << "validation failure:";
      for (const auto& f : failures) log << "\n  " << f;
      log << '\n';
      return kExitValidation;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error in stage " << stage << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "solver failure in stage " << stage << ": " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace lsvr
