#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lsvr/collocation.hpp"
#include "lsvr/density_field.hpp"
#include "lsvr/map_params.hpp"

namespace lsvr {

/// Evaluation points on (0,1]: 2^{-k/per_octave} for k = 0..min_exp*per_octave
/// merged with a uniform grid of `delta_points` on [1/2,1].
struct EvalGrid {
  Eigen::VectorXd points;  ///< strictly increasing
  /// Indices (ascending x) of the geometric points in (0,1/2].
  std::vector<Eigen::Index> geometric;
  /// Indices (ascending x) of the uniform points on [1/2,1].
  std::vector<Eigen::Index> uniform;
  int min_exp = 40;
  int per_octave = 8;

  static EvalGrid make(int min_exp = 40, int per_octave = 8,
                       int delta_points = 65);
  [[nodiscard]] Eigen::Index size() const { return points.size(); }
};

/// F(Phi): Phi on [1/2,1]; sum_n Phi((x_n+1)/2) x_n'/2 on (0,1/2).
/// error = grid-sup of x^gamma times the closure error estimate.
DensityField apply_F(const MapParams& params, const NodalFunction& phi,
                     const EvalGrid& grid, std::int64_t n_branches);

/// Q(Phi): 0 on [1/2,1]; sum_n Phi'(g_n) a_n g_n' + Phi(g_n) b_n on (0,1/2).
DensityField apply_Q(const MapParams& params, const NodalFunction& phi,
                     const EvalGrid& grid, std::int64_t n_branches);

/// h* = F(hat_h*) + Q(hat_h).
DensityField full_response(const MapParams& params, const NodalFunction& hat_h,
                           const NodalFunction& hat_h_star,
                           const EvalGrid& grid, std::int64_t n_branches);

/// Integral over (0,1] of a field sampled on the grid: trapezoid in log x
/// with Gregory end corrections on (x_min, 1/2], Gregory on the uniform
/// points of [1/2,1], and x^{-alpha}(c + d log x) fitted below x_min.
/// Requires alpha < 1.
double grid_integral(const EvalGrid& grid, const Eigen::VectorXd& f,
                     double alpha);

/// (h* m - h m*)/m^2 with m, m* the grid integrals of h and h*.
/// ConfigError for alpha >= 1 (infinite measure).
DensityField normalized_response(const MapParams& params, const EvalGrid& grid,
                                 const DensityField& h,
                                 const DensityField& h_star);

struct WeightedNormValue {
  double value = 0.0;
  double gamma = 0.0;
  double argmax_point = 0.0;
};

/// Grid-sup of |x^gamma f(x)|; ties keep the first (smallest) point.
WeightedNormValue weighted_norm(const EvalGrid& grid, const Eigen::VectorXd& f,
                                double gamma);

/// int_0^1 F(Phi) dm by Gauss-Legendre panels on the octaves of (0,1/2) down
/// to 2^{-min_exp}, a power-law remainder below, and the basis quadrature
/// on [1/2,1]. With `dalpha` the integrand is Q(Phi) instead of F(Phi)
/// and Phi's own integral is not added. ConfigError for alpha >= 1.
double pullback_mass(const MapParams& params, const NodalFunction& phi,
                     std::int64_t n_branches, int min_exp = 40,
                     bool dalpha = false);

/// int_{[1/2,1]} R Phi dm with R the first return time, summed over
/// cylinders: sum_{n>=0} int_{1/2}^{(1+w_n)/2} Phi, w_n = E^{-n}(1).
/// Explicit terms for n < head, power-law tail. ConfigError for alpha >= 1.
double return_time_mass(const MapParams& params, const NodalFunction& phi,
                        std::int64_t head = std::int64_t{1} << 20);

}  // namespace lsvr
