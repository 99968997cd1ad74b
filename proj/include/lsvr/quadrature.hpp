#pragma once

#include <Eigen/Dense>

namespace lsvr {

struct GaussRule {
  Eigen::VectorXd nodes;    ///< ascending, in (-1,1)
  Eigen::VectorXd weights;  ///< sum to 2
};

/// n-point Gauss-Legendre rule (Golub-Welsch).
GaussRule gauss_legendre(int n);

/// Integrates f over [a,b] with the given rule.
template <typename F>
double integrate(const GaussRule& rule, double a, double b, F&& f) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (b + a);
  double s = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights(i) * f(c + h * rule.nodes(i));
  return h * s;
}

}  // namespace lsvr
