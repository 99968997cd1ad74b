#include "lsvr/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lsvr {
namespace {

// T_0..T_{n-1} at t by the three-term recurrence.
Eigen::VectorXd chebyshev_row(double t, int n) {
  Eigen::VectorXd T(n);
  T(0) = 1.0;
  if (n > 1) T(1) = t;
  for (int k = 2; k < n; ++k) T(k) = 2.0 * t * T(k - 1) - T(k - 2);
  return T;
}

}  // namespace

CollocationBasis::CollocationBasis(int degree) {
  if (degree < 2) throw std::invalid_argument("CollocationBasis: degree < 2");
  const int m = degree;
  const double pi = std::numbers::pi;

  Eigen::VectorXd t(m);
  nodes_.resize(m);
  bary_.resize(m);
  for (int j = 0; j < m; ++j) {
    t(j) = -std::cos(pi * j / (m - 1));
    bary_(j) = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == m - 1) ? 0.5 : 1.0);
  }
  // Exact endpoints and symmetric interior nodes.
  for (int j = 0; j < m; ++j) {
    const double tj = (j < (m + 1) / 2) ? t(j) : -t(m - 1 - j);
    t(j) = (2 * j + 1 == m) ? 0.0 : tj;
    nodes_(j) = 0.75 + 0.25 * t(j);
  }
  nodes_(0) = kDeltaLeft;
  nodes_(m - 1) = kDeltaRight;

  diff_.setZero(m, m);
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      diff_(i, j) = (bary_(j) / bary_(i)) / (nodes_(i) - nodes_(j));
      row += diff_(i, j);
    }
    diff_(i, i) = -row;
  }
  // Re-centre against the library's own summation order.
  for (int pass = 0; pass < 2; ++pass)
    diff_.diagonal() -= diff_.rowwise().sum();

  // Chebyshev-Vandermonde V(j,k) = T_k(t_j); coefficients = V^{-1} values.
  Eigen::MatrixXd vand(m, m);
  for (int j = 0; j < m; ++j) vand.row(j) = chebyshev_row(t(j), m).transpose();
  const Eigen::MatrixXd coef = vand.partialPivLu().inverse();

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m + 1, m);
  k(1, 0) = 1.0;
  if (m > 1) k(2, 1) = 0.25;
  for (int c = 2; c < m; ++c) {
    k(c + 1, c) += 1.0 / (2.0 * (c + 1));
    k(c - 1, c) -= 1.0 / (2.0 * (c - 1));
  }
  antideriv_ = k * coef;

  // Clenshaw-Curtis: integrals of T_k over [-1,1], scaled to [1/2,1].
  Eigen::RowVectorXd moments = Eigen::RowVectorXd::Zero(m);
  for (int c = 0; c < m; c += 2) moments(c) = 2.0 / (1.0 - double(c) * c);
  quad_ = (0.25 * moments * coef).transpose();
}

Eigen::VectorXd CollocationBasis::cardinal(double y) const {
  const int m = degree();
  Eigen::VectorXd l(m);
  for (int j = 0; j < m; ++j) {
    const double d = y - nodes_(j);
    if (d == 0.0) {
      l.setZero();
      l(j) = 1.0;
      return l;
    }
    l(j) = bary_(j) / d;
  }
  return l / l.sum();
}

Eigen::VectorXd CollocationBasis::cardinal_derivative(double y) const {
  return diff_.transpose() * cardinal(y);
}

Eigen::RowVectorXd CollocationBasis::cumulative_row(double offset) const {
  // t = -cos(theta) with 1 - cos(theta) = 4*offset, so
  // T_k(t) - T_k(-1) = -(-1)^k 2 sin^2(k theta / 2) without cancellation.
  const int m = degree();
  const double delta = std::clamp(4.0 * offset, 0.0, 2.0);
  const double theta = 2.0 * std::asin(std::sqrt(0.5 * delta));
  Eigen::RowVectorXd T(m + 1);
  for (int c = 0; c <= m; ++c) {
    const double s = std::sin(0.5 * c * theta);
    T(c) = (c % 2 == 0 ? -2.0 : 2.0) * s * s;
  }
  return 0.25 * T * antideriv_;
}

double CollocationBasis::interpolate(const Eigen::VectorXd& values,
                                     double y) const {
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < degree(); ++j) {
    const double d = y - nodes_(j);
    if (d == 0.0) return values(j);
    const double w = bary_(j) / d;
    num += w * values(j);
    den += w;
  }
  return num / den;
}

NodalFunction::NodalFunction(const CollocationBasis& basis,
                             Eigen::VectorXd values)
    : basis_(&basis), values_(std::move(values)) {
  if (values_.size() != basis.degree())
    throw std::invalid_argument("NodalFunction: size mismatch");
  d1_ = basis.diff_matrix() * values_;
  d2_ = basis.diff_matrix() * d1_;
}

NodalFunction::Probe NodalFunction::probe(double offset) const {
  const Eigen::VectorXd l = basis_->cardinal(kDeltaLeft + offset);
  return {l.dot(values_), l.dot(d1_), l.dot(d2_),
          basis_->cumulative_row(offset).dot(values_)};
}

}  // namespace lsvr
