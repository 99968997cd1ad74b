#pragma once

#include <Eigen/Dense>

namespace lsvr {

inline constexpr double kDeltaLeft = 0.5;
inline constexpr double kDeltaRight = 1.0;

/// Chebyshev-Lobatto collocation on the inducing interval [1/2,1].
/// `degree` is the number of nodes M; interpolants have polynomial degree
/// M-1. Nodes are ascending, nodes(0) = 1/2 and nodes(M-1) = 1.
class CollocationBasis {
 public:
  explicit CollocationBasis(int degree = 48);

  [[nodiscard]] int degree() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const Eigen::VectorXd& nodes() const { return nodes_; }
  /// Clenshaw-Curtis weights; they sum to 1/2.
  [[nodiscard]] const Eigen::VectorXd& quad_weights() const { return quad_; }
  [[nodiscard]] const Eigen::MatrixXd& diff_matrix() const { return diff_; }

  /// Cardinal functions l_j(y), j = 0..M-1 (barycentric form).
  [[nodiscard]] Eigen::VectorXd cardinal(double y) const;
  /// Derivatives l_j'(y).
  [[nodiscard]] Eigen::VectorXd cardinal_derivative(double y) const;
  /// Row r with r.dot(values) = int_{1/2}^{1/2 + offset} p, p the
  /// interpolant. Taking the offset keeps full relative accuracy for
  /// points very close to 1/2.
  [[nodiscard]] Eigen::RowVectorXd cumulative_row(double offset) const;

  [[nodiscard]] double interpolate(const Eigen::VectorXd& values,
                                   double y) const;
  [[nodiscard]] double integrate(const Eigen::VectorXd& values) const {
    return quad_.dot(values);
  }

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd bary_;
  Eigen::VectorXd quad_;
  Eigen::MatrixXd diff_;
  // (M+1) x M: node values -> Chebyshev coefficients of the antiderivative.
  Eigen::MatrixXd antideriv_;
};

/// Values, first and second derivatives, and the running integral from 1/2
/// of one interpolated function, evaluated pointwise on [1/2,1].
class NodalFunction {
 public:
  NodalFunction(const CollocationBasis& basis, Eigen::VectorXd values);

  struct Probe {
    double value, first, second, integral;
  };

  [[nodiscard]] double value(double y) const {
    return basis_->interpolate(values_, y);
  }
  [[nodiscard]] double first(double y) const {
    return basis_->interpolate(d1_, y);
  }
  /// Probe at y = 1/2 + offset.
  [[nodiscard]] Probe probe(double offset) const;

  [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
  [[nodiscard]] const Eigen::VectorXd& derivative_values() const { return d1_; }
  [[nodiscard]] const CollocationBasis& basis() const { return *basis_; }

 private:
  const CollocationBasis* basis_;
  Eigen::VectorXd values_, d1_, d2_;
};

}  // namespace lsvr
