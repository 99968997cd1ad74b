#pragma once

#include <Eigen/Dense>

namespace lsvr {

enum class FieldKind {
  hat_h,            ///< induced invariant density
  hat_h_star,       ///< induced response
  source_q,         ///< response source
  pullback_h,       ///< h = F(hat_h) on the full interval
  response_h_star,  ///< h* = F(hat_h*) + Q(hat_h)
  generic,
};

const char* to_string(FieldKind kind);

/// Values on collocation nodes or on an evaluation grid.
struct DensityField {
  Eigen::VectorXd values;
  FieldKind kind = FieldKind::generic;
  /// Integral over the support, when the producer computed one.
  double integral = 0.0;
  /// Producer-specific accuracy figure: fixed-point or solve residual,
  /// or the truncation error of a branch sum (sup over points).
  double error = 0.0;
};

}  // namespace lsvr
