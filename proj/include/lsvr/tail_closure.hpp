#pragma once

// Closed-form remainder of branch sums  sum_{n >= N} Phi(g_n(x)) g_n'(x).
//
// For small z the backward orbit follows z_n = A^{-1}(A(z_0) + n), where A
// is the Abel coordinate of the left branch, A(E(z)) = A(z) - 1. In the
// variable s = 2z the left branch is s -> s(1 + s^a) and
//   A(s) = s^{-a}/a - (a+1)/2 log s + c1 s^a + c2 s^{2a} + O(s^{3a}).
// With dz_n = A'(z_0)/A'(z_n), Euler-Maclaurin in n turns the remainder into
//   dz_N |A'(z_N)| int_{1/2}^{y_N} Phi + s_N/2 - s'_N/12,
// y_N = (1 + z_N)/2, which is linear in (int Phi, Phi(y_N), Phi'(y_N)).

#include <cmath>

#include <unsupported/Eigen/AutoDiff>

namespace lsvr {

using AlphaDual = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;

template <typename Scalar>
struct AbelCoefficients {
  Scalar log_coef, c1, c2;
};

template <typename Scalar>
AbelCoefficients<Scalar> abel_coefficients(const Scalar& a) {
  const Scalar ap1 = a + Scalar(1);
  return {-ap1 / Scalar(2),
          ap1 * (Scalar(2) * a + Scalar(1)) / (Scalar(12) * a),
          -ap1 * ap1 * (Scalar(3) * a + Scalar(1)) / (Scalar(48) * a)};
}

/// Abel coordinate A(z) (up to an additive constant), z in (0,1/2].
template <typename Scalar>
Scalar abel_coordinate(const Scalar& z, const Scalar& a) {
  using std::exp;
  using std::log;
  const auto k = abel_coefficients(a);
  const Scalar ls = log(Scalar(2) * z);
  const Scalar sa = exp(a * ls);
  return Scalar(1) / (a * sa) + k.log_coef * ls + k.c1 * sa + k.c2 * sa * sa;
}

template <typename Scalar>
struct AbelDerivatives {
  Scalar first;   ///< dA/dz (negative)
  Scalar second;  ///< d2A/dz2
};

template <typename Scalar>
AbelDerivatives<Scalar> abel_derivatives(const Scalar& z, const Scalar& a) {
  using std::exp;
  using std::log;
  const auto k = abel_coefficients(a);
  const Scalar s = Scalar(2) * z;
  const Scalar sa = exp(a * log(s));
  const Scalar inv_s = Scalar(1) / s;
  const Scalar d1 = (-Scalar(1) / sa + k.log_coef + k.c1 * a * sa +
                     Scalar(2) * a * k.c2 * sa * sa) *
                    inv_s;
  const Scalar d2 =
      ((a + Scalar(1)) / sa - k.log_coef + k.c1 * a * (a - Scalar(1)) * sa +
       Scalar(2) * a * k.c2 * (Scalar(2) * a - Scalar(1)) * sa * sa) *
      inv_s * inv_s;
  return {Scalar(2) * d1, Scalar(4) * d2};
}

/// Weights of the remainder from index N on:
///   sum_{n>=N} Phi(g_n) g_n' ~ integral*int_{1/2}^{y_N} Phi + value*Phi(y_N)
///                              + slope*Phi'(y_N).
template <typename Scalar>
struct TailWeights {
  Scalar integral, value, slope;
};

template <typename Scalar>
TailWeights<Scalar> tail_weights(const Scalar& z, const Scalar& dz,
                                 const Scalar& a) {
  const auto d = abel_derivatives(z, a);
  return {-dz * d.first,
          dz / Scalar(4) + dz * d.second / (Scalar(24) * d.first * d.first),
          -dz / (Scalar(48) * d.first)};
}

/// Tail weights and their total alpha-derivatives, given the orbit values
/// (z, dz) at index N and their alpha-derivatives (pz, pdz).
struct TailWeightsWithDerivative {
  TailWeights<double> w;
  TailWeights<double> dw;
};

inline TailWeightsWithDerivative tail_weights_and_derivative(
    double z, double dz, double pz, double pdz, double alpha) {
  using D = AlphaDual;
  using Vec = D::DerType;
  const D zd(z, Vec::Constant(pz));
  const D dzd(dz, Vec::Constant(pdz));
  const D ad(alpha, Vec::Constant(1.0));
  const auto t = tail_weights<D>(zd, dzd, ad);
  return {{t.integral.value(), t.value.value(), t.slope.value()},
          {t.integral.derivatives()(0), t.value.derivatives()(0),
           t.slope.derivatives()(0)}};
}

}  // namespace lsvr
