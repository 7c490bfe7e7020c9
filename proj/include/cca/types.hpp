#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace cca {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMatrix = DenseMatrix<std::complex<Scalar>>;
template <typename Scalar>
using ComplexVector = DenseVector<std::complex<Scalar>>;

/// Requested sector would exceed the configured dimension cap.
class dimension_cap_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-step integrator detected trace drift beyond tolerance.
class trace_drift_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace cca
