#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace zfnv {

template <typename Real = double>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real = double>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using cmat = CMatrix<double>;
using cvec = CVector<double>;
using rvec = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Ordered basis labels, one per row of an operator.
using Basis = std::vector<std::string>;

enum class Structure { general, hermitian, unitary };

/// Dense complex square matrix tagged with its basis.
struct OperatorMatrix {
  cmat mat;
  Basis basis;
  Structure structure = Structure::general;

  Index dim() const { return mat.rows(); }
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kHermTol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol = kUnitaryTol) {
  using Mat = typename Derived::PlainObject;
  return m.rows() == m.cols() &&
         max_abs(m * m.adjoint() - Mat::Identity(m.rows(), m.cols())) <= tol;
}

/// Throws if entries/dimension or the structure tag are violated.
void validate(const OperatorMatrix& op);

}  // namespace zfnv
