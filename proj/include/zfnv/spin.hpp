#pragma once

#include <cmath>
#include <span>
#include <string>

#include "zfnv/errors.hpp"
#include "zfnv/types.hpp"

namespace zfnv {

/// Spin quantum number j, stored as the integer 2j.
class Spin {
 public:
  static Spin from_double(double j);
  static constexpr Spin from_twice(int twice_j) { return Spin(twice_j); }

  constexpr int twice() const { return twice_; }
  constexpr double j() const { return 0.5 * twice_; }
  constexpr Index multiplicity() const { return twice_ + 1; }

  friend constexpr bool operator==(Spin, Spin) = default;

 private:
  constexpr explicit Spin(int twice_j) : twice_(twice_j) {}
  int twice_;
};

inline constexpr Spin kSpinHalf = Spin::from_twice(1);
inline constexpr Spin kSpinOne = Spin::from_twice(2);
inline constexpr Spin kSpinThreeHalves = Spin::from_twice(3);

/// Raw angular-momentum matrices in the decreasing-m basis.
template <typename Real = double>
struct SpinMatrices {
  CMatrix<Real> x, y, z, sq, plus, minus;
};

template <typename Real = double>
SpinMatrices<Real> spin_matrices(Spin s) {
  using C = std::complex<Real>;
  const Index n = s.multiplicity();
  const Real j = Real(s.twice()) / 2;
  SpinMatrices<Real> out;
  out.z = CMatrix<Real>::Zero(n, n);
  out.plus = CMatrix<Real>::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const Real m = j - Real(k);
    out.z(k, k) = C(m);
    // S+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one slot above.
    if (k > 0) out.plus(k - 1, k) = C(std::sqrt(j * (j + 1) - m * (m + 1)));
  }
  out.minus = out.plus.adjoint();
  out.x = (out.plus + out.minus) / C(2);
  out.y = (out.plus - out.minus) / C(0, 2);
  out.sq = out.x * out.x + out.y * out.y + out.z * out.z;
  return out;
}

/// Label of magnetic quantum number m = twice_m / 2, e.g. "+3/2", "0", "-1".
std::string m_label(int twice_m);
Basis spin_basis(Spin s);

struct SpinOperators {
  OperatorMatrix x, y, z, sq;
};

SpinOperators spin_operators(Spin s);
SpinOperators spin_operators(double j);

OperatorMatrix identity(Index dim);
OperatorMatrix identity(const Basis& basis);

/// Kronecker product; basis labels are joined with ','.
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

/// Place `op` on subsystem `slot` of a register with the given dims, identity elsewhere.
OperatorMatrix embed(const OperatorMatrix& op, std::size_t slot, std::span<const Index> dims);

inline cmat commutator(const cmat& a, const cmat& b) { return a * b - b * a; }

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
 public:
  /// Validates against trace/hermiticity/positivity; `tol` bounds trace and hermiticity.
  static DensityMatrix from(OperatorMatrix op, double tol = kHermTol);
  static DensityMatrix pure(const cvec& psi, Basis basis);
  static DensityMatrix maximally_mixed(Index dim);
  static DensityMatrix maximally_mixed(const Basis& basis);

  const OperatorMatrix& op() const { return op_; }
  const cmat& mat() const { return op_.mat; }
  const Basis& basis() const { return op_.basis; }
  Index dim() const { return op_.dim(); }

 private:
  explicit DensityMatrix(OperatorMatrix op) : op_(std::move(op)) {}
  OperatorMatrix op_;
};

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);

struct DensityCheck {
  double trace_error;
  double hermiticity_error;
  double min_eigenvalue;
};

DensityCheck check_density(const cmat& rho);

/// Re tr(rho * obs); throws if obs is not Hermitian or dimensions differ.
double expectation(const DensityMatrix& rho, const OperatorMatrix& obs);
double expectation(const DensityMatrix& rho, const cmat& obs);

}  // namespace zfnv
