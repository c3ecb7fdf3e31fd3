#include "zfnv/spin.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace zfnv {

void validate(const OperatorMatrix& op) {
  if (op.mat.rows() != op.mat.cols()) throw DimensionError("operator matrix is not square");
  if (!op.basis.empty() && static_cast<Index>(op.basis.size()) != op.dim())
    throw DimensionError("basis label count does not match operator dimension");
  switch (op.structure) {
    case Structure::hermitian:
      if (!is_hermitian(op.mat)) throw NumericalInvariantError("operator tagged hermitian is not");
      break;
    case Structure::unitary:
      if (!is_unitary(op.mat)) throw NumericalInvariantError("operator tagged unitary is not");
      break;
    case Structure::general:
      break;
  }
}

Spin Spin::from_double(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!std::isfinite(j) || std::abs(twice - rounded) > 1e-12 || rounded < 1.0)
    throw SpecError("spin quantum number must be a positive half-integer, got " + std::to_string(j));
  return Spin(static_cast<int>(rounded));
}

std::string m_label(int twice_m) {
  if (twice_m == 0) return "0";
  const std::string sign = twice_m > 0 ? "+" : "-";
  const int a = std::abs(twice_m);
  return a % 2 == 0 ? sign + std::to_string(a / 2) : sign + std::to_string(a) + "/2";
}

Basis spin_basis(Spin s) {
  Basis b;
  for (int tm = s.twice(); tm >= -s.twice(); tm -= 2) b.push_back(m_label(tm));
  return b;
}

SpinOperators spin_operators(Spin s) {
  auto m = spin_matrices<double>(s);
  const Basis b = spin_basis(s);
  auto wrap = [&](cmat&& x) { return OperatorMatrix{std::move(x), b, Structure::hermitian}; };
  return {wrap(std::move(m.x)), wrap(std::move(m.y)), wrap(std::move(m.z)), wrap(std::move(m.sq))};
}

SpinOperators spin_operators(double j) { return spin_operators(Spin::from_double(j)); }

OperatorMatrix identity(Index dim) {
  Basis b(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) b[static_cast<std::size_t>(k)] = std::to_string(k);
  return {cmat::Identity(dim, dim), std::move(b), Structure::hermitian};
}

OperatorMatrix identity(const Basis& basis) {
  const auto n = static_cast<Index>(basis.size());
  return {cmat::Identity(n, n), basis, Structure::hermitian};
}

namespace {

Basis join_bases(const Basis& a, const Basis& b) {
  Basis out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x + "," + y);
  return out;
}

Structure kron_structure(Structure a, Structure b) { return a == b ? a : Structure::general; }

}  // namespace

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  cmat m = Eigen::kroneckerProduct(a.mat, b.mat);
  return {std::move(m), join_bases(a.basis, b.basis), kron_structure(a.structure, b.structure)};
}

OperatorMatrix embed(const OperatorMatrix& op, std::size_t slot, std::span<const Index> dims) {
  if (slot >= dims.size()) throw DimensionError("embed: slot out of range");
  if (dims[slot] != op.dim()) throw DimensionError("embed: operator dimension does not match dims[slot]");
  Index left = 1, right = 1;
  for (std::size_t k = 0; k < slot; ++k) left *= dims[k];
  for (std::size_t k = slot + 1; k < dims.size(); ++k) right *= dims[k];
  cmat m = Eigen::kroneckerProduct(cmat::Identity(left, left),
                                   Eigen::kroneckerProduct(op.mat, cmat::Identity(right, right)).eval());
  Basis basis;
  if (!op.basis.empty()) {
    // Only the embedded slot carries labels; other slots are numbered.
    OperatorMatrix l = identity(left), r = identity(right);
    basis = join_bases(join_bases(l.basis, op.basis), r.basis);
  }
  const Structure st = op.structure;
  return {std::move(m), std::move(basis), st};
}

DensityCheck check_density(const cmat& rho) {
  DensityCheck c{};
  c.trace_error = std::abs(rho.trace() - cplx(1.0));
  c.hermiticity_error = max_abs(rho - rho.adjoint());
  const cmat h = 0.5 * (rho + rho.adjoint());
  c.min_eigenvalue = Eigen::SelfAdjointEigenSolver<cmat>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return c;
}

DensityMatrix DensityMatrix::from(OperatorMatrix op, double tol) {
  if (op.mat.rows() != op.mat.cols() || op.mat.rows() == 0)
    throw DimensionError("density matrix must be square and non-empty");
  const DensityCheck c = check_density(op.mat);
  if (c.hermiticity_error > tol) throw NumericalInvariantError("density matrix is not Hermitian");
  if (c.trace_error > tol) throw NumericalInvariantError("density matrix trace differs from 1");
  if (c.min_eigenvalue < -1e-10) throw NumericalInvariantError("density matrix has a negative eigenvalue");
  op.structure = Structure::hermitian;
  return DensityMatrix(std::move(op));
}

DensityMatrix DensityMatrix::pure(const cvec& psi, Basis basis) {
  const double n = psi.norm();
  if (n == 0.0) throw SpecError("pure state vector has zero norm");
  const cvec v = psi / n;
  return from({v * v.adjoint(), std::move(basis), Structure::hermitian});
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  OperatorMatrix id = identity(dim);
  id.mat /= static_cast<double>(dim);
  return DensityMatrix(std::move(id));
}

DensityMatrix DensityMatrix::maximally_mixed(const Basis& basis) {
  OperatorMatrix id = identity(basis);
  id.mat /= static_cast<double>(basis.size());
  return DensityMatrix(std::move(id));
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from(kron(a.op(), b.op()), 1e-10);
}

double expectation(const DensityMatrix& rho, const cmat& obs) {
  if (obs.rows() != rho.dim() || obs.cols() != rho.dim())
    throw DimensionError("expectation: observable and density matrix dimensions differ");
  if (!is_hermitian(obs)) throw SpecError("expectation: observable is not Hermitian");
  const cplx v = (rho.mat() * obs).trace();
  if (std::abs(v.imag()) > 1e-10) throw NumericalInvariantError("expectation value has an imaginary residue");
  return v.real();
}

double expectation(const DensityMatrix& rho, const OperatorMatrix& obs) { return expectation(rho, obs.mat); }

}  // namespace zfnv
