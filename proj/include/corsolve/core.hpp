#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "corsolve/types.hpp"

namespace corsolve {

/// Inner product, conjugate-linear in the first argument. For real
/// scalars this is the bilinear form u'v; for complex scalars the
/// sesquilinear form conj(u)'v. Every solver formula in this library is
/// written against this one definition.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar dot(const Eigen::MatrixBase<DerivedU>& u,
                              const Eigen::MatrixBase<DerivedV>& v) {
  detail::require(u.size() == v.size(), "dot: length mismatch");
  return u.dot(v);
}

/// Euclidean norm, sqrt(sum |v_i|^2) >= 0.
template <typename Derived>
RealOf<typename Derived::Scalar> norm2(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

/// y + a*x, lengths must agree.
template <typename Scalar>
Vector<Scalar> axpy(Scalar a, const Vector<Scalar>& x, const Vector<Scalar>& y) {
  detail::require(x.size() == y.size(), "axpy: length mismatch");
  return y + a * x;
}

template <typename Scalar>
Vector<Scalar> scale(Scalar a, const Vector<Scalar>& x) {
  return a * x;
}

/// y = A x with a fixed row-sequential summation order, so repeated runs
/// are bitwise reproducible.
template <typename Scalar>
void matvec(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x, Vector<Scalar>& y) {
  detail::require(A.cols() == x.size(), "matvec: dimension mismatch");
  y.resize(A.rows());
  const Index* offsets = A.outerIndexPtr();
  const Index* cols = A.innerIndexPtr();
  const Scalar* vals = A.valuePtr();
  for (Index i = 0; i < A.rows(); ++i) {
    Scalar acc{};
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p) acc += vals[p] * x[cols[p]];
    y[i] = acc;
  }
}

template <typename Scalar>
Vector<Scalar> matvec(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x) {
  Vector<Scalar> y;
  matvec(A, x, y);
  return y;
}

/// y = A' x (transpose for real scalars, conjugate transpose for complex).
/// Scatters row by row over the same CSR storage; no transposed copy is kept.
template <typename Scalar>
void matvec_adjoint(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x,
                    Vector<Scalar>& y) {
  using Eigen::numext::conj;
  detail::require(A.rows() == x.size(), "matvec_adjoint: dimension mismatch");
  y.setZero(A.cols());
  const Index* offsets = A.outerIndexPtr();
  const Index* cols = A.innerIndexPtr();
  const Scalar* vals = A.valuePtr();
  for (Index i = 0; i < A.rows(); ++i) {
    const Scalar xi = x[i];
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p) y[cols[p]] += conj(vals[p]) * xi;
  }
}

template <typename Scalar>
Vector<Scalar> matvec_adjoint(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x) {
  Vector<Scalar> y;
  matvec_adjoint(A, x, y);
  return y;
}

/// Dense operators share the same entry points so toy dense systems can be
/// fed to any solver.
template <typename Scalar>
void matvec(const DenseMatrix<Scalar>& A, const Vector<Scalar>& x, Vector<Scalar>& y) {
  detail::require(A.cols() == x.size(), "matvec: dimension mismatch");
  y = A * x;
}

template <typename Scalar>
Vector<Scalar> matvec(const DenseMatrix<Scalar>& A, const Vector<Scalar>& x) {
  detail::require(A.cols() == x.size(), "matvec: dimension mismatch");
  return A * x;
}

template <typename Scalar>
void matvec_adjoint(const DenseMatrix<Scalar>& A, const Vector<Scalar>& x,
                    Vector<Scalar>& y) {
  detail::require(A.rows() == x.size(), "matvec_adjoint: dimension mismatch");
  y = A.adjoint() * x;
}

template <typename Scalar>
Vector<Scalar> matvec_adjoint(const DenseMatrix<Scalar>& A, const Vector<Scalar>& x) {
  detail::require(A.rows() == x.size(), "matvec_adjoint: dimension mismatch");
  return A.adjoint() * x;
}

/// Assembles canonical CSR from (row, col, value) triplets. Duplicate
/// entries are summed; column indices end up strictly increasing per row.
template <typename Scalar>
CsrMatrix<Scalar> make_csr(Index n_rows, Index n_cols,
                           const std::vector<Triplet<Scalar>>& triplets) {
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.row() >= n_rows || t.col() < 0 || t.col() >= n_cols)
      throw InputError("make_csr: triplet index out of bounds");
  }
  CsrMatrix<Scalar> A(n_rows, n_cols);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

template <typename Scalar>
DenseMatrix<Scalar> to_dense(const CsrMatrix<Scalar>& A) {
  return DenseMatrix<Scalar>(A);
}

/// Frobenius norm of a sparse operator.
template <typename Scalar>
RealOf<Scalar> frobenius_norm(const CsrMatrix<Scalar>& A) {
  RealOf<Scalar> s = 0;
  const Scalar* vals = A.valuePtr();
  for (Index p = 0; p < A.nonZeros(); ++p) s += Eigen::numext::abs2(vals[p]);
  return std::sqrt(s);
}

/// Largest entry magnitude.
template <typename Scalar>
RealOf<Scalar> max_norm(const CsrMatrix<Scalar>& A) {
  RealOf<Scalar> m = 0;
  const Scalar* vals = A.valuePtr();
  for (Index p = 0; p < A.nonZeros(); ++p)
    m = std::max(m, Eigen::numext::abs(vals[p]));
  return m;
}

/// Direct solve by partially pivoted LU. Ground-truth oracle for the
/// iterative paths; throws if a pivot is zero to working precision.
template <typename Scalar>
Vector<Scalar> dense_lu_solve(const DenseMatrix<Scalar>& A, const Vector<Scalar>& b) {
  detail::require(A.rows() == A.cols(), "dense_lu_solve: matrix must be square");
  detail::require(A.rows() == b.size(), "dense_lu_solve: dimension mismatch");
  Eigen::PartialPivLU<DenseMatrix<Scalar>> lu(A);
  const auto diag = lu.matrixLU().diagonal();
  const RealOf<Scalar> scale =
      A.template lpNorm<Eigen::Infinity>() * Eigen::NumTraits<RealOf<Scalar>>::epsilon();
  for (Index i = 0; i < diag.size(); ++i) {
    if (Eigen::numext::abs(diag[i]) <= scale)
      throw SingularMatrixError("dense_lu_solve: pivot is zero to working precision");
  }
  return lu.solve(b);
}

template <typename Scalar>
Vector<Scalar> dense_lu_solve(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b) {
  return dense_lu_solve(to_dense(A), b);
}

}  // namespace corsolve
