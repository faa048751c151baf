#pragma once

#include <cmath>

#include "corsolve/types.hpp"

namespace corsolve {

/// Tridiagonal projection matrix T_m: diag alpha_1..alpha_m, subdiagonal
/// delta_2..delta_m, superdiagonal beta_2..beta_m. The subdiagonal is real
/// nonnegative in both scalar fields; it is stored as Scalar so T composes
/// with complex arithmetic directly.
template <typename Scalar>
struct TridiagonalMatrix {
  Vector<Scalar> diag;
  Vector<Scalar> sub;
  Vector<Scalar> super;

  Index size() const { return diag.size(); }

  DenseMatrix<Scalar> to_dense() const {
    const Index m = size();
    DenseMatrix<Scalar> T = DenseMatrix<Scalar>::Zero(m, m);
    for (Index i = 0; i < m; ++i) T(i, i) = diag[i];
    for (Index i = 0; i + 1 < m; ++i) {
      T(i + 1, i) = sub[i];
      T(i, i + 1) = super[i];
    }
    return T;
  }

  RealOf<Scalar> max_norm() const {
    RealOf<Scalar> m = 0;
    for (Index i = 0; i < diag.size(); ++i)
      m = std::max(m, Eigen::numext::abs(diag[i]));
    for (Index i = 0; i < sub.size(); ++i) {
      m = std::max(m, Eigen::numext::abs(sub[i]));
      m = std::max(m, Eigen::numext::abs(super[i]));
    }
    return m;
  }
};

/// Doolittle factors of a tridiagonal matrix: L unit lower bidiagonal with
/// subdiagonal l_2..l_m, U upper bidiagonal with diagonal u_1..u_m; U keeps
/// T's superdiagonal unchanged. No pivoting, so the short recurrence that
/// updates the factors column by column survives.
template <typename Scalar>
struct TriLU {
  Vector<Scalar> l;      // length m-1
  Vector<Scalar> u;      // length m
  Vector<Scalar> super;  // beta_2..beta_m carried over from T

  Index size() const { return u.size(); }
};

/// Factors T = L U without pivoting. Throws SingularMatrixError when a
/// pivot u_k falls to roundoff relative to ||T||_max.
template <typename Scalar>
TriLU<Scalar> lu_tridiag(const TridiagonalMatrix<Scalar>& T) {
  const Index m = T.size();
  detail::require(m >= 1, "lu_tridiag: empty matrix");
  const RealOf<Scalar> tol =
      Eigen::NumTraits<RealOf<Scalar>>::epsilon() * T.max_norm();
  TriLU<Scalar> f;
  f.l.resize(m - 1);
  f.u.resize(m);
  f.super = T.super;
  f.u[0] = T.diag[0];
  if (Eigen::numext::abs(f.u[0]) <= tol)
    throw SingularMatrixError("lu_tridiag: zero pivot at step 1");
  for (Index k = 1; k < m; ++k) {
    f.l[k - 1] = T.sub[k - 1] / f.u[k - 1];
    f.u[k] = T.diag[k] - f.l[k - 1] * T.super[k - 1];
    if (Eigen::numext::abs(f.u[k]) <= tol)
      throw SingularMatrixError("lu_tridiag: zero pivot");
  }
  return f;
}

/// Solves T y = rhs through the bidiagonal factors: L z = rhs forward,
/// then U y = z backward.
template <typename Scalar>
Vector<Scalar> trilu_solve(const TriLU<Scalar>& f, const Vector<Scalar>& rhs) {
  const Index m = f.size();
  detail::require(rhs.size() == m, "trilu_solve: dimension mismatch");
  Vector<Scalar> y(m);
  y[0] = rhs[0];
  for (Index k = 1; k < m; ++k) y[k] = rhs[k] - f.l[k - 1] * y[k - 1];
  y[m - 1] /= f.u[m - 1];
  for (Index k = m - 2; k >= 0; --k)
    y[k] = (y[k] - f.super[k] * y[k + 1]) / f.u[k];
  return y;
}

/// Solves T' y = rhs (conjugate transpose; plain transpose in the real
/// field) by reusing the same factors: T' = U' L', with U' lower and L'
/// unit upper bidiagonal.
template <typename Scalar>
Vector<Scalar> trilu_solve_adjoint(const TriLU<Scalar>& f, const Vector<Scalar>& rhs) {
  using Eigen::numext::conj;
  const Index m = f.size();
  detail::require(rhs.size() == m, "trilu_solve_adjoint: dimension mismatch");
  Vector<Scalar> y(m);
  y[0] = rhs[0] / conj(f.u[0]);
  for (Index k = 1; k < m; ++k)
    y[k] = (rhs[k] - conj(f.super[k - 1]) * y[k - 1]) / conj(f.u[k]);
  for (Index k = m - 2; k >= 0; --k) y[k] -= conj(f.l[k]) * y[k + 1];
  return y;
}

}  // namespace corsolve
