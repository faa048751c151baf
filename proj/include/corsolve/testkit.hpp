#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "corsolve/core.hpp"
#include "corsolve/types.hpp"

namespace corsolve {

/// Five-point diffusion plus first-order upwind convection on the unit
/// square with homogeneous Dirichlet boundary, nx-by-ny interior nodes in
/// lexicographic order. Unsymmetric for peclet > 0, row-diagonally
/// dominant, nonsingular by irreducible dominance.
inline CsrMatrix<double> gen_convection_diffusion(Index nx, Index ny, double peclet) {
  if (nx < 2 || ny < 2) throw InputError("gen_convection_diffusion: grid must be at least 2x2");
  if (peclet < 0) throw InputError("gen_convection_diffusion: peclet must be nonnegative");
  const double hx = 1.0 / static_cast<double>(nx + 1);
  const double hy = 1.0 / static_cast<double>(ny + 1);
  const double dx = 1.0 / (hx * hx);
  const double dy = 1.0 / (hy * hy);
  const double cx = peclet / hx;  // upwind stream in +x
  const double cy = peclet / hy;  // upwind stream in +y
  const Index n = nx * ny;
  std::vector<Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * n));
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index row = j * nx + i;
      if (j > 0) trip.emplace_back(row, row - nx, -dy - cy);
      if (i > 0) trip.emplace_back(row, row - 1, -dx - cx);
      trip.emplace_back(row, row, 2 * dx + 2 * dy + cx + cy);
      if (i + 1 < nx) trip.emplace_back(row, row + 1, -dx);
      if (j + 1 < ny) trip.emplace_back(row, row + nx, -dy);
    }
  }
  return make_csr<double>(n, n, trip);
}

/// Diagonal matrix with the given spectrum.
template <typename Scalar>
CsrMatrix<Scalar> gen_diagonal(const std::vector<Scalar>& eigs) {
  const Index n = static_cast<Index>(eigs.size());
  std::vector<Triplet<Scalar>> trip;
  trip.reserve(eigs.size());
  for (Index i = 0; i < n; ++i) trip.emplace_back(i, i, eigs[static_cast<std::size_t>(i)]);
  return make_csr<Scalar>(n, n, trip);
}

/// Seed-deterministic sparse unsymmetric matrix with a varied diagonal and
/// bounded off-diagonal row mass, so the condition number stays modest
/// (well under 1e3) while the spectrum keeps enough spread for Krylov
/// iterations not to terminate early.
inline CsrMatrix<double> gen_random_well_conditioned(Index n, std::uint64_t seed) {
  if (n < 2) throw InputError("gen_random_well_conditioned: n must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<Index> col(0, n - 1);
  const Index per_row = std::min<Index>(8, n - 1);
  const double off_mass = 0.9;
  std::vector<Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>((per_row + 1) * n));
  for (Index i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 1.0 + static_cast<double>(i + 1) / static_cast<double>(n));
    for (Index k = 0; k < per_row; ++k) {
      Index j = col(rng);
      if (j == i) j = (j + 1) % n;
      trip.emplace_back(i, j, unit(rng) * off_mass / static_cast<double>(per_row));
    }
  }
  return make_csr<double>(n, n, trip);
}

/// Convection-diffusion operator shifted off the real axis:
/// A + i*shift*I. Exercises the complex non-Hermitian code paths.
inline CsrMatrix<std::complex<double>> gen_complex_shifted(Index nx, Index ny,
                                                           double peclet, double shift) {
  const CsrMatrix<double> base = gen_convection_diffusion(nx, ny, peclet);
  std::vector<Triplet<std::complex<double>>> trip;
  trip.reserve(static_cast<std::size_t>(base.nonZeros() + base.rows()));
  const Index* offsets = base.outerIndexPtr();
  const Index* cols = base.innerIndexPtr();
  const double* vals = base.valuePtr();
  for (Index i = 0; i < base.rows(); ++i)
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p)
      trip.emplace_back(i, cols[p], std::complex<double>(vals[p], 0.0));
  for (Index i = 0; i < base.rows(); ++i)
    trip.emplace_back(i, i, std::complex<double>(0.0, shift));
  return make_csr<std::complex<double>>(base.rows(), base.cols(), trip);
}

/// Seed-deterministic vector with entries in (-1, 1); complex entries get
/// independent real and imaginary parts.
template <typename Scalar>
Vector<Scalar> gen_random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector<Scalar> v(n);
  for (Index i = 0; i < n; ++i) {
    if constexpr (is_complex_v<Scalar>) {
      const double re = unit(rng);
      const double im = unit(rng);
      v[i] = Scalar(re, im);
    } else {
      v[i] = unit(rng);
    }
  }
  return v;
}

/// Orthonormalized monomial Krylov basis [v, Av, ..., A^{k-1}v] with its
/// numerical rank. Oracle for span claims about Lanczos bases.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
struct KrylovBasis {
  DenseMatrix<Scalar> Q;
  Index rank = 0;
};

template <typename Matrix, typename Scalar = typename Matrix::Scalar>
KrylovBasis<Matrix> brute_force_krylov(const Matrix& A, const Vector<Scalar>& v,
                                       Index k) {
  detail::require(k >= 1 && k <= A.rows(), "brute_force_krylov: bad dimension");
  DenseMatrix<Scalar> K(v.size(), k);
  K.col(0) = v;
  for (Index j = 1; j < k; ++j) K.col(j) = matvec(A, Vector<Scalar>(K.col(j - 1)));
  Eigen::ColPivHouseholderQR<DenseMatrix<Scalar>> qr(K);
  qr.setThreshold(1e-10);
  KrylovBasis<Matrix> out;
  out.rank = qr.rank();
  DenseMatrix<Scalar> Q =
      qr.householderQ() * DenseMatrix<Scalar>::Identity(v.size(), k);
  out.Q = Q.leftCols(out.rank);
  return out;
}

/// Largest principal angle (radians) between the column spans of two
/// orthonormal bases of equal rank.
template <typename Scalar>
RealOf<Scalar> max_principal_angle(const DenseMatrix<Scalar>& Q1,
                                   const DenseMatrix<Scalar>& Q2) {
  detail::require(Q1.cols() == Q2.cols(), "max_principal_angle: rank mismatch");
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(Q1.adjoint() * Q2);
  const RealOf<Scalar> c =
      std::min<RealOf<Scalar>>(1, svd.singularValues().minCoeff());
  return std::acos(c);
}

/// Orthonormalizes dense columns (thin QR); used to compare Lanczos spans
/// against the brute-force basis.
template <typename Scalar>
DenseMatrix<Scalar> orthonormalize(const DenseMatrix<Scalar>& V) {
  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(V);
  return qr.householderQ() * DenseMatrix<Scalar>::Identity(V.rows(), V.cols());
}

/// Wraps any operator and counts products by A and by its adjoint while
/// delegating results unchanged.
template <typename Matrix>
class InstrumentedOperator {
 public:
  using Scalar = typename Matrix::Scalar;

  explicit InstrumentedOperator(const Matrix& A) : A_(A) {}

  Index rows() const { return A_.rows(); }
  Index cols() const { return A_.cols(); }

  std::int64_t count_matvec() const { return count_a_; }
  std::int64_t count_adjoint() const { return count_adjoint_; }
  void reset_counts() const { count_a_ = count_adjoint_ = 0; }

  const Matrix& inner() const { return A_; }

  void note_matvec() const { ++count_a_; }
  void note_adjoint() const { ++count_adjoint_; }

 private:
  const Matrix& A_;
  mutable std::int64_t count_a_ = 0;
  mutable std::int64_t count_adjoint_ = 0;
};

template <typename Matrix, typename Scalar = typename Matrix::Scalar>
void matvec(const InstrumentedOperator<Matrix>& op, const Vector<Scalar>& x,
            Vector<Scalar>& y) {
  op.note_matvec();
  matvec(op.inner(), x, y);
}

template <typename Matrix, typename Scalar = typename Matrix::Scalar>
Vector<Scalar> matvec(const InstrumentedOperator<Matrix>& op, const Vector<Scalar>& x) {
  op.note_matvec();
  return matvec(op.inner(), x);
}

template <typename Matrix, typename Scalar = typename Matrix::Scalar>
void matvec_adjoint(const InstrumentedOperator<Matrix>& op, const Vector<Scalar>& x,
                    Vector<Scalar>& y) {
  op.note_adjoint();
  matvec_adjoint(op.inner(), x, y);
}

template <typename Matrix, typename Scalar = typename Matrix::Scalar>
Vector<Scalar> matvec_adjoint(const InstrumentedOperator<Matrix>& op,
                              const Vector<Scalar>& x) {
  op.note_adjoint();
  return matvec_adjoint(op.inner(), x);
}

}  // namespace corsolve
