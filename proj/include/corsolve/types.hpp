#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace corsolve {

using Index = Eigen::Index;

/// Dense column vector over a real or complex scalar field.
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense matrix, used for recorded Krylov bases and direct-solve oracles.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Sparse operator in compressed row storage, canonical form
/// (row-sorted column indices, duplicates summed at assembly).
template <typename Scalar>
using CsrMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;

template <typename Scalar>
using Triplet = Eigen::Triplet<Scalar, Index>;

/// Real type underlying a scalar field (double for both double and
/// std::complex<double>).
template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

template <typename Scalar>
inline constexpr bool is_complex_v = Eigen::NumTraits<Scalar>::IsComplex;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Operand dimensions do not conform.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A direct factorization met a pivot that is zero to working precision.
class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(const std::string& what) : Error(what) {}
};

/// Malformed or unsupported input file.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

namespace detail {

inline void require(bool cond, const char* msg) {
  if (!cond) throw DimensionError(msg);
}

}  // namespace detail

}  // namespace corsolve
