#pragma once

#include <memory>
#include <string>

#include "corsolve/core.hpp"
#include "corsolve/types.hpp"

namespace corsolve {

/// Left preconditioner interface: apply solves M z = r, apply_adjoint
/// solves M' u = q (conjugate transpose in the complex field). Instances
/// are immutable after construction and shareable across solves.
template <typename Scalar>
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(const Vector<Scalar>& r, Vector<Scalar>& z) const = 0;
  virtual void apply_adjoint(const Vector<Scalar>& q, Vector<Scalar>& u) const = 0;
  virtual std::string name() const = 0;
};

template <typename Scalar>
class IdentityPreconditioner final : public Preconditioner<Scalar> {
 public:
  void apply(const Vector<Scalar>& r, Vector<Scalar>& z) const override { z = r; }
  void apply_adjoint(const Vector<Scalar>& q, Vector<Scalar>& u) const override {
    u = q;
  }
  std::string name() const override { return "none"; }
};

/// Diagonal scaling. Diagonal entries that are missing or tiny relative to
/// ||A||_max are replaced by 1 so the solve keeps running; the number of
/// such replacements is reported for diagnostics.
template <typename Scalar>
class JacobiPreconditioner final : public Preconditioner<Scalar> {
 public:
  explicit JacobiPreconditioner(const CsrMatrix<Scalar>& A) {
    detail::require(A.rows() == A.cols(), "jacobi: matrix must be square");
    const RealOf<Scalar> floor =
        Eigen::NumTraits<RealOf<Scalar>>::epsilon() * max_norm(A);
    diag_ = Vector<Scalar>::Zero(A.rows());
    const Index* offsets = A.outerIndexPtr();
    const Index* cols = A.innerIndexPtr();
    const Scalar* vals = A.valuePtr();
    for (Index i = 0; i < A.rows(); ++i)
      for (Index p = offsets[i]; p < offsets[i + 1]; ++p)
        if (cols[p] == i) diag_[i] = vals[p];
    for (Index i = 0; i < diag_.size(); ++i) {
      if (Eigen::numext::abs(diag_[i]) <= floor) {
        diag_[i] = Scalar(1);
        ++replaced_;
      }
    }
  }

  void apply(const Vector<Scalar>& r, Vector<Scalar>& z) const override {
    detail::require(r.size() == diag_.size(), "jacobi: dimension mismatch");
    z = r.cwiseQuotient(diag_);
  }

  void apply_adjoint(const Vector<Scalar>& q, Vector<Scalar>& u) const override {
    detail::require(q.size() == diag_.size(), "jacobi: dimension mismatch");
    u = q.cwiseQuotient(diag_.conjugate());
  }

  std::string name() const override { return "jacobi"; }

  Index replaced_diagonals() const { return replaced_; }

 private:
  Vector<Scalar> diag_;
  Index replaced_ = 0;
};

template <typename Scalar>
std::unique_ptr<Preconditioner<Scalar>> identity_preconditioner() {
  return std::make_unique<IdentityPreconditioner<Scalar>>();
}

template <typename Scalar>
std::unique_ptr<Preconditioner<Scalar>> jacobi_preconditioner(const CsrMatrix<Scalar>& A) {
  return std::make_unique<JacobiPreconditioner<Scalar>>(A);
}

}  // namespace corsolve
