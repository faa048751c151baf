#pragma once

#include <chrono>
#include <cmath>

#include "corsolve/core.hpp"
#include "corsolve/precond.hpp"
#include "corsolve/solver_types.hpp"

namespace corsolve {

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

template <typename Scalar>
double finish_trr(const Vector<Scalar>& fresh_residual, RealOf<Scalar> r0_norm) {
  const RealOf<Scalar> r = norm2(fresh_residual);
  if (r == RealOf<Scalar>(0)) return -std::numeric_limits<double>::infinity();
  return std::log10(static_cast<double>(r / r0_norm));
}

}  // namespace detail

/// BiCOR: coupled two-term recurrences with one product by A and one by
/// the adjoint per iteration, left preconditioning, and the shadow seed
/// r0* = P(A) r0 with P in {t, 1}. Complex shadow updates carry conjugated
/// scalars so the biconjugate orthogonality survives the sesquilinear
/// pairing.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
SolveReport<Scalar> solve_bicor(const Matrix& A, const Vector<Scalar>& b,
                                const Vector<Scalar>& x0,
                                const Preconditioner<Scalar>& M,
                                const SolverConfig& cfg,
                                const IterationObserver<Scalar>& observer = {}) {
  using Real = RealOf<Scalar>;
  using Eigen::numext::abs;
  using Eigen::numext::conj;
  constexpr Real eps = Eigen::NumTraits<Real>::epsilon();

  detail::require(A.rows() == A.cols() && A.cols() == b.size() && b.size() == x0.size(),
                  "solve_bicor: dimension mismatch");
  if (!(cfg.tol > 0) || cfg.max_mv < 1)
    throw Error("solve_bicor: invalid configuration");

  const auto t0 = std::chrono::steady_clock::now();

  struct Workspace {
    Vector<Scalar> x, r, z, zs, s1, p, ps, q, us;
  };
  Workspace ws;
  static_assert(sizeof(Workspace) == 9 * sizeof(Vector<Scalar>));

  SolveReport<Scalar> report;
  report.aux_vectors = 9;

  ws.x = x0;
  if (x0.isZero(Real(0))) {
    ws.r = b;
  } else {
    ws.r = b - matvec(A, ws.x);
    ++report.mv_a;
  }
  const Real r0_norm = norm2(ws.r);
  if (r0_norm == Real(0)) {
    report.status = SolveStatus::Converged;
    report.trr = -std::numeric_limits<double>::infinity();
    report.x = std::move(ws.x);
    report.solve_seconds = detail::elapsed_ms(t0) / 1e3;
    return report;
  }

  // Shadow seed and its pairing guard <r0*, A r0>.
  ws.s1 = matvec(A, ws.r);
  ++report.mv_a;
  const Vector<Scalar>& rs0 = (cfg.shadow == Shadow::ARzero) ? ws.s1 : ws.r;
  const Scalar guard = dot(rs0, ws.s1);
  if (abs(guard) <= eps * norm2(rs0) * norm2(ws.s1)) {
    report.status = SolveStatus::Breakdown;
    report.breakdown = SolverBreakdown::ShadowDegenerate;
    report.trr = detail::finish_trr(ws.r, r0_norm);
    report.x = std::move(ws.x);
    report.solve_seconds = detail::elapsed_ms(t0) / 1e3;
    return report;
  }
  M.apply_adjoint(rs0, ws.zs);  // z*_0, the extra adjoint solve of step one

  Scalar rho_prev{};
  auto record = [&](double relres) {
    if (cfg.record_history)
      report.history.push_back(
          {report.iters, report.mv_total(), relres, detail::elapsed_ms(t0)});
  };

  while (true) {
    const std::int64_t j = report.iters + 1;
    M.apply(ws.r, ws.z);
    matvec(A, ws.z, ws.s1);  // zhat
    ++report.mv_a;
    const Scalar rho = dot(ws.zs, ws.s1);
    if (abs(rho) <= eps * norm2(ws.zs) * norm2(ws.s1)) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::Rho;
      report.breakdown_step = j;
      break;
    }
    if (j == 1) {
      ws.p = ws.z;
      ws.ps = ws.zs;
      ws.q = ws.s1;
    } else {
      const Scalar beta = rho / rho_prev;
      ws.p = ws.z + beta * ws.p;
      ws.ps = ws.zs + conj(beta) * ws.ps;
      ws.q = ws.s1 + beta * ws.q;
    }
    matvec_adjoint(A, ws.ps, ws.s1);  // qstar
    ++report.mv_adjoint;
    M.apply_adjoint(ws.s1, ws.us);
    const Scalar denom = dot(ws.us, ws.q);
    if (abs(denom) <= eps * norm2(ws.us) * norm2(ws.q)) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::AlphaDenominator;
      report.breakdown_step = j;
      break;
    }
    const Scalar alpha = rho / denom;
    ws.x += alpha * ws.p;
    ws.r -= alpha * ws.q;
    ws.zs -= conj(alpha) * ws.us;
    rho_prev = rho;
    report.iters = j;

    const double relres = static_cast<double>(norm2(ws.r) / r0_norm);
    record(relres);
    if (observer) {
      IterationView<Scalar> view;
      view.iter = j;
      view.x = &ws.x;
      view.r = &ws.r;
      view.z_shadow = &ws.zs;
      view.p = &ws.p;
      view.p_shadow = &ws.ps;
      view.q = &ws.q;
      view.q_shadow = &ws.s1;
      observer(view);
    }
    if (relres <= cfg.tol) {
      report.status = SolveStatus::Converged;
      break;
    }
    if (!std::isfinite(relres)) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::DivergenceDetected;
      report.breakdown_step = j;
      break;
    }
    if (report.mv_total() >= cfg.max_mv) {
      report.status = SolveStatus::MaxMvExceeded;
      break;
    }
  }

  report.solve_seconds = detail::elapsed_ms(t0) / 1e3;
  Vector<Scalar> fresh = b - matvec(A, ws.x);
  ++report.mv_a;
  report.trr = detail::finish_trr(fresh, r0_norm);
  report.x = std::move(ws.x);
  return report;
}

}  // namespace corsolve
