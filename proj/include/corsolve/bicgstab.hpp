#pragma once

#include <chrono>
#include <cmath>

#include "corsolve/bicor.hpp"
#include "corsolve/core.hpp"
#include "corsolve/precond.hpp"
#include "corsolve/solver_types.hpp"

namespace corsolve {

/// Plain left-preconditioned BiCGSTAB, shipped as a comparison baseline.
/// Two products by A per iteration; an iteration always counts as one full
/// pass even when the halfway residual s already meets the target.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
SolveReport<Scalar> solve_bicgstab(const Matrix& A, const Vector<Scalar>& b,
                                   const Vector<Scalar>& x0,
                                   const Preconditioner<Scalar>& M,
                                   const SolverConfig& cfg) {
  using Real = RealOf<Scalar>;
  using Eigen::numext::abs;
  constexpr Real eps = Eigen::NumTraits<Real>::epsilon();

  detail::require(A.rows() == A.cols() && A.cols() == b.size() && b.size() == x0.size(),
                  "solve_bicgstab: dimension mismatch");
  if (!(cfg.tol > 0) || cfg.max_mv < 1)
    throw Error("solve_bicgstab: invalid configuration");

  const auto t0 = std::chrono::steady_clock::now();

  struct Workspace {
    Vector<Scalar> x, r, rt, p, phat, v, s, shat, t;
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
    return report;
  }
  ws.rt = ws.r;

  Scalar rho_prev{}, alpha{}, omega{};
  while (true) {
    const std::int64_t j = report.iters + 1;
    const Scalar rho = dot(ws.rt, ws.r);
    if (abs(rho) <= eps * norm2(ws.rt) * norm2(ws.r)) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::Rho;
      report.breakdown_step = j;
      break;
    }
    if (j == 1) {
      ws.p = ws.r;
    } else {
      const Scalar beta = (rho / rho_prev) * (alpha / omega);
      ws.p = ws.r + beta * (ws.p - omega * ws.v);
    }
    M.apply(ws.p, ws.phat);
    matvec(A, ws.phat, ws.v);
    ++report.mv_a;
    const Scalar gamma = dot(ws.rt, ws.v);
    if (abs(gamma) <= eps * norm2(ws.rt) * norm2(ws.v)) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::AlphaDenominator;
      report.breakdown_step = j;
      break;
    }
    alpha = rho / gamma;
    ws.s = ws.r - alpha * ws.v;
    if (static_cast<double>(norm2(ws.s) / r0_norm) <= cfg.tol) {
      ws.x += alpha * ws.phat;
      ws.r = ws.s;
      report.iters = j;
      if (cfg.record_history)
        report.history.push_back({j, report.mv_total(),
                                  static_cast<double>(norm2(ws.r) / r0_norm),
                                  detail::elapsed_ms(t0)});
      report.status = SolveStatus::Converged;
      break;
    }
    M.apply(ws.s, ws.shat);
    matvec(A, ws.shat, ws.t);
    ++report.mv_a;
    const Real tt = ws.t.squaredNorm();
    if (!(tt > 0)) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::Omega;
      report.breakdown_step = j;
      break;
    }
    omega = dot(ws.t, ws.s) / Scalar(tt);
    ws.x += alpha * ws.phat + omega * ws.shat;
    ws.r = ws.s - omega * ws.t;
    rho_prev = rho;
    report.iters = j;

    const double relres = static_cast<double>(norm2(ws.r) / r0_norm);
    if (cfg.record_history)
      report.history.push_back(
          {j, report.mv_total(), relres, detail::elapsed_ms(t0)});
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
    if (abs(omega) <= eps * (abs(alpha) + abs(omega))) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::Omega;
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
