#pragma once

#include <chrono>
#include <cmath>

#include "corsolve/bicor.hpp"
#include "corsolve/core.hpp"
#include "corsolve/precond.hpp"
#include "corsolve/solver_types.hpp"

namespace corsolve {

/// Residual-overflow guard for the squared-polynomial recurrence.
inline constexpr double kDivergenceGuard = 1e12;

/// CORS: transpose-free variant obtained by squaring the residual
/// polynomial. Two products by A per iteration, none by the adjoint, and
/// the characteristic updates x += alpha (2 ze - alpha q~) and
/// r -= alpha (2 d - alpha q^). Squaring doubles the contraction per step
/// but can amplify rounding on irregular instances, hence the divergence
/// guard.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
SolveReport<Scalar> solve_cors(const Matrix& A, const Vector<Scalar>& b,
                               const Vector<Scalar>& x0,
                               const Preconditioner<Scalar>& M,
                               const SolverConfig& cfg,
                               const IterationObserver<Scalar>& observer = {}) {
  using Real = RealOf<Scalar>;
  using Eigen::numext::abs;
  constexpr Real eps = Eigen::NumTraits<Real>::epsilon();

  detail::require(A.rows() == A.cols() && A.cols() == b.size() && b.size() == x0.size(),
                  "solve_cors: dimension mismatch");
  if (!(cfg.tol > 0) || cfg.max_mv < 1)
    throw Error("solve_cors: invalid configuration");

  const auto t0 = std::chrono::steady_clock::now();

  struct Workspace {
    Vector<Scalar> x, r, rs, zq, s, e, ze, d, q, h, zh, f;
  };
  Workspace ws;
  static_assert(sizeof(Workspace) == 12 * sizeof(Vector<Scalar>));

  SolveReport<Scalar> report;
  report.aux_vectors = 12;

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

  ws.s = matvec(A, ws.r);
  ++report.mv_a;
  ws.rs = (cfg.shadow == Shadow::ARzero) ? ws.s : ws.r;
  const Scalar guard = dot(ws.rs, ws.s);
  if (abs(guard) <= eps * norm2(ws.rs) * norm2(ws.s)) {
    report.status = SolveStatus::Breakdown;
    report.breakdown = SolverBreakdown::ShadowDegenerate;
    report.trr = detail::finish_trr(ws.r, r0_norm);
    report.x = std::move(ws.x);
    report.solve_seconds = detail::elapsed_ms(t0) / 1e3;
    return report;
  }

  Scalar rho_prev{};
  while (true) {
    const std::int64_t j = report.iters + 1;
    M.apply(ws.r, ws.zq);  // z_{j-1}
    matvec(A, ws.zq, ws.s);  // rhat
    ++report.mv_a;
    const Scalar rho = dot(ws.rs, ws.s);
    if (abs(rho) <= eps * norm2(ws.rs) * norm2(ws.s)) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::Rho;
      report.breakdown_step = j;
      break;
    }
    if (j == 1) {
      ws.e = ws.r;    // e_0 = r_0
      ws.ze = ws.zq;  // same preconditioner solve as z_0
      ws.d = ws.s;
      ws.q = ws.s;
    } else {
      const Scalar beta = rho / rho_prev;
      ws.e = ws.r + beta * ws.h;
      ws.ze = ws.zq + beta * ws.zh;
      ws.d = ws.s + beta * ws.f;
      ws.q = ws.d + beta * (ws.f + beta * ws.q);
    }
    M.apply(ws.q, ws.zq);  // q~ reuses the z buffer
    matvec(A, ws.zq, ws.s);  // qhat reuses the rhat buffer
    ++report.mv_a;
    const Scalar denom = dot(ws.rs, ws.s);
    if (abs(denom) <= eps * norm2(ws.rs) * norm2(ws.s)) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::AlphaDenominator;
      report.breakdown_step = j;
      break;
    }
    const Scalar alpha = rho / denom;
    ws.h = ws.e - alpha * ws.q;
    ws.zh = ws.ze - alpha * ws.zq;
    ws.f = ws.d - alpha * ws.s;
    ws.x += alpha * (Scalar(2) * ws.ze - alpha * ws.zq);
    ws.r -= alpha * (Scalar(2) * ws.d - alpha * ws.s);
    rho_prev = rho;
    report.iters = j;

    const double relres = static_cast<double>(norm2(ws.r) / r0_norm);
    if (cfg.record_history)
      report.history.push_back(
          {report.iters, report.mv_total(), relres, detail::elapsed_ms(t0)});
    if (observer) {
      IterationView<Scalar> view;
      view.iter = j;
      view.x = &ws.x;
      view.r = &ws.r;
      observer(view);
    }
    if (relres <= cfg.tol) {
      report.status = SolveStatus::Converged;
      break;
    }
    if (!std::isfinite(relres) || relres > kDivergenceGuard) {
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
