#pragma once

#include <chrono>
#include <cmath>

#include "corsolve/bicor.hpp"
#include "corsolve/core.hpp"
#include "corsolve/lanczos.hpp"
#include "corsolve/solver_types.hpp"
#include "corsolve/tridiagonal.hpp"

namespace corsolve {

/// Seeds the recurrence from an explicit pair. The pairing <w1, A v1> is
/// normalized into v1, so callers only need it nonzero.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
std::variant<LanczosState<Scalar>, BreakdownInfo> lanczos_init_pair(
    const Matrix& A, Vector<Scalar> v1, const Vector<Scalar>& w1,
    bool record_bases = false) {
  using Real = RealOf<Scalar>;
  detail::require(A.rows() == A.cols() && A.cols() == v1.size() && v1.size() == w1.size(),
                  "lanczos_init_pair: dimension mismatch");
  Vector<Scalar> av1 = matvec(A, v1);
  const Scalar pairing = dot(w1, av1);
  if (!(Eigen::numext::abs(pairing) > std::numeric_limits<Real>::min()))
    return BreakdownInfo{0, BreakdownKind::InitialPairingFailed,
                         Eigen::numext::abs(pairing)};
  v1 /= pairing;
  av1 /= pairing;
  LanczosState<Scalar> st;
  st.record_bases = record_bases;
  st.v_cur = std::move(v1);
  st.w_cur = w1;
  st.av_cur = std::move(av1);
  st.av_cached = true;
  st.v_prev = Vector<Scalar>::Zero(w1.size());
  st.w_prev = Vector<Scalar>::Zero(w1.size());
  st.av_prev = Vector<Scalar>::Zero(w1.size());
  if (record_bases) {
    st.v_log.push_back(st.v_cur);
    st.w_log.push_back(st.w_cur);
  }
  return st;
}

template <typename Scalar>
struct ProjectionSolution {
  Vector<Scalar> x;
  Vector<Scalar> y;  // tridiagonal-system coefficients
  RealOf<Scalar> recursive_residual_norm = 0;
  Index m_used = 0;
};

namespace detail {

template <typename Scalar>
Vector<Scalar> scaled_e1(Index m, RealOf<Scalar> beta) {
  Vector<Scalar> e = Vector<Scalar>::Zero(m);
  e[0] = Scalar(beta);
  return e;
}

}  // namespace detail

/// Projects A x = b onto the m-step pair of Krylov spaces: runs the
/// biorthonormalization from r0 = b - A x0, solves T_m y = ||r0|| e_1
/// through the bidiagonal factors, and forms x = x0 + V_m y. The residual
/// comes for free as -(e_m' y) vhat_{m+1}. A vanished pairing with a small
/// residual is exact termination and returns success; with a large one it
/// is a serious breakdown and throws.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
ProjectionSolution<Scalar> solve_projection(const Matrix& A, const Vector<Scalar>& b,
                                            const Vector<Scalar>& x0, Index m,
                                            double happy_tol = 1e-8) {
  using Real = RealOf<Scalar>;
  detail::require(m >= 1, "solve_projection: m must be at least 1");
  Vector<Scalar> r0 = x0.isZero(Real(0)) ? b : Vector<Scalar>(b - matvec(A, x0));
  const Real beta = norm2(r0);
  if (!(beta > 0)) throw Error("solve_projection: zero initial residual");

  const LanczosRun<Scalar> run = lanczos_run(A, r0, m, /*record_bases=*/true);
  if (run.k == 0) throw BreakdownError(*run.breakdown);

  const TriLU<Scalar> f = lu_tridiag(run.T);
  ProjectionSolution<Scalar> sol;
  sol.y = trilu_solve(f, detail::scaled_e1<Scalar>(run.k, beta));
  sol.x = x0 + run.V * sol.y;
  sol.m_used = run.k;
  sol.recursive_residual_norm =
      Eigen::numext::abs(sol.y[run.k - 1]) * norm2(run.vhat_next);
  if (run.breakdown && sol.recursive_residual_norm > happy_tol * beta)
    throw BreakdownError(*run.breakdown);
  return sol;
}

/// Mirror of solve_projection for the dual system A' x* = b*: the left
/// seed is the normalized dual residual and the right seed mirrors the
/// primal recipe, v1 = A' w1 / ||A' w1||^2. Solves T' y* = ||r0*|| e_1 with
/// the same factors.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
ProjectionSolution<Scalar> solve_projection_dual(const Matrix& A,
                                                 const Vector<Scalar>& b_star,
                                                 const Vector<Scalar>& x0_star, Index m,
                                                 double happy_tol = 1e-8) {
  using Real = RealOf<Scalar>;
  detail::require(m >= 1, "solve_projection_dual: m must be at least 1");
  Vector<Scalar> r0 = x0_star.isZero(Real(0))
                          ? b_star
                          : Vector<Scalar>(b_star - matvec_adjoint(A, x0_star));
  const Real beta_star = norm2(r0);
  if (!(beta_star > 0)) throw Error("solve_projection_dual: zero initial residual");

  const Vector<Scalar> w1 = r0 / Scalar(beta_star);
  Vector<Scalar> u = matvec_adjoint(A, w1);
  const Real u2 = u.squaredNorm();
  if (!(u2 > std::numeric_limits<Real>::min()))
    throw BreakdownError({0, BreakdownKind::InitialPairingFailed, u2});
  auto init = lanczos_init_pair(A, Vector<Scalar>(u / Scalar(u2)), w1,
                                /*record_bases=*/true);
  if (std::holds_alternative<BreakdownInfo>(init))
    throw BreakdownError(std::get<BreakdownInfo>(init));
  LanczosState<Scalar>& st = std::get<LanczosState<Scalar>>(init);
  std::optional<BreakdownInfo> breakdown;
  for (Index step = 0; step < m; ++step) {
    if (auto bd = lanczos_step(st, A)) {
      breakdown = *bd;
      break;
    }
  }
  const Index k = st.j;
  const TriLU<Scalar> f = lu_tridiag(st.projection_matrix());
  ProjectionSolution<Scalar> sol;
  sol.y = trilu_solve_adjoint(f, detail::scaled_e1<Scalar>(k, beta_star));
  sol.m_used = k;
  DenseMatrix<Scalar> W(b_star.size(), k);
  for (Index c = 0; c < k; ++c) W.col(c) = st.w_log[static_cast<std::size_t>(c)];
  sol.x = x0_star + W * sol.y;
  sol.recursive_residual_norm =
      Eigen::numext::abs(sol.y[k - 1]) * norm2(st.what);
  if (breakdown && sol.recursive_residual_norm > happy_tol * beta_star)
    throw BreakdownError(*breakdown);
  return sol;
}

/// Consistency check of the progressive LU update: builds the primary and
/// dual direction columns P = V U^{-1}, P* = W L^{-H} recursively,
/// accumulates x through the zeta coefficients, and returns the larger of
/// the disagreement with the direct solve and the deviation of P, P* from
/// biconjugate A^2-orthonormality.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
RealOf<Scalar> progressive_update_check(const Matrix& A, const Vector<Scalar>& b,
                                        const Vector<Scalar>& x0, Index m) {
  using Real = RealOf<Scalar>;
  using Eigen::numext::conj;
  Vector<Scalar> r0 = x0.isZero(Real(0)) ? b : Vector<Scalar>(b - matvec(A, x0));
  const Real beta = norm2(r0);
  if (!(beta > 0)) throw Error("progressive_update_check: zero initial residual");

  const LanczosRun<Scalar> run = lanczos_run(A, r0, m, /*record_bases=*/true);
  // A vanished extension at exactly step m leaves T_m, V_m, W_m complete.
  if (run.k < m) throw BreakdownError(*run.breakdown);
  const TriLU<Scalar> f = lu_tridiag(run.T);

  const Vector<Scalar> y = trilu_solve(f, detail::scaled_e1<Scalar>(m, beta));
  const Vector<Scalar> x_direct = x0 + run.V * y;

  DenseMatrix<Scalar> P(b.size(), m), Ps(b.size(), m);
  Vector<Scalar> x_prog = x0;
  Scalar zeta{};
  for (Index k = 0; k < m; ++k) {
    if (k == 0) {
      P.col(0) = run.V.col(0) / f.u[0];
      Ps.col(0) = run.W.col(0);
      zeta = Scalar(beta);
    } else {
      P.col(k) = (run.V.col(k) - f.super[k - 1] * P.col(k - 1)) / f.u[k];
      Ps.col(k) = run.W.col(k) - conj(f.l[k - 1]) * Ps.col(k - 1);
      zeta = -f.l[k - 1] * zeta;
    }
    x_prog += zeta * P.col(k);
  }

  const Real diff_x = (x_prog - x_direct).template lpNorm<Eigen::Infinity>();

  DenseMatrix<Scalar> AAP(b.size(), m);
  for (Index c = 0; c < m; ++c)
    AAP.col(c) = matvec(A, matvec(A, Vector<Scalar>(P.col(c))));
  const DenseMatrix<Scalar> G =
      Ps.adjoint() * AAP - DenseMatrix<Scalar>::Identity(m, m);
  return std::max(diff_x, G.cwiseAbs().maxCoeff());
}

/// Restart-from-current-x driver that makes the projection method usable
/// as a solver under the common stopping rule: cycles of m steps, x0 fed
/// forward, until the residual target or the matvec budget is hit.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
SolveReport<Scalar> solve_projection_restarted(const Matrix& A, const Vector<Scalar>& b,
                                               const Vector<Scalar>& x0, Index m,
                                               const SolverConfig& cfg) {
  using Real = RealOf<Scalar>;
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport<Scalar> report;
  report.x = x0;

  Vector<Scalar> r = x0.isZero(Real(0)) ? b : Vector<Scalar>(b - matvec(A, x0));
  const Real r0_norm = norm2(r);
  if (r0_norm == Real(0)) {
    report.status = SolveStatus::Converged;
    report.trr = -std::numeric_limits<double>::infinity();
    return report;
  }

  while (true) {
    bool x_zero = report.x.isZero(Real(0));
    try {
      ProjectionSolution<Scalar> sol =
          solve_projection(A, b, report.x, m, cfg.tol);
      report.x = std::move(sol.x);
      report.iters += sol.m_used;
      report.mv_a += 2 * sol.m_used + (x_zero ? 0 : 1);
      report.mv_adjoint += sol.m_used;
      const double relres =
          static_cast<double>(sol.recursive_residual_norm / r0_norm);
      if (cfg.record_history)
        report.history.push_back(
            {report.iters, report.mv_total(), relres, detail::elapsed_ms(t0)});
      if (relres <= cfg.tol) {
        report.status = SolveStatus::Converged;
        break;
      }
      if (report.mv_total() >= cfg.max_mv) {
        report.status = SolveStatus::MaxMvExceeded;
        break;
      }
    } catch (const BreakdownError& e) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::Lanczos;
      report.breakdown_step = e.info.step;
      break;
    } catch (const SingularMatrixError&) {
      report.status = SolveStatus::Breakdown;
      report.breakdown = SolverBreakdown::PivotBreakdown;
      break;
    }
  }

  report.solve_seconds = detail::elapsed_ms(t0) / 1e3;
  Vector<Scalar> fresh = b - matvec(A, report.x);
  ++report.mv_a;
  report.trr = detail::finish_trr(fresh, r0_norm);
  return report;
}

}  // namespace corsolve
