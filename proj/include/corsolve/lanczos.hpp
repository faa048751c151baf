#pragma once

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "corsolve/core.hpp"
#include "corsolve/tridiagonal.hpp"
#include "corsolve/types.hpp"

namespace corsolve {

enum class BreakdownKind {
  DeltaVanished,
  BetaVanished,
  InitialPairingFailed,
};

inline const char* to_string(BreakdownKind k) {
  switch (k) {
    case BreakdownKind::DeltaVanished: return "DeltaVanished";
    case BreakdownKind::BetaVanished: return "BetaVanished";
    case BreakdownKind::InitialPairingFailed: return "InitialPairingFailed";
  }
  return "?";
}

struct BreakdownInfo {
  Index step = 0;
  BreakdownKind kind = BreakdownKind::DeltaVanished;
  double magnitude = 0;  // |.| of the vanished quantity
};

/// Breakdown surfaced as an exception on paths that cannot return it as a
/// value (reference projection solves).
class BreakdownError : public Error {
 public:
  explicit BreakdownError(const BreakdownInfo& info)
      : Error(std::string("breakdown: ") + to_string(info.kind) + " at step " +
              std::to_string(info.step)),
        info(info) {}
  BreakdownInfo info;
};

/// Rolling state of the biconjugate A-orthonormalization recurrence.
///
/// Holds the active window (v_{j-1}, v_j, w_{j-1}, w_j), the scalar
/// sequences, and the cached products A v_{j-1} and A v_j that let one step
/// form A vhat_{j+1} from quantities already computed. The beta_1 = delta_1
/// = 0 sentinels live in beta_j/delta_j, never in the sequences.
template <typename Scalar>
struct LanczosState {
  using Real = RealOf<Scalar>;

  Index j = 0;  // accepted steps
  Vector<Scalar> v_prev, v_cur, w_prev, w_cur;
  std::vector<Scalar> alpha_seq;  // alpha_1..alpha_j
  std::vector<Scalar> beta_seq;   // beta_2..beta_{j+1}
  std::vector<Real> delta_seq;    // delta_2..delta_{j+1}, real nonnegative

  Scalar beta_j{};  // beta_j for the upcoming step (0 sentinel at start)
  Real delta_j{};   // delta_j for the upcoming step

  Vector<Scalar> av_prev;  // A v_{j-1}
  Vector<Scalar> av_cur;   // A v_j, valid only while av_cached
  bool av_cached = false;

  bool record_bases = false;
  std::vector<Vector<Scalar>> v_log, w_log;  // v_1..v_{j+1} when recording

  // Unnormalized candidates from the last step; on breakdown vhat is the
  // exact-termination residual direction.
  Vector<Scalar> vhat, what;

  /// Tridiagonal projection matrix over the accepted steps.
  TridiagonalMatrix<Scalar> projection_matrix() const {
    TridiagonalMatrix<Scalar> T;
    const Index k = j;
    T.diag.resize(k);
    T.sub.resize(k > 0 ? k - 1 : 0);
    T.super.resize(k > 0 ? k - 1 : 0);
    for (Index i = 0; i < k; ++i) T.diag[i] = alpha_seq[static_cast<std::size_t>(i)];
    for (Index i = 0; i + 1 < k; ++i) {
      T.sub[i] = Scalar(delta_seq[static_cast<std::size_t>(i)]);
      T.super[i] = beta_seq[static_cast<std::size_t>(i)];
    }
    return T;
  }
};

/// Seeds the pair sequences from a nonzero residual: v_1 = r0/||r0|| and
/// w_1 = A v_1 / ||A v_1||^2, which pairs to <w_1, A v_1> = 1 in both
/// scalar fields. Fails with InitialPairingFailed when A annihilates v_1.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
std::variant<LanczosState<Scalar>, BreakdownInfo> lanczos_init(
    const Matrix& A, const Vector<Scalar>& r0, bool record_bases = false) {
  using Real = RealOf<Scalar>;
  detail::require(A.rows() == A.cols() && A.cols() == r0.size(),
                  "lanczos_init: dimension mismatch");
  const Real r0_norm = norm2(r0);
  if (!(r0_norm > 0)) throw Error("lanczos_init: zero seed residual");

  LanczosState<Scalar> st;
  st.record_bases = record_bases;
  st.v_cur = r0 / Scalar(r0_norm);
  st.av_cur = matvec(A, st.v_cur);
  const Real pair_scale = st.av_cur.squaredNorm();
  if (!(pair_scale > std::numeric_limits<Real>::min()))
    return BreakdownInfo{0, BreakdownKind::InitialPairingFailed, pair_scale};
  st.w_cur = st.av_cur / Scalar(pair_scale);
  st.av_cached = true;
  st.v_prev = Vector<Scalar>::Zero(r0.size());
  st.w_prev = Vector<Scalar>::Zero(r0.size());
  st.av_prev = Vector<Scalar>::Zero(r0.size());
  if (record_bases) {
    st.v_log.push_back(st.v_cur);
    st.w_log.push_back(st.w_cur);
  }
  return st;
}

/// One step of the A-biorthonormalization recurrence. Appends alpha_j, then
/// extends the pair; reports breakdown when the new pairing degenerates,
/// either because vhat/what vanished (invariant subspace, the happy case
/// for a solver) or because the pairing angle collapsed while the vectors
/// stayed finite (the serious case). Costs 2 products by A and 1 by the
/// adjoint, with the init product standing in for the first one.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
std::optional<BreakdownInfo> lanczos_step(LanczosState<Scalar>& state, const Matrix& A) {
  using Real = RealOf<Scalar>;
  using Eigen::numext::conj;
  constexpr Real eps = Eigen::NumTraits<Real>::epsilon();

  const Index j = state.j + 1;
  Vector<Scalar> t1 = state.av_cached ? std::move(state.av_cur)
                                      : matvec(A, state.v_cur);
  state.av_cached = false;
  const Vector<Scalar> t2 = matvec(A, t1);

  const Scalar alpha = dot(state.w_cur, t2);
  state.alpha_seq.push_back(alpha);

  state.vhat = t1 - alpha * state.v_cur - state.beta_j * state.v_prev;
  Vector<Scalar> aw = matvec_adjoint(A, state.w_cur);
  state.what =
      aw - conj(alpha) * state.w_cur - Scalar(state.delta_j) * state.w_prev;
  const Vector<Scalar> avhat =
      t2 - alpha * t1 - state.beta_j * state.av_prev;

  const Real vhat_scale = norm2(t1) + Eigen::numext::abs(alpha) * norm2(state.v_cur) +
                          Eigen::numext::abs(state.beta_j) * norm2(state.v_prev);
  const Real what_scale = norm2(aw) + Eigen::numext::abs(alpha) * norm2(state.w_cur) +
                          state.delta_j * norm2(state.w_prev);

  const Scalar pairing = dot(state.what, avhat);
  const Real delta_next = std::sqrt(Eigen::numext::abs(pairing));

  // Invariant-subspace termination: the candidate itself collapsed.
  const Real drop_tol = std::pow(eps, Real(0.75));
  if (norm2(state.vhat) <= drop_tol * vhat_scale ||
      norm2(state.what) <= drop_tol * what_scale) {
    state.j = j;
    return BreakdownInfo{j, BreakdownKind::DeltaVanished, delta_next};
  }
  // Serious breakdown: pairing vanished with nonzero vectors.
  const Real pair_floor = std::sqrt(eps * norm2(avhat) * norm2(state.what));
  if (delta_next <= pair_floor) {
    state.j = j;
    return BreakdownInfo{j, BreakdownKind::DeltaVanished, delta_next};
  }
  const Scalar beta_next = pairing / Scalar(delta_next);
  if (Eigen::numext::abs(beta_next) <= pair_floor) {
    state.j = j;
    return BreakdownInfo{j, BreakdownKind::BetaVanished,
                         Eigen::numext::abs(beta_next)};
  }

  state.delta_seq.push_back(delta_next);
  state.beta_seq.push_back(beta_next);

  state.v_prev = std::move(state.v_cur);
  state.v_cur = state.vhat / Scalar(delta_next);
  state.w_prev = std::move(state.w_cur);
  state.w_cur = state.what / conj(beta_next);
  state.av_prev = std::move(t1);
  state.beta_j = beta_next;
  state.delta_j = delta_next;
  state.j = j;
  if (state.record_bases) {
    state.v_log.push_back(state.v_cur);
    state.w_log.push_back(state.w_cur);
  }
  return std::nullopt;
}

/// Result of running the procedure for up to m steps.
template <typename Scalar>
struct LanczosRun {
  using Real = RealOf<Scalar>;

  Index k = 0;                    // accepted steps, min(m, breakdown step)
  DenseMatrix<Scalar> V, W;       // n x k, only when bases were recorded
  TridiagonalMatrix<Scalar> T;    // k x k
  Real delta_next = 0;            // delta_{k+1}
  Scalar beta_next{};             // beta_{k+1}; zero on breakdown
  Vector<Scalar> v_next, w_next;  // empty on breakdown
  Vector<Scalar> vhat_next;       // unnormalized candidate, always present
  std::optional<BreakdownInfo> breakdown;
};

template <typename Matrix, typename Scalar = typename Matrix::Scalar>
LanczosRun<Scalar> lanczos_run(const Matrix& A, const Vector<Scalar>& r0, Index m,
                               bool record_bases = false) {
  detail::require(m >= 1, "lanczos_run: m must be at least 1");
  LanczosRun<Scalar> out;
  auto init = lanczos_init(A, r0, record_bases);
  if (std::holds_alternative<BreakdownInfo>(init)) {
    out.breakdown = std::get<BreakdownInfo>(init);
    return out;
  }
  LanczosState<Scalar>& st = std::get<LanczosState<Scalar>>(init);
  for (Index step = 0; step < m; ++step) {
    if (auto bd = lanczos_step(st, A)) {
      out.breakdown = *bd;
      break;
    }
  }
  out.k = st.j;
  out.T = st.projection_matrix();
  out.vhat_next = st.vhat;
  if (out.breakdown) {
    out.delta_next = out.breakdown->kind == BreakdownKind::DeltaVanished
                         ? RealOf<Scalar>(out.breakdown->magnitude)
                         : RealOf<Scalar>(0);
  } else {
    out.delta_next = st.delta_j;
    out.beta_next = st.beta_j;
    out.v_next = st.v_cur;
    out.w_next = st.w_cur;
  }
  if (record_bases) {
    const Index n = r0.size();
    out.V.resize(n, out.k);
    out.W.resize(n, out.k);
    for (Index c = 0; c < out.k; ++c) {
      out.V.col(c) = st.v_log[static_cast<std::size_t>(c)];
      out.W.col(c) = st.w_log[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

/// Frobenius-norm residuals of the four structural relations the procedure
/// guarantees: the right recurrence, the adjoint left recurrence, pairing
/// to the identity, and projection of A^2 onto T.
struct PropositionResiduals {
  double res_eq5 = 0;  // A V - V T - delta_{m+1} v_{m+1} e_m'
  double res_eq6 = 0;  // A' W - W T^H - conj(beta_{m+1}) w_{m+1} e_m'
  double res_eq7 = 0;  // W^H A V - I
  double res_eq8 = 0;  // W^H A^2 V - T
  double max() const {
    return std::max(std::max(res_eq5, res_eq6), std::max(res_eq7, res_eq8));
  }
};

template <typename Matrix, typename Scalar = typename Matrix::Scalar>
PropositionResiduals verify_proposition(
    const Matrix& A, const DenseMatrix<Scalar>& V, const DenseMatrix<Scalar>& W,
    const TridiagonalMatrix<Scalar>& T, RealOf<Scalar> delta_next,
    const Vector<Scalar>& v_next, Scalar beta_next, const Vector<Scalar>& w_next) {
  using Eigen::numext::conj;
  const Index m = V.cols();
  detail::require(W.cols() == m && T.size() == m && V.rows() == W.rows(),
                  "verify_proposition: dimension mismatch");
  detail::require(v_next.size() == V.rows() && w_next.size() == V.rows(),
                  "verify_proposition: next-vector length mismatch");
  const DenseMatrix<Scalar> Td = T.to_dense();

  DenseMatrix<Scalar> AV(V.rows(), m), AAV(V.rows(), m), AHW(V.rows(), m);
  for (Index c = 0; c < m; ++c) {
    AV.col(c) = matvec(A, Vector<Scalar>(V.col(c)));
    AAV.col(c) = matvec(A, Vector<Scalar>(AV.col(c)));
    AHW.col(c) = matvec_adjoint(A, Vector<Scalar>(W.col(c)));
  }

  DenseMatrix<Scalar> R5 = AV - V * Td;
  R5.col(m - 1) -= Scalar(delta_next) * v_next;
  DenseMatrix<Scalar> R6 = AHW - W * Td.adjoint();
  R6.col(m - 1) -= conj(beta_next) * w_next;
  const DenseMatrix<Scalar> R7 =
      W.adjoint() * AV - DenseMatrix<Scalar>::Identity(m, m);
  const DenseMatrix<Scalar> R8 = W.adjoint() * AAV - Td;

  PropositionResiduals out;
  out.res_eq5 = R5.norm();
  out.res_eq6 = R6.norm();
  out.res_eq7 = R7.norm();
  out.res_eq8 = R8.norm();
  return out;
}

template <typename Matrix, typename Scalar = typename Matrix::Scalar>
PropositionResiduals verify_proposition(const Matrix& A, const LanczosRun<Scalar>& run) {
  detail::require(!run.breakdown, "verify_proposition: run ended in breakdown");
  return verify_proposition(A, run.V, run.W, run.T, run.delta_next, run.v_next,
                            run.beta_next, run.w_next);
}

/// max |<w_i, A v_j> - delta_ij| over the recorded bases.
template <typename Matrix, typename Scalar = typename Matrix::Scalar>
RealOf<Scalar> biorthonormality_drift(const Matrix& A, const DenseMatrix<Scalar>& V,
                                      const DenseMatrix<Scalar>& W) {
  const Index m = V.cols();
  DenseMatrix<Scalar> AV(V.rows(), m);
  for (Index c = 0; c < m; ++c) AV.col(c) = matvec(A, Vector<Scalar>(V.col(c)));
  const DenseMatrix<Scalar> G =
      W.adjoint() * AV - DenseMatrix<Scalar>::Identity(m, m);
  return G.cwiseAbs().maxCoeff();
}

}  // namespace corsolve
