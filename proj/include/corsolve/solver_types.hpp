#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "corsolve/lanczos.hpp"
#include "corsolve/types.hpp"

namespace corsolve {

/// Seed of the dual Krylov space: P(A) r0 with P(t) = t or P(t) = 1.
enum class Shadow { ARzero, Rzero };

inline const char* to_string(Shadow s) {
  return s == Shadow::ARzero ? "Ar0" : "r0";
}

enum class SolveStatus { Converged, MaxMvExceeded, Breakdown };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxMvExceeded: return "MaxMvExceeded";
    case SolveStatus::Breakdown: return "Breakdown";
  }
  return "?";
}

/// Breakdown kinds specific to the coupled two-term recurrences; Lanczos
/// kinds are carried through unchanged when a projection solve fails.
enum class SolverBreakdown {
  None,
  Rho,                // <z*, A z> (or <r0*, A z>) vanished: method fails
  AlphaDenominator,   // direction pairing vanished
  ShadowDegenerate,   // <r0*, A r0> below threshold at setup
  PivotBreakdown,     // tridiagonal LU hit a zero pivot
  Lanczos,            // underlying procedure broke down unconverged
  Omega,              // stabilization scalar vanished (baseline solver)
  DivergenceDetected  // residual overflow guard tripped
};

inline const char* to_string(SolverBreakdown b) {
  switch (b) {
    case SolverBreakdown::None: return "None";
    case SolverBreakdown::Rho: return "Rho";
    case SolverBreakdown::AlphaDenominator: return "AlphaDenominator";
    case SolverBreakdown::ShadowDegenerate: return "ShadowDegenerate";
    case SolverBreakdown::PivotBreakdown: return "PivotBreakdown";
    case SolverBreakdown::Lanczos: return "Lanczos";
    case SolverBreakdown::Omega: return "Omega";
    case SolverBreakdown::DivergenceDetected: return "DivergenceDetected";
  }
  return "?";
}

struct SolverConfig {
  double tol = 1e-8;            // relative residual reduction target
  std::int64_t max_mv = 10000;  // budget on products by A plus adjoint
  Shadow shadow = Shadow::ARzero;
  bool record_history = true;
};

struct HistoryEntry {
  std::int64_t iter = 0;
  std::int64_t mv_total = 0;
  double relres = 0;
  double elapsed_ms = 0;
};

template <typename Scalar>
struct SolveReport {
  Vector<Scalar> x;
  SolveStatus status = SolveStatus::MaxMvExceeded;
  SolverBreakdown breakdown = SolverBreakdown::None;
  Index breakdown_step = 0;
  std::int64_t iters = 0;
  std::int64_t mv_a = 0;        // products by A, setup and exit checks included
  std::int64_t mv_adjoint = 0;  // products by the adjoint
  std::vector<HistoryEntry> history;
  double trr = 0;  // log10 ||b - A x||/||r0||, recomputed from scratch at exit
  double solve_seconds = 0;
  int aux_vectors = 0;  // n-vectors owned by the solver, solution included

  std::int64_t mv_total() const { return mv_a + mv_adjoint; }
};

/// Optional per-iteration observer. Solvers expose their live vectors so
/// property tests can check orthogonality relations without re-deriving
/// the recurrence; entries may alias solver storage and must be copied if
/// kept.
template <typename Scalar>
struct IterationView {
  std::int64_t iter = 0;
  const Vector<Scalar>* x = nullptr;
  const Vector<Scalar>* r = nullptr;
  const Vector<Scalar>* z_shadow = nullptr;  // z*_j (= r*_j when M = I)
  const Vector<Scalar>* p = nullptr;
  const Vector<Scalar>* p_shadow = nullptr;
  const Vector<Scalar>* q = nullptr;         // A p_j (plus preconditioning)
  const Vector<Scalar>* q_shadow = nullptr;  // A' p*_j
};

template <typename Scalar>
using IterationObserver = std::function<void(const IterationView<Scalar>&)>;

}  // namespace corsolve
