#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "corsolve/bicgstab.hpp"
#include "corsolve/bicor.hpp"
#include "corsolve/cors.hpp"
#include "corsolve/matrix_market.hpp"
#include "corsolve/precond.hpp"
#include "corsolve/projection.hpp"
#include "corsolve/testkit.hpp"

namespace corsolve {
namespace harness {

// --- problem sources ------------------------------------------------------

struct ConvectionDiffusion2D {
  Index nx = 16, ny = 16;
  double peclet = 0;
  bool operator==(const ConvectionDiffusion2D&) const = default;
};

struct DiagonalSpectrum {
  std::vector<double> eigs;
  bool operator==(const DiagonalSpectrum&) const = default;
};

struct RandomWellConditioned {
  Index n = 100;
  std::uint64_t seed = 1;
  bool operator==(const RandomWellConditioned&) const = default;
};

struct ComplexShifted {
  Index nx = 16, ny = 16;
  double peclet = 0;
  double shift = 1;
  bool operator==(const ComplexShifted&) const = default;
};

using ProblemFamily = std::variant<ConvectionDiffusion2D, DiagonalSpectrum,
                                   RandomWellConditioned, ComplexShifted>;

struct MatrixMarketFile {
  std::string path;
  bool operator==(const MatrixMarketFile&) const = default;
};

struct Generated {
  ProblemFamily family;
  bool operator==(const Generated&) const = default;
};

using MatrixSource = std::variant<MatrixMarketFile, Generated>;

struct AllOnesSolution {
  bool operator==(const AllOnesSolution&) const = default;
};

struct RhsFromFile {
  std::string path;
  bool operator==(const RhsFromFile&) const = default;
};

using RhsSpec = std::variant<AllOnesSolution, RhsFromFile>;

enum class SolverKind { BiCOR, CORS, Projection, Bicgstab };
enum class PrecondKind { None, Jacobi };

struct SolverChoice {
  SolverKind kind = SolverKind::BiCOR;
  Index projection_m = 10;  // restart length for the projection solver
  bool operator==(const SolverChoice&) const = default;
};

inline std::string solver_name(const SolverChoice& s) {
  switch (s.kind) {
    case SolverKind::BiCOR: return "bicor";
    case SolverKind::CORS: return "cors";
    case SolverKind::Projection:
      return "projection:" + std::to_string(s.projection_m);
    case SolverKind::Bicgstab: return "bicgstab";
  }
  return "?";
}

/// One benchmark run. Defaults mirror the usual protocol: tol 1e-8, matvec
/// budget 10000, zero initial guess, b = A e so the exact solution is the
/// all-ones vector.
struct RunConfig {
  MatrixSource matrix_source;
  RhsSpec rhs = AllOnesSolution{};
  SolverChoice solver;
  PrecondKind precond = PrecondKind::None;
  Shadow shadow = Shadow::ARzero;
  double tol = 1e-8;
  std::int64_t max_mv = 10000;
  std::string history_path;  // empty: no history file
  std::uint64_t seed = 1;    // default seed for generated families
};

struct ComparisonRow {
  std::string solver_name;
  std::int64_t iters = 0;
  double cpu_seconds = 0;
  double trr = 0;
  SolveStatus status = SolveStatus::MaxMvExceeded;
  SolverBreakdown breakdown = SolverBreakdown::None;
};

struct RunResult {
  ComparisonRow row;
  std::string note;  // diagnostics, e.g. Jacobi diagonal fallbacks
};

// --- building blocks ------------------------------------------------------

inline bool wants_complex(const MatrixSource& src) {
  if (const auto* f = std::get_if<MatrixMarketFile>(&src))
    return mm::read_banner(f->path).field == mm::Field::Complex;
  return std::holds_alternative<ComplexShifted>(std::get<Generated>(src).family);
}

template <typename Scalar>
CsrMatrix<Scalar> load_matrix(const MatrixSource& src) {
  if (const auto* f = std::get_if<MatrixMarketFile>(&src))
    return mm::read_matrix_market<Scalar>(f->path);
  const ProblemFamily& fam = std::get<Generated>(src).family;
  if constexpr (is_complex_v<Scalar>) {
    if (const auto* c = std::get_if<ComplexShifted>(&fam))
      return gen_complex_shifted(c->nx, c->ny, c->peclet, c->shift);
    throw InputError("complex run requested from a real problem family");
  } else {
    if (const auto* cd = std::get_if<ConvectionDiffusion2D>(&fam))
      return gen_convection_diffusion(cd->nx, cd->ny, cd->peclet);
    if (const auto* d = std::get_if<DiagonalSpectrum>(&fam)) {
      std::vector<Scalar> eigs(d->eigs.begin(), d->eigs.end());
      return gen_diagonal<Scalar>(eigs);
    }
    if (const auto* r = std::get_if<RandomWellConditioned>(&fam))
      return gen_random_well_conditioned(r->n, r->seed);
    throw InputError("real run requested from a complex problem family");
  }
}

/// b = A e for the constructed-solution protocol, or a vector file.
template <typename Scalar>
Vector<Scalar> build_rhs(const CsrMatrix<Scalar>& A, const RhsSpec& spec) {
  if (std::holds_alternative<AllOnesSolution>(spec))
    return matvec(A, Vector<Scalar>(Vector<Scalar>::Ones(A.cols())));
  const auto& file = std::get<RhsFromFile>(spec);
  Vector<Scalar> b = mm::read_vector<Scalar>(file.path);
  if (b.size() != A.rows())
    throw InputError(file.path + ": right-hand side length does not match the matrix");
  return b;
}

inline void write_history_csv(const std::string& path,
                              const std::vector<HistoryEntry>& history) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InputError(path + ": cannot open file for writing");
  std::fprintf(f, "iter,mv_total,relres,elapsed_ms\n");
  for (const auto& h : history)
    std::fprintf(f, "%lld,%lld,%.17g,%.3f\n", static_cast<long long>(h.iter),
                 static_cast<long long>(h.mv_total), h.relres, h.elapsed_ms);
  std::fclose(f);
}

template <typename Scalar>
RunResult run_typed(const CsrMatrix<Scalar>& A, const RunConfig& cfg) {
  if (A.rows() != A.cols()) throw InputError("matrix must be square");
  const Vector<Scalar> b = build_rhs(A, cfg.rhs);
  const Vector<Scalar> x0 = Vector<Scalar>::Zero(A.cols());

  std::unique_ptr<Preconditioner<Scalar>> M;
  std::string note;
  if (cfg.precond == PrecondKind::Jacobi) {
    auto jacobi = std::make_unique<JacobiPreconditioner<Scalar>>(A);
    if (jacobi->replaced_diagonals() > 0)
      note = "jacobi: replaced " + std::to_string(jacobi->replaced_diagonals()) +
             " missing/tiny diagonal entries by 1";
    M = std::move(jacobi);
  } else {
    M = identity_preconditioner<Scalar>();
  }

  SolverConfig scfg;
  scfg.tol = cfg.tol;
  scfg.max_mv = cfg.max_mv;
  scfg.shadow = cfg.shadow;
  scfg.record_history = true;

  SolveReport<Scalar> report;
  switch (cfg.solver.kind) {
    case SolverKind::BiCOR: report = solve_bicor(A, b, x0, *M, scfg); break;
    case SolverKind::CORS: report = solve_cors(A, b, x0, *M, scfg); break;
    case SolverKind::Projection:
      report = solve_projection_restarted(A, b, x0, cfg.solver.projection_m, scfg);
      break;
    case SolverKind::Bicgstab: report = solve_bicgstab(A, b, x0, *M, scfg); break;
  }

  if (!cfg.history_path.empty()) write_history_csv(cfg.history_path, report.history);

  RunResult out;
  out.note = std::move(note);
  out.row.solver_name = solver_name(cfg.solver);
  out.row.iters = report.iters;
  out.row.cpu_seconds = report.solve_seconds;
  out.row.trr = report.trr;
  out.row.status = report.status;
  out.row.breakdown = report.breakdown;
  return out;
}

inline RunResult run(const RunConfig& cfg) {
  if (wants_complex(cfg.matrix_source)) {
    const auto A = load_matrix<std::complex<double>>(cfg.matrix_source);
    return run_typed(A, cfg);
  }
  const auto A = load_matrix<double>(cfg.matrix_source);
  return run_typed(A, cfg);
}

// --- comparison tables ----------------------------------------------------

struct CompareResult {
  std::vector<ComparisonRow> rows;
  std::vector<std::string> notes;
};

/// Runs every config against the shared matrix and right-hand side. All
/// configs must agree on both; the matrix is loaded once.
inline CompareResult compare(const std::vector<RunConfig>& configs) {
  if (configs.empty()) throw InputError("compare: no runs requested");
  for (const auto& c : configs) {
    if (!(c.matrix_source == configs.front().matrix_source))
      throw InputError("compare: all runs must share the matrix");
    if (!(c.rhs == configs.front().rhs))
      throw InputError("compare: all runs must share the right-hand side");
  }
  CompareResult out;
  const bool cplx = wants_complex(configs.front().matrix_source);
  if (cplx) {
    const auto A = load_matrix<std::complex<double>>(configs.front().matrix_source);
    for (const auto& c : configs) {
      RunResult r = run_typed(A, c);
      out.rows.push_back(std::move(r.row));
      if (!r.note.empty()) out.notes.push_back(r.note);
    }
  } else {
    const auto A = load_matrix<double>(configs.front().matrix_source);
    for (const auto& c : configs) {
      RunResult r = run_typed(A, c);
      out.rows.push_back(std::move(r.row));
      if (!r.note.empty()) out.notes.push_back(r.note);
    }
  }
  return out;
}

/// Aligned text table in the Method/Iters/CPU/TRR layout. Iters shows '-'
/// for runs that did not converge; '*' marks the fastest converged run.
inline std::string render_table(const std::vector<ComparisonRow>& rows) {
  int fastest = -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].status != SolveStatus::Converged) continue;
    if (fastest < 0 || rows[i].cpu_seconds <
                           rows[static_cast<std::size_t>(fastest)].cpu_seconds)
      fastest = static_cast<int>(i);
  }
  std::string text;
  char buf[160];
  std::snprintf(buf, sizeof buf, "  %-16s %8s %10s %10s  %s\n", "Method", "Iters",
                "CPU", "TRR", "Status");
  text += buf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ComparisonRow& r = rows[i];
    std::string iters = r.status == SolveStatus::Converged
                            ? std::to_string(r.iters)
                            : std::string("-");
    std::string status = to_string(r.status);
    if (r.status == SolveStatus::Breakdown)
      status += std::string("(") + to_string(r.breakdown) + ")";
    std::snprintf(buf, sizeof buf, "%s %-16s %8s %10.3f %10.4f  %s\n",
                  static_cast<int>(i) == fastest ? "*" : " ", r.solver_name.c_str(),
                  iters.c_str(), r.cpu_seconds, r.trr, status.c_str());
    text += buf;
  }
  return text;
}

inline std::string render_csv(const std::vector<ComparisonRow>& rows) {
  std::string text = "solver,iters,cpu_seconds,trr,status\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%lld,%.6f,%.17g,%s\n", r.solver_name.c_str(),
                  static_cast<long long>(r.iters), r.cpu_seconds, r.trr,
                  to_string(r.status));
    text += buf;
  }
  return text;
}

/// Process exit code contract: 0 converged, 2 budget exhausted, 3 breakdown
/// (input errors map to 4 at the CLI boundary).
inline int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return 0;
    case SolveStatus::MaxMvExceeded: return 2;
    case SolveStatus::Breakdown: return 3;
  }
  return 3;
}

}  // namespace harness
}  // namespace corsolve
