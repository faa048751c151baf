// Command-line front end: solve a system once, compare solvers on one
// system, or verify the structural relations of the orthonormalization
// procedure on a matrix.
//
// Exit codes for solve/compare: 0 converged, 2 matvec budget exceeded,
// 3 breakdown, 4 input error. verify exits 0 when every relation holds at
// tolerance, 1 otherwise.

#include <complex>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corsolve/corsolve.hpp"

namespace {

using namespace corsolve;
using harness::RunConfig;

std::vector<double> parse_numbers(const std::string& csv, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError(what + ": cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) throw InputError(what + ": no parameters given");
  return out;
}

harness::ProblemFamily parse_family(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw InputError("--generate expects <family>:<params>, got '" + spec + "'");
  const std::string family = spec.substr(0, colon);
  const std::string params = spec.substr(colon + 1);
  const std::vector<double> p = parse_numbers(params, "--generate " + family);
  if (family == "cd2d") {
    if (p.size() != 3) throw InputError("cd2d expects nx,ny,peclet");
    return harness::ConvectionDiffusion2D{static_cast<Index>(p[0]),
                                          static_cast<Index>(p[1]), p[2]};
  }
  if (family == "diag") {
    return harness::DiagonalSpectrum{p};
  }
  if (family == "rand") {
    if (p.size() < 1 || p.size() > 2) throw InputError("rand expects n[,seed]");
    return harness::RandomWellConditioned{
        static_cast<Index>(p[0]),
        p.size() == 2 ? static_cast<std::uint64_t>(p[1]) : seed};
  }
  if (family == "shifted") {
    if (p.size() != 4) throw InputError("shifted expects nx,ny,peclet,shift");
    return harness::ComplexShifted{static_cast<Index>(p[0]), static_cast<Index>(p[1]),
                                   p[2], p[3]};
  }
  throw InputError("unknown family '" + family + "' (use cd2d, diag, rand, shifted)");
}

harness::SolverChoice parse_solver(const std::string& s) {
  if (s == "bicor") return {harness::SolverKind::BiCOR};
  if (s == "cors") return {harness::SolverKind::CORS};
  if (s == "bicgstab") return {harness::SolverKind::Bicgstab};
  if (s.rfind("projection", 0) == 0) {
    harness::SolverChoice c{harness::SolverKind::Projection};
    const auto colon = s.find(':');
    if (colon != std::string::npos) {
      try {
        c.projection_m = static_cast<Index>(std::stoll(s.substr(colon + 1)));
      } catch (const std::exception&) {
        throw InputError("projection restart length must be an integer");
      }
    }
    if (c.projection_m < 1) throw InputError("projection restart length must be >= 1");
    return c;
  }
  throw InputError("unknown solver '" + s +
                   "' (use bicor, cors, projection:m, bicgstab)");
}

struct CommonFlags {
  std::string matrix_path;
  std::string generate;
  std::string precond = "none";
  std::string shadow = "Ar0";
  std::string rhs = "ones";
  double tol = 1e-8;
  std::int64_t max_mv = 10000;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  auto* m = cmd->add_option("--matrix", f.matrix_path, "Matrix Market file");
  auto* g = cmd->add_option("--generate", f.generate,
                            "generated family, e.g. cd2d:32,32,10 or diag:1,2,3 or "
                            "rand:100,7 or shifted:16,16,10,1");
  m->excludes(g);
  cmd->add_option("--precond", f.precond, "preconditioner: none or jacobi")
      ->check(CLI::IsMember({"none", "jacobi"}));
  cmd->add_option("--shadow", f.shadow, "shadow residual seed: Ar0 or r0")
      ->check(CLI::IsMember({"Ar0", "r0"}));
  cmd->add_option("--tol", f.tol, "relative residual reduction target");
  cmd->add_option("--max-mv", f.max_mv, "budget on matrix-vector products");
  cmd->add_option("--rhs", f.rhs, "'ones' for b = A*ones, or a vector file");
  cmd->add_option("--seed", f.seed, "default seed for generated families");
}

RunConfig to_config(const CommonFlags& f) {
  RunConfig cfg;
  if (!f.matrix_path.empty()) {
    cfg.matrix_source = harness::MatrixMarketFile{f.matrix_path};
  } else if (!f.generate.empty()) {
    cfg.matrix_source = harness::Generated{parse_family(f.generate, f.seed)};
  } else {
    throw InputError("one of --matrix or --generate is required");
  }
  if (f.rhs == "ones")
    cfg.rhs = harness::AllOnesSolution{};
  else
    cfg.rhs = harness::RhsFromFile{f.rhs};
  cfg.precond = f.precond == "jacobi" ? harness::PrecondKind::Jacobi
                                      : harness::PrecondKind::None;
  cfg.shadow = f.shadow == "r0" ? Shadow::Rzero : Shadow::ARzero;
  cfg.tol = f.tol;
  cfg.max_mv = f.max_mv;
  cfg.seed = f.seed;
  return cfg;
}

int cmd_solve(const CommonFlags& flags, const std::string& solver,
              const std::string& history) {
  RunConfig cfg = to_config(flags);
  cfg.solver = parse_solver(solver);
  cfg.history_path = history;
  harness::RunResult result = harness::run(cfg);
  if (!result.note.empty()) std::cerr << "note: " << result.note << "\n";
  std::cout << harness::render_table({result.row});
  return harness::exit_code(result.row.status);
}

int cmd_compare(const CommonFlags& flags, const std::vector<std::string>& solvers,
                const std::string& csv_path) {
  std::vector<RunConfig> configs;
  for (const auto& s : solvers) {
    RunConfig cfg = to_config(flags);
    cfg.solver = parse_solver(s);
    configs.push_back(std::move(cfg));
  }
  harness::CompareResult result = harness::compare(configs);
  for (const auto& note : result.notes) std::cerr << "note: " << note << "\n";
  std::cout << harness::render_table(result.rows);
  if (!csv_path.empty()) {
    std::FILE* f = std::fopen(csv_path.c_str(), "w");
    if (!f) throw InputError(csv_path + ": cannot open file for writing");
    const std::string csv = harness::render_csv(result.rows);
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
  }
  int worst = 0;
  for (const auto& r : result.rows) worst = std::max(worst, harness::exit_code(r.status));
  return worst;
}

template <typename Scalar>
int verify_typed(const CsrMatrix<Scalar>& A, const harness::RhsSpec& rhs, Index steps) {
  const Vector<Scalar> r0 = harness::build_rhs(A, rhs);
  const LanczosRun<Scalar> run = lanczos_run(A, r0, steps, /*record_bases=*/true);
  if (run.breakdown) {
    std::printf("terminated by breakdown: %s at step %lld (|.| = %.3e)\n",
                to_string(run.breakdown->kind),
                static_cast<long long>(run.breakdown->step), run.breakdown->magnitude);
    return run.breakdown->kind == BreakdownKind::InitialPairingFailed ? 1 : 0;
  }
  const PropositionResiduals res = verify_proposition(A, run);
  const double drift = biorthonormality_drift(A, run.V, run.W);
  const double scale = frobenius_norm(A);
  const double rel_tol = 1e-8 * scale;
  const bool ok = res.max() <= rel_tol && drift <= 1e-6;
  std::printf("steps: %lld   ||A||_F = %.6e\n", static_cast<long long>(run.k), scale);
  std::printf("recurrence residual (right)  %.6e\n", res.res_eq5);
  std::printf("recurrence residual (left)   %.6e\n", res.res_eq6);
  std::printf("pairing residual W'AV - I    %.6e\n", res.res_eq7);
  std::printf("projection residual W'A2V - T %.6e\n", res.res_eq8);
  std::printf("biorthonormality drift       %.6e\n", drift);
  std::printf("%s (residual tol %.3e, drift tol 1e-06)\n", ok ? "PASS" : "FAIL",
              rel_tol);
  return ok ? 0 : 1;
}

int cmd_verify(const CommonFlags& flags, Index steps) {
  RunConfig cfg = to_config(flags);
  if (harness::wants_complex(cfg.matrix_source)) {
    const auto A = harness::load_matrix<std::complex<double>>(cfg.matrix_source);
    return verify_typed(A, cfg.rhs, steps);
  }
  const auto A = harness::load_matrix<double>(cfg.matrix_source);
  return verify_typed(A, cfg.rhs, steps);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krylov solvers built on biconjugate A-orthonormalization"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string solve_solver = "bicor";
  std::string solve_history;
  CLI::App* solve = app.add_subcommand("solve", "run one solver on one system");
  add_common(solve, solve_flags);
  solve->add_option("--solver", solve_solver, "bicor, cors, projection:m, bicgstab");
  solve->add_option("--history", solve_history, "write per-iteration history CSV");

  CommonFlags cmp_flags;
  std::vector<std::string> cmp_solvers;
  std::string cmp_csv;
  CLI::App* cmp = app.add_subcommand("compare", "run several solvers on one system");
  add_common(cmp, cmp_flags);
  cmp->add_option("--solver", cmp_solvers, "repeatable solver choice")
      ->take_all()
      ->required();
  cmp->add_option("--csv", cmp_csv, "write the comparison table as CSV");

  CommonFlags ver_flags;
  Index ver_steps = 10;
  CLI::App* ver = app.add_subcommand(
      "verify", "check the A-biorthonormalization relations on a matrix");
  add_common(ver, ver_flags);
  ver->add_option("--steps", ver_steps, "number of Lanczos-type steps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_flags, solve_solver, solve_history);
    if (cmp->parsed()) return cmd_compare(cmp_flags, cmp_solvers, cmp_csv);
    if (ver->parsed()) return cmd_verify(ver_flags, ver_steps);
  } catch (const corsolve::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 4;
  } catch (const corsolve::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 4;
}
