#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "proxdg/analysis.hpp"
#include "proxdg/problems.hpp"
#include "proxdg/solver.hpp"

namespace proxdg {

struct RunConfig {
  MethodKind method;
  ProximalConfig prox;
  int quad_degree = 6;
};

/// Errors of one mesh level (NaN where no exact solution or no
/// reconstruction applies) together with the solve history.
struct LevelResult {
  int n = 0;
  double h = 0.0;
  double l2_u = 0.0, h1_u = 0.0, dg_u = 0.0, l2_lambda = 0.0, l2_o = 0.0;
  double l2_recon = 0.0, h1_recon = 0.0;
  SolveReport report;
};

struct ConvergenceReport {
  std::string problem;
  MethodKind method;
  std::vector<LevelResult> levels;
  bool all_converged = false;

  /// EOC of one error column between consecutive levels.
  std::vector<double> orders(double LevelResult::* column) const;
};

/// Solves one mesh level: generate, assemble, run the proximal loop, and
/// compute all error norms.
LevelResult solve_level(const ProblemSpec& problem, int n, const RunConfig& config);

/// Multi-level convergence study. Levels must be strictly ascending.
ConvergenceReport run_convergence(const ProblemSpec& problem, const std::vector<int>& levels,
                                  const RunConfig& config);

/// CSV with one row per level and a companion EOC row between levels;
/// byte-identical for identical configurations.
void write_csv(const ConvergenceReport& report, std::ostream& out);
void write_json(const ConvergenceReport& report, const RunConfig& config, std::ostream& out);

/// Single-solve run record: config, errors when available, solver history,
/// and the discrete fields.
void write_solve_json(const ProblemSpec& problem, const RunConfig& config,
                      const AssembledSystem& system, const SolveReport& report,
                      const LevelResult& result, std::ostream& out);

/// Command-line entry point; exit codes: 0 success, 1 convergence failure,
/// 2 usage error.
int run_cli(const std::vector<std::string>& args);

}  // namespace proxdg
