// Acceptance suite: runs the full benchmark matrix and prints one line per
// criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "proxdg/analysis.hpp"
#include "proxdg/bench.hpp"
#include "proxdg/problems.hpp"
#include "proxdg/quadrature.hpp"
#include "proxdg/solver.hpp"
#include "support.hpp"

using namespace proxdg;

namespace {

int failures = 0;

void report(const std::string& id, const std::string& what, bool ok, const std::string& detail) {
  std::printf("[%s] %-78s %s\n", id.c_str(), (what + (detail.empty() ? "" : " (" + detail + ")")).c_str(),
              ok ? "PASS" : "FAIL");
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

bool in_window(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

double last_order(const ConvergenceReport& report, double LevelResult::* column) {
  const auto orders = report.orders(column);
  return orders.empty() ? std::numeric_limits<double>::quiet_NaN() : orders.back();
}

// local cell/facet projections used by the elliptic-projection check
Eigen::VectorXd project_local_cell(const Mesh& mesh, int cell, int degree, const ScalarFn& f) {
  const TriangleRule& rule = triangle_rule(6);
  const int nl = cell_basis_size(degree);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nl, nl);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nl);
  for (size_t q = 0; q < rule.points.size(); ++q) {
    const auto& b = rule.points[q];
    const double w = rule.weights[q] * mesh.cell_area(cell);
    double vals[3] = {1.0, 0.0, 0.0};
    if (degree == 1) {
      vals[0] = b[0];
      vals[1] = b[1];
      vals[2] = b[2];
    }
    const double fv = f(mesh.point(cell, b));
    for (int i = 0; i < nl; ++i) {
      rhs[i] += w * fv * vals[i];
      for (int j = 0; j < nl; ++j) mass(i, j) += w * vals[i] * vals[j];
    }
  }
  return mass.ldlt().solve(rhs);
}

Eigen::Vector2d project_local_facet(const Mesh& mesh, int facet, const ScalarFn& f) {
  const SegmentRule& rule = segment_rule(7);
  double m0 = 0.0, m1 = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    const double g = f(mesh.facet_point(facet, rule.points[q]));
    m0 += rule.weights[q] * g;
    m1 += rule.weights[q] * g * rule.points[q];
  }
  return {m0 / 2.0, 1.5 * m1};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec bench = benchmark_problem();
  const std::vector<int> levels = {8, 16, 32, 64};

  const std::vector<MethodKind> figure2 = {MethodKind::ipdg(), MethodKind::eg(), MethodKind::hip(),
                                           MethodKind::hho(1, 1)};
  const std::vector<MethodKind> hho_extra = {MethodKind::hho(0, 1), MethodKind::hho(0, 0)};

  std::map<std::string, ConvergenceReport> runs;
  for (const auto& list : {figure2, hho_extra})
    for (const MethodKind& method : list) {
      RunConfig config{method, {}, 6};
      config.prox.outer_tol = 1e-6;
      runs.emplace(method.label(), run_convergence(bench, levels, config));
      const auto& rep = runs.at(method.label());
      std::fprintf(stderr, "  ran %-10s: outer iterations per level:", method.label().c_str());
      for (const auto& lv : rep.levels)
        std::fprintf(stderr, " %d%s", lv.report.outer_iterations, lv.report.converged ? "" : "!");
      std::fprintf(stderr, "\n");
    }

  // criterion 1: Figure-2 rates on the two finest levels
  for (const MethodKind& method : figure2) {
    const ConvergenceReport& rep = runs.at(method.label());
    const double h1 = last_order(rep, &LevelResult::h1_u);
    const double l2 = last_order(rep, &LevelResult::l2_u);
    const double lam = last_order(rep, &LevelResult::l2_lambda);
    report("1", method.label() + " broken-H1 EOC in [0.85,1.15]", in_window(h1, 0.85, 1.15),
           "eoc=" + fmt(h1));
    report("1", method.label() + " L2 EOC in [1.7,2.2]", in_window(l2, 1.7, 2.2),
           "eoc=" + fmt(l2));
    report("1", method.label() + " multiplier L2 EOC in [0.35,0.7]", in_window(lam, 0.35, 0.7),
           "eoc=" + fmt(lam));
    report("1", method.label() + " all levels converged", rep.all_converged, "");
  }

  // criterion 2: reconstructed-solution rates for the low-order HHO variants
  {
    const double e01 = last_order(runs.at("hho(0,1)"), &LevelResult::h1_recon);
    const double e00 = last_order(runs.at("hho(0,0)"), &LevelResult::h1_recon);
    report("2", "hho(0,1) reconstructed broken-H1 EOC in [1.3,1.7]", in_window(e01, 1.3, 1.7),
           "eoc=" + fmt(e01));
    report("2", "hho(0,0) reconstructed broken-H1 EOC in [0.85,1.15]", in_window(e00, 0.85, 1.15),
           "eoc=" + fmt(e00));
  }

  // criterion 8: inactive obstacle reproduces unconstrained convergence
  ConvergenceReport flat_rep;
  {
    RunConfig config{MethodKind::ipdg(), {}, 6};
    config.prox.outer_tol = 1e-6;
    flat_rep = run_convergence(flat_problem(), {8, 16, 32}, config);
    const double h1 = last_order(flat_rep, &LevelResult::h1_u);
    double lam_max = 0.0;
    for (const auto& lv : flat_rep.levels)
      lam_max = std::max(lam_max, lv.report.history.back().lambda_norm);
    report("8", "inactive obstacle H1 EOC in [0.85,1.15]", in_window(h1, 0.85, 1.15),
           "eoc=" + fmt(h1));
    report("8", "inactive obstacle multiplier L2 norm <= 1e-8", lam_max <= 1e-8,
           "max=" + fmt(lam_max));
  }

  // criteria 3 and 4: energy dissipation, bound preservation, K_h feasibility
  {
    double worst_energy = 0.0, worst_margin = 1e300, worst_feas = 1e300;
    bool margins_positive = true;
    auto scan = [&](const ConvergenceReport& rep) {
      for (const auto& lv : rep.levels) {
        for (size_t k = 1; k < lv.report.history.size(); ++k) {
          const double slack = 1e-10 * std::max(1.0, std::abs(lv.report.history[k].energy));
          worst_energy = std::max(
              worst_energy, lv.report.history[k].energy - lv.report.history[k - 1].energy - slack);
        }
        for (const auto& rec : lv.report.history) {
          margins_positive = margins_positive && rec.min_margin > 0.0;
          worst_margin = std::min(worst_margin, rec.min_margin);
        }
        worst_feas = std::min(worst_feas, lv.report.history.back().min_feasibility);
      }
    };
    for (const auto& [label, rep] : runs) scan(rep);
    scan(flat_rep);
    report("3", "energy nonincreasing in every recorded run", worst_energy <= 0.0,
           "max dissipation violation above slack=" + fmt(worst_energy));
    report("4", "strict bound preservation at every outer iterate", margins_positive,
           "min margin=" + fmt(worst_margin));
    report("4", "cell-mean feasibility >= -1e-8 at convergence", worst_feas >= -1e-8,
           "min=" + fmt(worst_feas));
  }

  // criterion 5: tiny-scale agreement with the active-set oracle
  {
    const Mesh mesh2 = generate_structured(2, bench.domain);
    const std::vector<MethodKind> all = {MethodKind::ipdg(),     MethodKind::eg(),
                                         MethodKind::hip(),      MethodKind::hho(1, 1),
                                         MethodKind::hho(0, 1),  MethodKind::hho(0, 0)};
    for (const MethodKind& method : all) {
      const AssembledSystem sys =
          assemble_system(mesh2, method, bench.rhs, bench.dirichlet, bench.obstacle);
      ProximalConfig config;
      config.outer_tol = 1e-10;
      config.max_outer = 500;
      const SolveReport rep = run_proximal(sys, config);
      double diff = 1e300;
      if (rep.converged) {
        const Eigen::VectorXd x =
            testing::active_set_qp(testing::dense(sys.A), sys.b, testing::dense(sys.M),
                                   sys.obstacle_integral - sys.m_data);
        const Eigen::VectorXd om = (sys.M * x + sys.m_data).cwiseQuotient(sys.cell_area);
        const Eigen::VectorXd pm = sys.cell_mean_integrals(rep.state.u).cwiseQuotient(sys.cell_area);
        diff = (om - pm).cwiseAbs().maxCoeff();
      }
      report("5", method.label() + " cell means match the active-set oracle to 1e-6",
             rep.converged && diff <= 1e-6, "max diff=" + fmt(diff));
    }
  }

  // criterion 6: one condensed Newton step equals the full saddle solve
  {
    const Mesh mesh2 = generate_structured(2, bench.domain);
    for (const MethodKind& method :
         {MethodKind::hip(), MethodKind::hho(0, 0), MethodKind::hho(0, 1), MethodKind::hho(1, 1)}) {
      const AssembledSystem sys =
          assemble_system(mesh2, method, bench.rhs, bench.dirichlet, bench.obstacle);
      ProximalConfig config;
      const int nc = mesh2.n_cells();
      Eigen::VectorXd u0(sys.space.n_dofs());
      for (int i = 0; i < u0.size(); ++i) u0[i] = testing::uniform(-0.5, 0.5);
      const Eigen::VectorXd psi0 = Eigen::VectorXd::Zero(nc);
      const Eigen::VectorXd lam0 = Eigen::VectorXd::Zero(nc);
      const NewtonStep step = newton_step_direction(sys, config, u0, lam0, psi0, 1.0);
      const testing::FullSaddleStep oracle =
          testing::full_saddle_step(sys, config, u0, lam0, psi0, 1.0);
      const double du = (step.du - oracle.du).norm() / (1.0 + oracle.du.norm());
      const double dl = (step.dlambda - oracle.dlambda).norm() / (1.0 + oracle.dlambda.norm());
      report("6", method.label() + " condensed step matches the full saddle solve to 1e-10",
             du <= 1e-10 && dl <= 1e-10, "du=" + fmt(du) + " dlambda=" + fmt(dl));
    }
  }

  // criterion 7: structural unit properties
  {
    const Mesh mesh2 = generate_structured(2, bench.domain);
    bool sym_ok = true, pd_ok = true;
    for (const MethodKind& method :
         {MethodKind::ipdg(), MethodKind::eg(), MethodKind::hip(), MethodKind::hho(1, 1)}) {
      const AssembledSystem sys =
          assemble_system(mesh2, method, bench.rhs, bench.dirichlet, bench.obstacle);
      const Eigen::MatrixXd a = testing::dense(sys.A);
      sym_ok = sym_ok &&
               (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
      pd_ok = pd_ok && eig.eigenvalues().minCoeff() > 0.0;
    }
    report("7", "stiffness symmetry <= 1e-12 (all methods, n=2)", sym_ok, "");
    report("7", "positive definiteness on n=2 (dense eigensolve)", pd_ok, "");

    // HHO elliptic-projection exactness on P^{r+1}
    double worst = 0.0;
    for (auto [l, r] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
      const HhoLocalOperators ops = hho_local_operators(mesh2, 3, l, r);
      const int nr = cell_basis_size(r + 1), ncl = cell_basis_size(l), nfl = r + 1;
      Eigen::VectorXd qc(nr);
      for (int k = 0; k < nr; ++k) qc[k] = testing::uniform(-1.0, 1.0);
      auto q = [&](const Vec2& p) {
        double acc = 0.0;
        for (int k = 0; k < nr; ++k) acc += qc[k] * monomial_value(mesh2, 3, k, p);
        return acc;
      };
      Eigen::VectorXd input(ncl + 3 * nfl);
      input.head(ncl) = project_local_cell(mesh2, 3, l, q);
      for (int lf = 0; lf < 3; ++lf)
        input.segment(ncl + nfl * lf, nfl) =
            project_local_facet(mesh2, mesh2.cell_facet(3, lf), q).head(nfl);
      worst = std::max(worst, (ops.reconstruction * input - qc).cwiseAbs().maxCoeff());
      worst = std::max(worst, (ops.stabilization * input).cwiseAbs().maxCoeff());
    }
    report("7", "HHO elliptic-projection exactness on P^{r+1} <= 1e-12", worst <= 1e-12,
           "residual=" + fmt(worst));

    // entropy round trips and the three-point identity
    double ent_worst = 0.0;
    for (EntropyKind kind : {EntropyKind::Shannon, EntropyKind::Softplus}) {
      // zero obstacle keeps the round trip representable over the full range
      for (double psi = -30.0; psi <= 30.0; psi += 1.5)
        ent_worst = std::max(ent_worst, std::abs(grad(kind, 0.0, grad_conj(kind, 0.0, psi)) - psi));
      for (double psi = -12.0; psi <= 30.0; psi += 1.5)
        ent_worst = std::max(ent_worst, std::abs(grad(kind, -0.3, grad_conj(kind, -0.3, psi)) - psi));
      for (int i = 0; i < 200; ++i) {
        const double phi = testing::uniform(-1.0, 1.0);
        const double a = phi + testing::uniform(0.05, 4.0);
        const double b = phi + testing::uniform(0.05, 4.0);
        const double c = phi + testing::uniform(0.05, 4.0);
        const double lhs =
            bregman(kind, phi, a, b) - bregman(kind, phi, a, c) + bregman(kind, phi, b, c);
        const double rhs = (grad(kind, phi, b) - grad(kind, phi, c)) * (b - a);
        ent_worst = std::max(ent_worst, std::abs(lhs - rhs));
      }
    }
    report("7", "entropy inverse and three-point identities <= 1e-10", ent_worst <= 1e-10,
           "residual=" + fmt(ent_worst));

    // Clement weights and the feasibility-lemma node check on a converged run
    const Mesh mesh8 = generate_structured(8, bench.domain);
    const SmootherWeights weights = compute_weights(mesh8);
    double wres = 0.0;
    for (int v = 0; v < mesh8.n_vertices(); ++v) {
      if (mesh8.vertex_on_boundary(v)) continue;
      double sum = -1.0;
      Vec2 combo = -mesh8.vertex(v);
      for (const auto& e : weights.per_vertex[v]) {
        wres = std::max(wres, std::max(0.0, -e.weight));
        sum += e.weight;
        combo += e.weight * mesh8.centroid(e.cell);
      }
      wres = std::max(wres, std::abs(sum));
      wres = std::max(wres, combo.norm());
    }
    report("7", "Clement weight constraints residual <= 1e-12", wres <= 1e-12,
           "residual=" + fmt(wres));

    const AssembledSystem sys8 =
        assemble_system(mesh8, MethodKind::ipdg(), bench.rhs, bench.dirichlet, bench.obstacle);
    const Eigen::VectorXd& u8 = runs.at("ipdg").levels.front().report.state.u;
    const Eigen::VectorXd mean_margins =
        feasibility_margins(sys8, u8).cwiseQuotient(sys8.cell_area);
    const Eigen::VectorXd nodal = clement_smooth(mesh8, weights, mean_margins);
    double node_min = 0.0;
    for (int v = 0; v < mesh8.n_vertices(); ++v)
      if (!mesh8.vertex_on_boundary(v)) node_min = std::min(node_min, nodal[v]);
    report("7", "smoothed feasibility at interior nodes >= -1e-8", node_min >= -1e-8,
           "min=" + fmt(node_min));
  }

  // criterion 9: mesh-robust outer iteration counts
  {
    const auto& rep = runs.at("ipdg");
    int it8 = 0, it32 = 0;
    for (const auto& lv : rep.levels) {
      if (lv.n == 8) it8 = lv.report.outer_iterations;
      if (lv.n == 32) it32 = lv.report.outer_iterations;
    }
    const double ratio =
        static_cast<double>(std::max(it8, it32)) / std::max(1, std::min(it8, it32));
    report("9", "outer iterations vary by at most 2x between n=8 and n=32", ratio <= 2.0,
           "n=8: " + std::to_string(it8) + ", n=32: " + std::to_string(it32));
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s (%d failure%s, %.1f s)\n", failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES",
              failures, failures == 1 ? "" : "s", seconds);
  return failures == 0 ? 0 : 1;
}
