#include "proxdg/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

namespace proxdg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json j;
  j["method"] = config.method.label();
  if (config.method.method != Method::HHO) j["sigma"] = config.method.sigma;
  if (config.method.method == Method::HHO) {
    j["cell_degree"] = config.method.cell_degree;
    j["facet_degree"] = config.method.facet_degree;
  }
  j["entropy"] = to_string(config.prox.entropy);
  j["alpha0"] = config.prox.alpha.alpha0;
  j["alpha_growth"] = config.prox.alpha.growth;
  j["alpha_cap"] = config.prox.alpha.cap;
  j["outer_tol"] = config.prox.outer_tol;
  j["newton_tol"] = config.prox.newton_tol;
  j["max_outer"] = config.prox.max_outer;
  j["quad_degree"] = config.quad_degree;
  return j;
}

nlohmann::json history_json(const SolveReport& report) {
  nlohmann::json h = nlohmann::json::array();
  for (const auto& rec : report.history) {
    h.push_back({{"k", rec.k},
                 {"alpha", rec.alpha},
                 {"energy", rec.energy},
                 {"lambda_norm", rec.lambda_norm},
                 {"newton_iters", rec.newton_iters}});
  }
  return h;
}

nlohmann::json level_json(const LevelResult& level) {
  nlohmann::json j;
  j["n"] = level.n;
  j["h"] = level.h;
  j["converged"] = level.report.converged;
  j["outer_iterations"] = level.report.outer_iterations;
  auto put = [&j](const char* key, double v) {
    if (std::isfinite(v)) j[key] = v;
  };
  put("eL2_u", level.l2_u);
  put("eH1_u", level.h1_u);
  put("eDG_u", level.dg_u);
  put("eL2_lambda", level.l2_lambda);
  put("eL2_o", level.l2_o);
  put("eL2_recon", level.l2_recon);
  put("eH1_recon", level.h1_recon);
  j["history"] = history_json(level.report);
  return j;
}

}  // namespace

std::vector<double> ConvergenceReport::orders(double LevelResult::* column) const {
  std::vector<double> out;
  for (size_t i = 0; i + 1 < levels.size(); ++i) {
    const double e0 = levels[i].*column, e1 = levels[i + 1].*column;
    const double h0 = levels[i].h, h1 = levels[i + 1].h;
    if (e0 > 0.0 && e1 > 0.0 && std::isfinite(e0) && std::isfinite(e1) && h0 > h1)
      out.push_back(std::log(e0 / e1) / std::log(h0 / h1));
    else
      out.push_back(kNaN);
  }
  return out;
}

namespace {

LevelResult solve_on_system(const ProblemSpec& problem, const Mesh& mesh,
                            const AssembledSystem& system, int n, const RunConfig& config) {
  LevelResult out;
  out.n = n;
  out.h = mesh.h();
  out.report = run_proximal(system, config.prox);

  out.l2_u = out.h1_u = out.dg_u = out.l2_lambda = out.l2_o = kNaN;
  out.l2_recon = out.h1_recon = kNaN;
  if (problem.has_exact()) {
    const CellPolyField uh = cell_component(system, out.report.state.u);
    const FieldErrors fe =
        error_norms(mesh, uh, problem.exact, problem.exact_grad, config.quad_degree);
    out.l2_u = fe.l2;
    out.h1_u = fe.h1;
    out.dg_u = fe.dg;
    if (problem.exact_lambda)
      out.l2_lambda =
          lambda_l2_error(mesh, out.report.state.lambda, problem.exact_lambda, config.quad_degree);
    out.l2_o = o_l2_error(mesh, out.report.state.o_margin, problem.obstacle, problem.exact,
                          config.quad_degree);
    if (config.method.method == Method::HHO) {
      const CellPolyField rec = reconstruct_solution(system, out.report.state.u);
      const FieldErrors re =
          error_norms(mesh, rec, problem.exact, problem.exact_grad, config.quad_degree);
      out.l2_recon = re.l2;
      out.h1_recon = re.h1;
    }
  }
  return out;
}

}  // namespace

LevelResult solve_level(const ProblemSpec& problem, int n, const RunConfig& config) {
  const Mesh mesh = generate_structured(n, problem.domain);
  const AssembledSystem system = assemble_system(mesh, config.method, problem.rhs,
                                                 problem.dirichlet, problem.obstacle,
                                                 config.quad_degree);
  return solve_on_system(problem, mesh, system, n, config);
}

ConvergenceReport run_convergence(const ProblemSpec& problem, const std::vector<int>& levels,
                                  const RunConfig& config) {
  if (levels.size() < 1) throw std::invalid_argument("run_convergence: no levels");
  for (size_t i = 0; i + 1 < levels.size(); ++i)
    if (levels[i] >= levels[i + 1])
      throw std::invalid_argument("run_convergence: levels must be strictly ascending");

  ConvergenceReport report;
  report.problem = problem.name;
  report.method = config.method;

  // independent solves; results aggregated in level order
  std::vector<std::future<LevelResult>> futures;
  futures.reserve(levels.size());
  for (int n : levels)
    futures.push_back(std::async(std::launch::async,
                                 [&problem, n, &config] { return solve_level(problem, n, config); }));
  report.all_converged = true;
  for (auto& f : futures) {
    report.levels.push_back(f.get());
    report.all_converged = report.all_converged && report.levels.back().report.converged;
  }
  return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "h,eL2_u,eH1_u,eDG_u,eL2_lambda,eL2_o,eL2_recon,eH1_recon\n";
  const std::vector<double LevelResult::*> cols = {
      &LevelResult::l2_u, &LevelResult::h1_u,     &LevelResult::dg_u,    &LevelResult::l2_lambda,
      &LevelResult::l2_o, &LevelResult::l2_recon, &LevelResult::h1_recon};
  for (size_t i = 0; i < report.levels.size(); ++i) {
    if (i > 0) {
      out << "eoc";
      for (auto col : cols) {
        const auto ord = report.orders(col);
        out << "," << fmt(ord[i - 1]);
      }
      out << "\n";
    }
    const LevelResult& lv = report.levels[i];
    out << fmt(lv.h);
    for (auto col : cols) out << "," << fmt(lv.*col);
    out << "\n";
  }
}

void write_json(const ConvergenceReport& report, const RunConfig& config, std::ostream& out) {
  nlohmann::json j;
  j["config"] = config_json(config);
  j["problem"] = report.problem;
  j["all_converged"] = report.all_converged;
  j["per_level"] = nlohmann::json::array();
  for (const auto& lv : report.levels) j["per_level"].push_back(level_json(lv));
  out << j.dump(2) << "\n";
}

void write_solve_json(const ProblemSpec& problem, const RunConfig& config,
                      const AssembledSystem& system, const SolveReport& report,
                      const LevelResult& result, std::ostream& out) {
  nlohmann::json j;
  j["config"] = config_json(config);
  j["problem"] = problem.name;
  j["n"] = result.n;
  j["h"] = result.h;
  j["converged"] = report.converged;
  j["outer_iterations"] = report.outer_iterations;
  j["message"] = report.message;
  j["energy"] = report.state.energy;
  double ln = 0.0;
  for (int c = 0; c < system.mesh->n_cells(); ++c)
    ln += system.cell_area[c] * report.state.lambda[c] * report.state.lambda[c];
  j["lambda_l2"] = std::sqrt(ln);
  j["min_feasibility"] = feasibility_margins(system, report.state.u).minCoeff();
  if (problem.has_exact()) {
    j["errors"] = {{"eL2_u", result.l2_u},
                   {"eH1_u", result.h1_u},
                   {"eDG_u", result.dg_u},
                   {"eL2_o", result.l2_o}};
    if (std::isfinite(result.l2_lambda)) j["errors"]["eL2_lambda"] = result.l2_lambda;
  }
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["fields"] = {{"u", vec(report.state.u)},
                 {"lambda", vec(report.state.lambda)},
                 {"psi", vec(report.state.psi)},
                 {"o_margin", vec(report.state.o_margin)},
                 {"boundary_data", vec(system.data)}};
  j["history"] = history_json(report);
  out << j.dump(2) << "\n";
}

namespace {

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"proximal DG methods for the unilateral Poisson obstacle problem"};
  app.require_subcommand(1);

  std::string method_name = "ipdg", entropy_name = "shannon";
  std::string problem_name = "benchmark", out_path, format = "csv";
  int cell_degree = 1, facet_degree = 1, n = 8;
  double sigma = 10.0;
  std::vector<int> levels = {8, 16, 32, 64};
  RunConfig config{MethodKind::ipdg(), {}, 6};

  CLI::Option *sigma_opt_solve, *sigma_opt_conv, *cd_solve, *cd_conv, *fd_solve, *fd_conv;

  auto add_common = [&](CLI::App* cmd, CLI::Option*& sigma_opt, CLI::Option*& cd_opt,
                        CLI::Option*& fd_opt) {
    cmd->add_option("--method", method_name, "ipdg, eg, hip or hho")
        ->check(CLI::IsMember({"ipdg", "eg", "hip", "hho"}));
    cd_opt = cmd->add_option("--cell-degree", cell_degree, "HHO cell degree (0 or 1)");
    fd_opt = cmd->add_option("--facet-degree", facet_degree, "HHO facet degree (0 or 1)");
    sigma_opt = cmd->add_option("--sigma", sigma, "penalty parameter (not for hho)");
    cmd->add_option("--entropy", entropy_name, "shannon or softplus")
        ->check(CLI::IsMember({"shannon", "softplus"}));
    cmd->add_option("--alpha0", config.prox.alpha.alpha0, "initial proximity parameter");
    cmd->add_option("--alpha-growth", config.prox.alpha.growth, "geometric growth factor");
    cmd->add_option("--alpha-cap", config.prox.alpha.cap, "proximity parameter cap");
    cmd->add_option("--outer-tol", config.prox.outer_tol, "outer stopping tolerance");
    cmd->add_option("--newton-tol", config.prox.newton_tol, "Newton residual tolerance");
    cmd->add_option("--max-outer", config.prox.max_outer, "outer iteration cap");
    cmd->add_option("--quad-degree", config.quad_degree, "quadrature exactness degree");
    cmd->add_option("--out", out_path, "output path (default stdout)");
    cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--problem", problem_name, "benchmark, flat or file:<json>");
  };

  CLI::App* solve = app.add_subcommand("solve", "single-mesh solve, dumps fields and history");
  add_common(solve, sigma_opt_solve, cd_solve, fd_solve);
  solve->add_option("--n", n, "subdivisions per axis")->check(CLI::PositiveNumber);

  CLI::App* conv = app.add_subcommand("convergence", "multi-level convergence study");
  add_common(conv, sigma_opt_conv, cd_conv, fd_conv);
  conv->add_option("--levels", levels, "ascending subdivision counts")->delimiter(',');

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const bool is_solve = solve->parsed();
  CLI::Option* sigma_opt = is_solve ? sigma_opt_solve : sigma_opt_conv;
  CLI::Option* cd_opt = is_solve ? cd_solve : cd_conv;
  CLI::Option* fd_opt = is_solve ? fd_solve : fd_conv;

  try {
    if (method_name == "hho") {
      if (sigma_opt->count() > 0)
        return usage_error("--sigma does not apply to hho (no penalty parameter)");
      config.method = MethodKind::hho(cell_degree, facet_degree);
    } else {
      if (cd_opt->count() > 0 || fd_opt->count() > 0)
        return usage_error("--cell-degree/--facet-degree apply to hho only");
      if (method_name == "ipdg") config.method = MethodKind::ipdg(sigma);
      if (method_name == "eg") config.method = MethodKind::eg(sigma);
      if (method_name == "hip") config.method = MethodKind::hip(sigma);
    }
    config.prox.entropy = entropy_from_string(entropy_name);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }

  ProblemSpec problem;
  try {
    if (problem_name == "benchmark") {
      problem = benchmark_problem();
    } else if (problem_name == "flat") {
      problem = flat_problem();
    } else if (problem_name.rfind("file:", 0) == 0) {
      std::ifstream in(problem_name.substr(5));
      if (!in) return usage_error("cannot open problem file " + problem_name.substr(5));
      problem = problem_from_json(in);
    } else {
      return usage_error("unknown problem: " + problem_name);
    }
    self_check(problem);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) return usage_error("cannot open output path " + out_path);
    out = &file;
  }

  try {
    if (is_solve) {
      const Mesh mesh = generate_structured(n, problem.domain);
      const AssembledSystem system = assemble_system(
          mesh, config.method, problem.rhs, problem.dirichlet, problem.obstacle,
          config.quad_degree);
      LevelResult result = solve_on_system(problem, mesh, system, n, config);
      write_solve_json(problem, config, system, result.report, result, *out);
      if (!result.report.converged) {
        std::cerr << "error: " << result.report.message << "\n";
        return 1;
      }
      return 0;
    }
    const ConvergenceReport report = run_convergence(problem, levels, config);
    if (format == "json")
      write_json(report, config, *out);
    else
      write_csv(report, *out);
    if (!report.all_converged) {
      std::cerr << "error: at least one level did not converge\n";
      return 1;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    return usage_error(e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace proxdg
