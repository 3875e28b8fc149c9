#include "proxdg/solver.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace proxdg {

using Eigen::VectorXd;

double AlphaSchedule::at(int k) const {
  if (alpha0 <= 0.0 || growth < 1.0 || cap <= 0.0)
    throw std::invalid_argument("alpha schedule: need alpha0 > 0, growth >= 1, cap > 0");
  const double a = alpha0 * std::pow(growth, k - 1);
  return std::min(a, cap);
}

void proximal_residuals(const AssembledSystem& system, const ProximalConfig& config,
                        const VectorXd& u, const VectorXd& lambda, const VectorXd& psi_prev,
                        double alpha, VectorXd& r1, VectorXd& r2) {
  // data contributions are folded into b, so the free-dof equation is
  // A u - M^T lambda = b
  r1 = system.A * u - system.M.transpose() * lambda - system.b;
  const VectorXd means = system.cell_mean_integrals(u);
  const int nc = system.mesh->n_cells();
  r2.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const double arg = psi_prev[c] - alpha * lambda[c];
    r2[c] = means[c] - system.obstacle_integral[c] -
            system.cell_area[c] * conj_margin(config.entropy, arg);
  }
}

namespace {

// Roundoff bound for the residual evaluation: the obstacle integrals can be
// many orders larger than the residual itself, so Newton must be allowed to
// stop at the floating-point floor of its own arithmetic.
double residual_noise(const AssembledSystem& system, const ProximalConfig& config,
                      const VectorXd& u, const VectorXd& lambda, const VectorXd& psi_prev,
                      double alpha) {
  const VectorXd au = system.A.cwiseAbs() * u.cwiseAbs();
  const VectorXd ml = system.M.cwiseAbs().transpose() * lambda.cwiseAbs();
  const VectorXd mu = system.M.cwiseAbs() * u.cwiseAbs();
  double acc = (au + ml + system.b.cwiseAbs()).squaredNorm();
  for (int c = 0; c < system.mesh->n_cells(); ++c) {
    const double arg = psi_prev[c] - alpha * lambda[c];
    const double m = mu[c] + std::abs(system.m_data[c]) + std::abs(system.obstacle_integral[c]) +
                     system.cell_area[c] * conj_margin(config.entropy, std::min(arg, 700.0));
    acc += m * m;
  }
  return std::numeric_limits<double>::epsilon() * std::sqrt(acc);
}

// Per-cell H = |T| * hess, with the curvature argument floored so that the
// subsequent division stays in floating-point range.
VectorXd hessian_diagonal(const AssembledSystem& system, const ProximalConfig& config,
                          const VectorXd& lambda, const VectorXd& psi_prev, double alpha) {
  const int nc = system.mesh->n_cells();
  VectorXd h(nc);
  for (int c = 0; c < nc; ++c) {
    const double arg = std::max(psi_prev[c] - alpha * lambda[c], config.hess_floor_arg);
    h[c] = system.cell_area[c] * hess_conj(config.entropy, 0.0, arg);
  }
  return h;
}

double residual_norm(const VectorXd& r1, const VectorXd& r2) {
  return std::sqrt(r1.squaredNorm() + r2.squaredNorm());
}

}  // namespace

NewtonStep newton_step_direction(const AssembledSystem& system, const ProximalConfig& config,
                                 const VectorXd& u, const VectorXd& lambda,
                                 const VectorXd& psi_prev, double alpha) {
  NewtonStep step;
  VectorXd r1, r2;
  proximal_residuals(system, config, u, lambda, psi_prev, alpha, r1, r2);
  step.hess_diag = hessian_diagonal(system, config, lambda, psi_prev, alpha);
  const VectorXd inv_ah = (alpha * step.hess_diag.array()).inverse().matrix();
  const int nc = system.mesh->n_cells();

  if (!system.method.is_hybrid()) {
    // eliminate the multiplier: A~ = A + (1/alpha) M^T H^{-1} M
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < system.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, k); it; ++it)
        trip.emplace_back(it.row(), it.col(), it.value());
    for (int c = 0; c < nc; ++c) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(system.M, c); it; ++it)
        for (Eigen::SparseMatrix<double>::InnerIterator jt(system.M, c); jt; ++jt)
          trip.emplace_back(it.col(), jt.col(), inv_ah[c] * it.value() * jt.value());
    }
    step.a_tilde.resize(system.A.rows(), system.A.cols());
    step.a_tilde.setFromTriplets(trip.begin(), trip.end());

    const VectorXd rhs = -r1 - system.M.transpose() * (inv_ah.cwiseProduct(r2));
    step.du = solve_spd(step.a_tilde, rhs, config.linear,
                        "newton (" + system.method.label() + ")");
    step.dlambda = -(r2 + system.M * step.du).cwiseProduct(inv_ah);
    return step;
  }

  // hybrid path: eliminate the multiplier per cell (rank-one update of the
  // cell block), then condense the cell dofs to the facet system
  const int n_cell_total = nc * system.space.n_cell_dofs_local();
  const int n_facet = system.space.n_dofs() - n_cell_total;
  std::vector<CellSaddleBlock> blocks(nc);
  VectorXd rhs_facet = VectorXd::Zero(n_facet);
  for (int i = n_cell_total; i < system.space.n_dofs(); ++i)
    rhs_facet[i - n_cell_total] = -r1[i];

  for (int c = 0; c < nc; ++c) {
    const auto& src = system.blocks[c];
    CellSaddleBlock blk;
    blk.cell_dofs = src.cell_dofs;
    blk.facet_dofs.reserve(src.facet_dofs.size());
    for (int fd : src.facet_dofs) blk.facet_dofs.push_back(fd - n_cell_total);
    blk.a_cc = src.a_cc + inv_ah[c] * src.m_cell * src.m_cell.transpose();
    blk.a_cf = src.a_cf;
    blk.a_ff = src.a_ff;
    blk.rhs_c = VectorXd(src.cell_dofs.size());
    for (size_t i = 0; i < src.cell_dofs.size(); ++i) blk.rhs_c[i] = -r1[src.cell_dofs[i]];
    blk.rhs_c -= (inv_ah[c] * r2[c]) * src.m_cell;
    blocks[c] = std::move(blk);
  }

  CondensedSystem condensed(std::move(blocks), n_facet, rhs_facet);
  const VectorXd uf = solve_spd(condensed.matrix(), condensed.rhs(), config.linear,
                                "newton condensed (" + system.method.label() + ")");
  step.du = VectorXd::Zero(system.space.n_dofs());
  for (int i = 0; i < n_facet; ++i) step.du[n_cell_total + i] = uf[i];
  condensed.recover(uf, step.du);

  step.dlambda.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& src = system.blocks[c];
    double m_du = 0.0;
    for (size_t i = 0; i < src.cell_dofs.size(); ++i)
      m_du += src.m_cell[i] * step.du[src.cell_dofs[i]];
    step.dlambda[c] = -(r2[c] + m_du) * inv_ah[c];
  }
  return step;
}

ProximalState proximal_step(const AssembledSystem& system, const ProximalState& previous,
                            double alpha, const ProximalConfig& config) {
  ProximalState state;
  state.k = previous.k + 1;
  state.u = previous.u;
  state.lambda = previous.lambda;
  state.psi_clamped = previous.psi_clamped;
  const VectorXd& psi_prev = previous.psi;

  const double scale = std::max(1.0, system.b.norm());
  VectorXd r1, r2;
  proximal_residuals(system, config, state.u, state.lambda, psi_prev, alpha, r1, r2);
  double rn = residual_norm(r1, r2);
  state.newton_residuals.push_back(rn);
  auto settled = [&](double r) {
    const double noise =
        residual_noise(system, config, state.u, state.lambda, psi_prev, alpha);
    return r <= config.newton_tol * scale || r <= 8.0 * noise;
  };

  int it = 0;
  for (; it < config.max_newton; ++it) {
    if (settled(rn)) break;
    const NewtonStep step =
        newton_step_direction(system, config, state.u, state.lambda, psi_prev, alpha);

    // backtracking damping: halve until the residual norm decreases
    double s = 1.0;
    int halvings = 0;
    bool stagnated = false;
    VectorXd u_try, l_try;
    double rn_try = rn;
    while (true) {
      u_try = state.u + s * step.du;
      l_try = state.lambda + s * step.dlambda;
      proximal_residuals(system, config, u_try, l_try, psi_prev, alpha, r1, r2);
      rn_try = residual_norm(r1, r2);
      if (std::isfinite(rn_try) && rn_try < rn) break;
      if (++halvings > config.max_damping) {
        // no direction of decrease: acceptable only at the roundoff floor
        if (settled(rn)) {
          stagnated = true;
          break;
        }
        throw std::runtime_error("newton: no residual decrease after " +
                                 std::to_string(config.max_damping) +
                                 " halvings (residual " + std::to_string(rn) + ")");
      }
      s *= 0.5;
    }
    if (stagnated) break;
    state.u = std::move(u_try);
    state.lambda = std::move(l_try);
    rn = rn_try;
    state.newton_residuals.push_back(rn);
  }
  if (!settled(rn))
    throw std::runtime_error("newton: not converged after " + std::to_string(config.max_newton) +
                             " iterations, residual " + std::to_string(rn));
  state.newton_iters = it;

  // latent update psi^k = psi^{k-1} - alpha lambda^k, with the overflow guard
  const int nc = system.mesh->n_cells();
  state.psi.resize(nc);
  state.o_margin.resize(nc);
  for (int c = 0; c < nc; ++c) {
    double p = psi_prev[c] - alpha * state.lambda[c];
    if (std::abs(p) > config.psi_clamp) {
      p = std::copysign(config.psi_clamp, p);
      if (!state.psi_clamped) {
        state.psi_clamped = true;
        std::cerr << "proxdg: latent variable clamped to |psi| <= " << config.psi_clamp << "\n";
      }
    }
    state.psi[c] = p;
    state.o_margin[c] = conj_margin(config.entropy, p);
  }
  state.energy = system.energy(state.u);
  return state;
}

SolveReport run_proximal(const AssembledSystem& system, const ProximalConfig& config) {
  SolveReport report;
  ProximalState state;
  const int nc = system.mesh->n_cells();
  state.psi = VectorXd::Constant(nc, config.psi0);
  state.lambda = VectorXd::Zero(nc);
  state.o_margin = VectorXd::Constant(nc, conj_margin(config.entropy, config.psi0));
  // warm start from the unconstrained solve
  state.u = solve_spd(system.A, system.b, config.linear,
                      "initial solve (" + system.method.label() + ")");
  state.energy = system.energy(state.u);

  double prev_energy = 0.0;
  for (int k = 1; k <= config.max_outer; ++k) {
    const double alpha = config.alpha.at(k);
    ProximalState next;
    try {
      next = proximal_step(system, state, alpha, config);
    } catch (const std::exception& e) {
      report.state = std::move(state);
      report.converged = false;
      report.outer_iterations = k - 1;
      report.message = std::string("outer iteration ") + std::to_string(k) + ": " + e.what();
      return report;
    }

    OuterRecord rec;
    rec.k = k;
    rec.alpha = alpha;
    rec.energy = next.energy;
    rec.newton_iters = next.newton_iters;
    const VectorXd dl = next.lambda - state.lambda;
    double ln = 0.0, li = 0.0;
    for (int c = 0; c < nc; ++c) {
      ln += system.cell_area[c] * next.lambda[c] * next.lambda[c];
      li += system.cell_area[c] * dl[c] * dl[c];
    }
    rec.lambda_norm = std::sqrt(ln);
    rec.lambda_increment = std::sqrt(li);
    rec.min_margin = next.o_margin.minCoeff();
    rec.min_feasibility =
        (system.cell_mean_integrals(next.u) - system.obstacle_integral).minCoeff();
    report.history.push_back(rec);

    const bool lambda_settled = rec.lambda_increment <= config.outer_tol;
    const bool energy_settled =
        k >= 2 && std::abs(next.energy - prev_energy) <=
                      config.outer_tol * std::max(1.0, std::abs(next.energy));
    prev_energy = next.energy;
    state = std::move(next);
    if (lambda_settled && energy_settled) {
      report.converged = true;
      report.outer_iterations = k;
      report.message = "converged";
      report.state = std::move(state);
      return report;
    }
  }
  report.converged = false;
  report.outer_iterations = config.max_outer;
  report.message = "max outer iterations reached without meeting the stopping tolerance";
  report.state = std::move(state);
  return report;
}

}  // namespace proxdg
