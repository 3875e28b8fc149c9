#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "proxdg/entropy.hpp"
#include "proxdg/forms.hpp"
#include "proxdg/linalg.hpp"

namespace proxdg {

/// Proximity parameter schedule alpha_k = min(alpha0 * growth^(k-1), cap),
/// k >= 1. Positive and unsummable for growth >= 1.
struct AlphaSchedule {
  double alpha0 = 1.0;
  double growth = 2.0;
  double cap = 1e6;

  double at(int k) const;
};

struct ProximalConfig {
  EntropyKind entropy = EntropyKind::Shannon;
  AlphaSchedule alpha;
  double psi0 = 0.0;  // initial latent value, one constant per cell

  // outer stopping: multiplier stagnation in L2 and relative energy decrement
  double outer_tol = 1e-6;
  int max_outer = 200;

  // inner Newton solve
  double newton_tol = 1e-10;
  int max_newton = 60;
  int max_damping = 30;

  // latent overflow guard; exp stays finite and margins stay positive
  double psi_clamp = 700.0;
  // Jacobian floor: curvature evaluated at max(arg, hess_floor_arg) so the
  // multiplier elimination never divides by an underflowed Hessian
  double hess_floor_arg = -40.0;

  SpdSolveOptions linear;
};

/// One outer-iteration snapshot. o_h is stored through its cellwise margin
/// above the obstacle (o = phi + margin pointwise), which keeps the strict
/// bound visible even when the margin is at the floating-point floor.
struct ProximalState {
  int k = 0;
  Eigen::VectorXd u;         // free dofs
  Eigen::VectorXd psi;       // per cell
  Eigen::VectorXd lambda;    // per cell
  Eigen::VectorXd o_margin;  // conj_margin(psi) per cell, strictly positive
  double energy = 0.0;
  int newton_iters = 0;
  std::vector<double> newton_residuals;  // of the most recent step
  bool psi_clamped = false;
};

struct OuterRecord {
  int k = 0;
  double alpha = 0.0;
  double energy = 0.0;
  double lambda_norm = 0.0;       // L2 norm of lambda_h
  double lambda_increment = 0.0;  // L2 norm of lambda_h^k - lambda_h^{k-1}
  double min_margin = 0.0;        // min cell margin of o_h above the obstacle
  double min_feasibility = 0.0;   // min cell integral of p(u) - phi
  int newton_iters = 0;
};

struct SolveReport {
  ProximalState state;
  std::vector<OuterRecord> history;
  bool converged = false;
  int outer_iterations = 0;
  std::string message;
};

/// Direction of one Newton step on the saddle system, with the multiplier
/// eliminated per cell (and, for hybrid methods, the cell dofs condensed to
/// an SPD facet system).
struct NewtonStep {
  Eigen::VectorXd du;
  Eigen::VectorXd dlambda;
  Eigen::VectorXd hess_diag;  // per-cell H (area-weighted curvature, floored)
  Eigen::SparseMatrix<double> a_tilde;  // primal methods only
};

/// Residuals of the step-k nonlinear system at (u, lambda).
void proximal_residuals(const AssembledSystem& system, const ProximalConfig& config,
                        const Eigen::VectorXd& u, const Eigen::VectorXd& lambda,
                        const Eigen::VectorXd& psi_prev, double alpha, Eigen::VectorXd& r1,
                        Eigen::VectorXd& r2);

NewtonStep newton_step_direction(const AssembledSystem& system, const ProximalConfig& config,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& lambda,
                                 const Eigen::VectorXd& psi_prev, double alpha);

/// Solves the step-k system by damped Newton and applies the latent update.
/// Throws std::runtime_error on Newton failure or linear-solver failure.
ProximalState proximal_step(const AssembledSystem& system, const ProximalState& previous,
                            double alpha, const ProximalConfig& config);

/// The outer proximal loop. Never returns an unconverged state flagged as
/// converged; inspect `converged` and `message`.
SolveReport run_proximal(const AssembledSystem& system, const ProximalConfig& config);

}  // namespace proxdg
