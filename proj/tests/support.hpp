#pragma once

// Test-only oracles, independent of the solver paths they check.

#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "proxdg/forms.hpp"
#include "proxdg/solver.hpp"

namespace proxdg::testing {

inline Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& a) {
  return Eigen::MatrixXd(a);
}

/// Active-set solve of the discrete complementarity system
///   minimize 1/2 x^T A x - b^T x  subject to  M x >= c,
/// by direct enumeration of KKT systems. Small problems only.
inline Eigen::VectorXd active_set_qp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     const Eigen::MatrixXd& m, const Eigen::VectorXd& c,
                                     int max_pass = 200) {
  const int n = static_cast<int>(a.rows());
  const int nc = static_cast<int>(m.rows());
  std::vector<bool> active(nc, false);
  for (int pass = 0; pass < max_pass; ++pass) {
    std::vector<int> act;
    for (int i = 0; i < nc; ++i)
      if (active[i]) act.push_back(i);
    const int na = static_cast<int>(act.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + na, n + na);
    kkt.topLeftCorner(n, n) = a;
    Eigen::VectorXd rhs(n + na);
    rhs.head(n) = b;
    for (int i = 0; i < na; ++i) {
      kkt.block(n + i, 0, 1, n) = m.row(act[i]);
      kkt.block(0, n + i, n, 1) = -m.row(act[i]).transpose();
      rhs[n + i] = c[act[i]];
    }
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    const Eigen::VectorXd mu = sol.tail(na);

    // drop the most negative multiplier, else add the most violated bound
    int drop = -1;
    double worst_mu = -1e-10;
    for (int i = 0; i < na; ++i)
      if (mu[i] < worst_mu) {
        worst_mu = mu[i];
        drop = act[i];
      }
    if (drop >= 0) {
      active[drop] = false;
      continue;
    }
    const Eigen::VectorXd slack = m * x - c;
    int add = -1;
    double worst_slack = -1e-10;
    for (int i = 0; i < nc; ++i)
      if (!active[i] && slack[i] < worst_slack) {
        worst_slack = slack[i];
        add = i;
      }
    if (add >= 0) {
      active[add] = true;
      continue;
    }
    return x;
  }
  throw std::runtime_error("active_set_qp: did not settle");
}

/// One Newton direction obtained from the full (unreduced) saddle system
///   [A  -M^T] [du     ]   [-r1]
///   [M  aH  ] [dlambda] = [-r2],
/// solved monolithically by sparse LU.
struct FullSaddleStep {
  Eigen::VectorXd du;
  Eigen::VectorXd dlambda;
};

inline FullSaddleStep full_saddle_step(const AssembledSystem& system, const ProximalConfig& config,
                                       const Eigen::VectorXd& u, const Eigen::VectorXd& lambda,
                                       const Eigen::VectorXd& psi_prev, double alpha) {
  Eigen::VectorXd r1, r2;
  proximal_residuals(system, config, u, lambda, psi_prev, alpha, r1, r2);
  const int n = static_cast<int>(system.A.rows());
  const int nc = system.mesh->n_cells();
  // must match the solver's (floored) Hessian so both paths solve the same system
  const NewtonStep probe = newton_step_direction(system, config, u, lambda, psi_prev, alpha);

  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < system.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < nc; ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.M, c); it; ++it) {
      trip.emplace_back(it.col(), n + c, -it.value());  // -M^T block
      trip.emplace_back(n + c, it.col(), it.value());   // M block
    }
    trip.emplace_back(n + c, n + c, alpha * probe.hess_diag[c]);
  }
  Eigen::SparseMatrix<double> full(n + nc, n + nc);
  full.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(n + nc);
  rhs.head(n) = -r1;
  rhs.tail(nc) = -r2;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(full);
  if (lu.info() != Eigen::Success) throw std::runtime_error("full_saddle_step: LU failed");
  const Eigen::VectorXd sol = lu.solve(rhs);
  return {sol.head(n), sol.tail(nc)};
}

inline std::mt19937& rng() {
  static std::mt19937 gen(20240817);
  return gen;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng());
}

}  // namespace proxdg::testing
