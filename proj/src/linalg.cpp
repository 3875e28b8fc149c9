#include "proxdg/linalg.hpp"

#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace proxdg {

Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                          const SpdSolveOptions& options, const std::string& context) {
  const std::string where = context.empty() ? std::string("solve_spd") : context;
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument(where + ": dimension mismatch");

  if (!options.force_cg && A.rows() <= options.cholesky_size_cap) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error(where + ": Cholesky failed, matrix is not positive definite");
    Eigen::VectorXd x = llt.solve(b);
    const double res = (A * x - b).norm();
    if (!(res <= options.tol * std::max(1.0, b.norm()) * 1e3))
      throw std::runtime_error(where + ": Cholesky solve residual too large");
    return x;
  }

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(options.tol);
  cg.setMaxIterations(options.max_iter);
  cg.compute(A);
  const Eigen::VectorXd x = cg.solve(b);
  if (cg.info() != Eigen::Success)
    throw std::runtime_error(where + ": conjugate gradients did not converge (matrix not SPD "
                                     "or max iterations reached)");
  return x;
}

CondensedSystem::CondensedSystem(std::vector<CellSaddleBlock> blocks, int n_facet_dofs,
                                 const Eigen::VectorXd& rhs_facet)
    : blocks_(std::move(blocks)) {
  factors_.reserve(blocks_.size());
  rhs_ = rhs_facet;
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& blk : blocks_) {
    factors_.emplace_back(blk.a_cc);
    if (factors_.back().info() != Eigen::Success)
      throw std::runtime_error("condense: singular cell block");
    const Eigen::MatrixXd ainv_acf = factors_.back().solve(blk.a_cf);
    const Eigen::MatrixXd s_local = blk.a_ff - blk.a_cf.transpose() * ainv_acf;
    const Eigen::VectorXd r_local = blk.a_cf.transpose() * factors_.back().solve(blk.rhs_c);
    const int nf = static_cast<int>(blk.facet_dofs.size());
    for (int i = 0; i < nf; ++i) {
      rhs_[blk.facet_dofs[i]] -= r_local[i];
      for (int j = 0; j < nf; ++j)
        trip.emplace_back(blk.facet_dofs[i], blk.facet_dofs[j], s_local(i, j));
    }
  }
  S_.resize(n_facet_dofs, n_facet_dofs);
  S_.setFromTriplets(trip.begin(), trip.end());
}

void CondensedSystem::recover(const Eigen::VectorXd& facet_solution,
                              Eigen::VectorXd& full_solution) const {
  for (size_t bi = 0; bi < blocks_.size(); ++bi) {
    const auto& blk = blocks_[bi];
    Eigen::VectorXd uf(blk.facet_dofs.size());
    for (size_t i = 0; i < blk.facet_dofs.size(); ++i) uf[i] = facet_solution[blk.facet_dofs[i]];
    const Eigen::VectorXd uc = factors_[bi].solve(blk.rhs_c - blk.a_cf * uf);
    for (size_t i = 0; i < blk.cell_dofs.size(); ++i) full_solution[blk.cell_dofs[i]] = uc[i];
  }
}

}  // namespace proxdg
