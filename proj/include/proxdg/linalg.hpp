#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace proxdg {

/// Options for the symmetric positive definite solve: sparse Cholesky by
/// default up to the size cap, Jacobi-preconditioned conjugate gradients
/// beyond it (or when forced).
struct SpdSolveOptions {
  double tol = 1e-12;
  int max_iter = 20000;
  int cholesky_size_cap = 200000;
  bool force_cg = false;
};

/// Solves A x = b for SPD A. Throws with `context` in the message when a
/// non-SPD matrix is detected (Cholesky pivot failure or CG breakdown) or
/// the iteration does not reach the tolerance.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                          const SpdSolveOptions& options = {}, const std::string& context = "");

/// One cell's contribution to a saddle Newton system: the SPD cell block
/// (multiplier already eliminated), its coupling to the cell's facet dofs,
/// and the local right-hand sides.
struct CellSaddleBlock {
  std::vector<int> cell_dofs;   // global ids (only used for back-substitution)
  std::vector<int> facet_dofs;  // global ids into the condensed system
  Eigen::MatrixXd a_cc;         // SPD
  Eigen::MatrixXd a_cf;
  Eigen::MatrixXd a_ff;
  Eigen::VectorXd rhs_c;
};

/// Per-cell static condensation: eliminates the cell blocks, leaving an SPD
/// system on facet unknowns, and retains the factorizations needed to
/// recover the cell unknowns exactly.
class CondensedSystem {
 public:
  CondensedSystem(std::vector<CellSaddleBlock> blocks, int n_facet_dofs,
                  const Eigen::VectorXd& rhs_facet);

  const Eigen::SparseMatrix<double>& matrix() const { return S_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  /// Exact back-substitution of the eliminated cell unknowns.
  /// Returns the full solution ordered by the stored global ids.
  void recover(const Eigen::VectorXd& facet_solution, Eigen::VectorXd& full_solution) const;

  int n_facet_dofs() const { return static_cast<int>(S_.rows()); }

 private:
  std::vector<CellSaddleBlock> blocks_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  Eigen::SparseMatrix<double> S_;
  Eigen::VectorXd rhs_;
};

}  // namespace proxdg
