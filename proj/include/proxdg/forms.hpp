#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "proxdg/mesh.hpp"
#include "proxdg/spaces.hpp"

namespace proxdg {

enum class Method { IPDG, EG, HIP, HHO };

Method method_from_string(const std::string& name);
std::string to_string(Method m);

/// A discretization choice: penalized methods carry sigma > 0, HHO carries
/// the cell/facet degree pair (l,r) in {(0,0),(0,1),(1,1)}.
struct MethodKind {
  Method method = Method::IPDG;
  double sigma = 10.0;
  int cell_degree = 1;
  int facet_degree = 1;

  static MethodKind ipdg(double sigma = 10.0);
  static MethodKind eg(double sigma = 10.0);
  static MethodKind hip(double sigma = 10.0);
  static MethodKind hho(int cell_degree, int facet_degree);

  bool is_hybrid() const { return method == Method::HIP || method == Method::HHO; }
  std::string label() const;
};

SpaceKind space_of(const MethodKind& method);

/// Local HHO operators on one cell. Local dofs are ordered
/// [cell dofs | facet 0 dofs | facet 1 dofs | facet 2 dofs] (local facet i
/// opposite local vertex i, boundary data slots included).
struct HhoLocalOperators {
  /// Reconstruction into P^{r+1}(T), rows = scaled monomial coefficients.
  Eigen::MatrixXd reconstruction;
  /// Stabilization traces, (r+1) rows per facet in local facet order.
  Eigen::MatrixXd stabilization;
  /// The local bilinear form R^T Gs R + h_T^{-1} S^T M_F S.
  Eigen::MatrixXd bilinear;
};

HhoLocalOperators hho_local_operators(const Mesh& mesh, int cell, int cell_degree,
                                      int facet_degree);

/// Scaled monomial basis {1, x, y, x^2, xy, y^2} in (p - centroid)/h_T.
double monomial_value(const Mesh& mesh, int cell, int k, const Vec2& p);
Vec2 monomial_gradient(const Mesh& mesh, int cell, int k, const Vec2& p);

/// One assembled discretization on one mesh: the stiffness form on free
/// dofs, the cell-mean coupling realizing w -> (p(v), w), and the load with
/// all Dirichlet-data contributions folded in. Immutable once built.
struct AssembledSystem {
  MethodKind method;
  const Mesh* mesh = nullptr;
  DofSpace space;

  Eigen::SparseMatrix<double> A;  // symmetric, free x free
  Eigen::SparseMatrix<double> M;  // n_cells x free
  Eigen::VectorXd b;              // load, Nitsche and data folds included
  Eigen::VectorXd data;           // fixed boundary-data values
  Eigen::VectorXd m_data;         // coupling contribution of the data part
  Eigen::VectorXd dirichlet_shift;  // A_fd * data (for full-form products)
  double a_data_data = 0.0;         // data^T A_dd data

  Eigen::VectorXd obstacle_integral;  // per cell, int_T phi
  Eigen::VectorXd cell_area;          // per cell

  /// Per-cell free blocks of hybrid methods, in condensation order.
  struct CellBlocks {
    std::vector<int> cell_dofs;
    std::vector<int> facet_dofs;
    Eigen::MatrixXd a_cc, a_cf, a_ff;
    Eigen::VectorXd m_cell;  // (p(basis_i), 1)_T over cell dofs
  };
  std::vector<CellBlocks> blocks;  // empty for IPDG / EG

  /// HHO reconstruction matrices over full local dofs (data included).
  std::vector<Eigen::MatrixXd> reconstruction;

  /// a_h(u, u) over the full field, fixed data included.
  double full_quadratic(const Eigen::VectorXd& u) const;
  /// Discrete energy in folded form, 1/2 u^T A u - b^T u (differs from the
  /// data-complete energy by a constant).
  double energy(const Eigen::VectorXd& u) const;
  /// Cell means of p(u) scaled by |T|: M u + data contribution.
  Eigen::VectorXd cell_mean_integrals(const Eigen::VectorXd& u) const;
};

/// Assembles stiffness, coupling and load for a method. f is the right-hand
/// side, g the Dirichlet data (Nitsche right-hand sides for IPDG/EG, fixed
/// facet/vertex slots for hybrids and the EG lifting), phi the obstacle
/// (only its cell integrals enter the system).
AssembledSystem assemble_system(const Mesh& mesh, const MethodKind& method, const ScalarFn& f,
                                const ScalarFn& g, const ScalarFn& phi, int quad_degree = 6);

/// The symmetric interior-penalty form on CellDG(1) or the EG subspace.
AssembledSystem assemble_ipdg(const Mesh& mesh, const SpaceKind& space, double sigma,
                              const ScalarFn& f, const ScalarFn& g, const ScalarFn& phi,
                              int quad_degree = 6);
AssembledSystem assemble_hip(const Mesh& mesh, double sigma, const ScalarFn& f, const ScalarFn& g,
                             const ScalarFn& phi, int quad_degree = 6);
AssembledSystem assemble_hho(const Mesh& mesh, int cell_degree, int facet_degree, const ScalarFn& f,
                             const ScalarFn& g, const ScalarFn& phi, int quad_degree = 6);

/// Checks positive definiteness of the assembled stiffness by attempting a
/// sparse Cholesky factorization; throws with the offending method and sigma
/// on failure.
void verify_coercive(const AssembledSystem& system);

}  // namespace proxdg
