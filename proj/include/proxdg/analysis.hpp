#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "proxdg/forms.hpp"
#include "proxdg/mesh.hpp"
#include "proxdg/spaces.hpp"

namespace proxdg {

using GradFn = std::function<Vec2(const Vec2&)>;

/// A cellwise polynomial field: nodal barycentric basis for degrees 0/1,
/// scaled monomials for reconstructed fields.
struct CellPolyField {
  int degree = 1;
  bool monomial = false;
  Eigen::MatrixXd coeffs;  // n_cells x basis size

  double value(const Mesh& mesh, int cell, const Vec2& p,
               const std::array<double, 3>& bary) const;
  Vec2 gradient(const Mesh& mesh, int cell, const Vec2& p,
                const std::array<double, 3>& bary) const;
};

/// The observable component p(u_h) as a cellwise polynomial (EG data lifting
/// and hybrid cell blocks resolved).
CellPolyField cell_component(const AssembledSystem& system, const Eigen::VectorXd& u);

/// HHO reconstructed solution, cellwise in P^{r+1}.
CellPolyField reconstruct_solution(const AssembledSystem& system, const Eigen::VectorXd& u);

/// L2 / broken-H1 / DG-norm errors of a cell field against an exact solution
/// (the DG norm adds h_F^{-1}-weighted jumps, boundary facets included).
struct FieldErrors {
  double l2 = 0.0;
  double h1 = 0.0;
  double dg = 0.0;
};
FieldErrors error_norms(const Mesh& mesh, const CellPolyField& field, const ScalarFn& exact,
                        const GradFn& exact_grad, int quad_degree = 6);

/// L2 error of the cellwise-constant multiplier.
double lambda_l2_error(const Mesh& mesh, const Eigen::VectorXd& lambda, const ScalarFn& exact,
                       int quad_degree = 6);

/// L2 error of the bound-preserving approximation o_h = phi + margin.
double o_l2_error(const Mesh& mesh, const Eigen::VectorXd& o_margin, const ScalarFn& obstacle,
                  const ScalarFn& exact, int quad_degree = 6);

/// L2 norm of a cellwise-constant field.
double cellwise_l2_norm(const Mesh& mesh, const Eigen::VectorXd& values);

/// Empirical orders of convergence between consecutive levels. Throws on
/// nonpositive errors or non-decreasing mesh sizes.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs);

/// Per-cell feasibility margins int_T (p(u_h) - phi).
Eigen::VectorXd feasibility_margins(const AssembledSystem& system, const Eigen::VectorXd& u);

/// Nonnegative vertex-patch weights reproducing each interior vertex from
/// the incident cell centroids (convex-combination constraints).
struct SmootherWeights {
  struct Entry {
    int cell;
    double weight;
  };
  std::vector<std::vector<Entry>> per_vertex;  // empty for boundary vertices
};

SmootherWeights compute_weights(const Mesh& mesh);

/// Constraint-aware Clement smoother: nodal value at each interior vertex is
/// the weighted combination of incident cell means; boundary values are
/// zero. Input and output are cell means / vertex values.
Eigen::VectorXd clement_smooth(const Mesh& mesh, const SmootherWeights& weights,
                               const Eigen::VectorXd& cell_means);

/// L2 norm of the conforming P1 field with the given nodal values.
double p1_nodal_l2_norm(const Mesh& mesh, const Eigen::VectorXd& nodal_values);

/// Gram matrix of the DG norm on broken P1 (broken gradients plus
/// h_F^{-1}-weighted jumps over all facets).
Eigen::SparseMatrix<double> dg_norm_gram(const Mesh& mesh);

}  // namespace proxdg
