#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "proxdg/mesh.hpp"

namespace proxdg {

using ScalarFn = std::function<double(const Vec2&)>;

enum class SpaceType { CellDG, FacetDG, EG, Hybrid };

/// Which discrete space lives on the mesh:
///  - CellDG(l): broken polynomials of degree l on cells, l in {0,1};
///  - FacetDG(r): broken polynomials of degree r on facets, with boundary
///    facets carrying fixed data slots instead of unknowns;
///  - EG: conforming P1 hats at interior vertices plus cellwise constants
///    (boundary hats are data slots);
///  - Hybrid(l,r): CellDG(l) x FacetDG(r).
struct SpaceKind {
  SpaceType type = SpaceType::CellDG;
  int cell_degree = 1;
  int facet_degree = 1;

  static SpaceKind cell_dg(int degree) { return {SpaceType::CellDG, degree, 0}; }
  static SpaceKind facet_dg(int degree) { return {SpaceType::FacetDG, 0, degree}; }
  static SpaceKind eg() { return {SpaceType::EG, 1, 0}; }
  static SpaceKind hybrid(int cell_degree, int facet_degree) {
    return {SpaceType::Hybrid, cell_degree, facet_degree};
  }
};

/// Dimension of P^d on a triangle.
inline int cell_basis_size(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Degree-of-freedom layout: cell/facet tables mapping local to global
/// indices, with fixed boundary-data slots kept separate from free unknowns.
/// Immutable after construction.
class DofSpace {
 public:
  DofSpace(const Mesh& mesh, SpaceKind kind);

  const Mesh& mesh() const { return *mesh_; }
  const SpaceKind& kind() const { return kind_; }

  int n_dofs() const { return n_dofs_; }
  int n_data() const { return n_data_; }

  int n_cell_dofs_local() const { return n_cell_local_; }
  int n_facet_dofs_local() const { return n_facet_local_; }

  /// Global index of local cell dof i (CellDG, Hybrid; EG constant via
  /// eg_cell_dof).
  int cell_dof(int cell, int i) const { return cell * n_cell_local_ + i; }

  /// Global free index of local facet dof i, or -1 on boundary facets.
  int facet_dof(int facet, int i) const {
    int off = facet_offset_[facet];
    return off < 0 ? -1 : off + i;
  }
  /// Data-slot index of local facet dof i, or -1 on interior facets.
  int facet_data_slot(int facet, int i) const {
    int off = facet_data_offset_[facet];
    return off < 0 ? -1 : off + i;
  }

  /// EG: hat dof of an interior vertex, or -1 for boundary vertices.
  int vertex_dof(int v) const { return vertex_dof_[v]; }
  /// EG: data slot of a boundary vertex hat, or -1 for interior vertices.
  int vertex_data_slot(int v) const { return vertex_data_[v]; }
  /// EG: dof of the cellwise-constant enrichment.
  int eg_cell_dof(int cell) const { return n_interior_vertex_dofs_ + cell; }

 private:
  const Mesh* mesh_;
  SpaceKind kind_;
  int n_dofs_ = 0;
  int n_data_ = 0;
  int n_cell_local_ = 0;
  int n_facet_local_ = 0;
  int n_interior_vertex_dofs_ = 0;
  std::vector<int> facet_offset_;
  std::vector<int> facet_data_offset_;
  std::vector<int> vertex_dof_;
  std::vector<int> vertex_data_;
};

/// Coefficients of a discrete field: free unknowns plus fixed boundary data.
struct FieldVector {
  Eigen::VectorXd coeffs;
  Eigen::VectorXd data;
};

FieldVector zero_field(const DofSpace& space);

/// Nodal P1 basis values (barycentric coordinates) and gradients on a cell.
std::array<double, 3> p1_values(const std::array<double, 3>& bary);
std::array<Vec2, 3> p1_gradients(const Mesh& mesh, int cell);

/// Legendre basis on a facet at parameter xi in [-1,1]: {1, xi}.
double facet_basis(int i, double xi);

/// Value of the cell component of a field at a barycentric point.
/// Throws if the point lies outside the closed cell.
double evaluate(const DofSpace& space, const FieldVector& f, int cell,
                const std::array<double, 3>& bary);

/// Gradient of the cell component (constant per cell for degrees <= 1).
Vec2 evaluate_gradient(const DofSpace& space, const FieldVector& f, int cell,
                       const std::array<double, 3>& bary);

/// Facet-component value at parameter xi (FacetDG and Hybrid spaces); reads
/// the data slot on boundary facets.
double evaluate_facet(const DofSpace& space, const FieldVector& f, int facet, double xi);

/// Elementwise L2-orthogonal projection onto CellDG(degree).
FieldVector project_cell(const Mesh& mesh, int degree, const ScalarFn& f, int quad_degree = 6);

/// Facetwise L2-orthogonal projection onto FacetDG(degree); boundary facets
/// land in the data slots.
FieldVector project_facet(const Mesh& mesh, int degree, const ScalarFn& g, int quad_degree = 6);

/// The interpolant onto a method's space: cellwise L2 projection combined
/// with the facet projection of the (trace) average. For EG this is the
/// global L2-orthogonal projection onto the EG space. Boundary data slots
/// are left at zero.
FieldVector interpolate(const DofSpace& space, const ScalarFn& v, int quad_degree = 6);

/// Sparse embedding of the EG space into broken P1 cell dofs, split into the
/// free-dof and data-slot column blocks.
struct EgEmbedding {
  Eigen::SparseMatrix<double> free;  // n_broken x n_dofs
  Eigen::SparseMatrix<double> data;  // n_broken x n_data
};
EgEmbedding eg_embedding(const DofSpace& space);

/// Gram (mass) matrix of the free basis, used for projections and the basis
/// linear-independence check.
Eigen::SparseMatrix<double> mass_matrix(const DofSpace& space);

}  // namespace proxdg
