#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace proxdg {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned rectangle (x0,y0)-(x1,y1).
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// An edge of the triangulation with a fixed unit normal. The normal points
/// from the minus cell into the plus cell; on boundary facets it points out
/// of the domain and plus_cell is -1.
struct Facet {
  std::array<int, 2> vertices{};  // ascending global indices
  int minus_cell = -1;
  int plus_cell = -1;
  Vec2 normal = Vec2::Zero();
  double diameter = 0.0;  // edge length

  bool is_boundary() const { return plus_cell < 0; }
};

/// Conforming triangulation of a polygonal domain with full cell/facet
/// connectivity. Immutable after construction; concurrent reads are safe.
class Mesh {
 public:
  /// Builds connectivity from raw vertex coordinates and CCW vertex triples.
  /// Cells given in clockwise order are reoriented.
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells);

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_facets() const { return static_cast<int>(facets_.size()); }
  int n_boundary_facets() const { return n_boundary_facets_; }
  int n_interior_vertices() const { return n_interior_vertices_; }

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  const Facet& facet(int f) const { return facets_[f]; }
  const std::vector<Facet>& facets() const { return facets_; }

  /// Facet opposite the local vertex i of cell c.
  int cell_facet(int c, int i) const { return cell_facets_[c][i]; }
  /// Outward unit normal of cell c on its local facet i.
  const Vec2& cell_normal(int c, int i) const { return cell_normals_[c][i]; }

  double cell_area(int c) const { return cell_area_[c]; }
  double cell_diameter(int c) const { return cell_diameter_[c]; }
  double h() const { return h_; }
  double total_area() const { return total_area_; }

  Vec2 centroid(int c) const;
  bool vertex_on_boundary(int v) const { return vertex_on_boundary_[v]; }

  /// Cells incident to a vertex, in ascending cell order.
  const std::vector<int>& vertex_cells(int v) const { return vertex_cells_[v]; }

  /// Vertex coordinates of a barycentric point inside cell c.
  Vec2 point(int c, const std::array<double, 3>& bary) const;

  /// Point on facet f at parameter xi in [-1,1] (xi = -1 is the facet's
  /// first, i.e. lower-index, vertex).
  Vec2 facet_point(int f, double xi) const;

  /// Test hook: reverses the stored orientation of one facet (swaps the
  /// minus/plus cells and negates the normal). Jumps and averages built on
  /// the returned mesh must leave assembled forms unchanged.
  Mesh with_flipped_facet(int f) const;

 private:
  void build_connectivity();

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 3>> cell_facets_;
  std::vector<std::array<Vec2, 3>> cell_normals_;
  std::vector<double> cell_area_;
  std::vector<double> cell_diameter_;
  std::vector<bool> vertex_on_boundary_;
  std::vector<std::vector<int>> vertex_cells_;
  int n_boundary_facets_ = 0;
  int n_interior_vertices_ = 0;
  double h_ = 0.0;
  double total_area_ = 0.0;
};

/// Uniform triangulation of a rectangle: n x n grid squares, each split along
/// the bottom-left to top-right diagonal. Throws on n < 1 or a degenerate
/// rectangle.
Mesh generate_structured(int n, const Rect& domain);

/// The frame in which jumps and averages on a facet are evaluated:
/// [v] = v|minus - v|plus and {v} = (v|minus + v|plus)/2. On boundary facets
/// plus_cell is -1 and both operators reduce to the trace.
struct JumpAverageFrame {
  int minus_cell;
  int plus_cell;
  Vec2 normal;
};

JumpAverageFrame jump_average_frame(const Mesh& mesh, int facet);

/// Jump and average of per-cell trace values in the facet's frame.
double jump(const Mesh& mesh, int facet, double minus_value, double plus_value);
double average(const Mesh& mesh, int facet, double minus_value, double plus_value);

/// JSON exchange format: { "vertices": [[x,y],...], "cells": [[i,j,k],...] },
/// 0-based indices. Connectivity is always recomputed on load.
Mesh read_mesh_json(std::istream& in);
void write_mesh_json(const Mesh& mesh, std::ostream& out);

}  // namespace proxdg
