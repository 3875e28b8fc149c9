#include "proxdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace proxdg {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

// 90-degree clockwise rotation.
Vec2 rotate_cw(const Vec2& t) { return Vec2(t.y(), -t.x()); }

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (vertices_.empty() || cells_.empty())
    throw std::invalid_argument("mesh: empty vertex or cell list");
  for (auto& c : cells_) {
    for (int v : c)
      if (v < 0 || v >= n_vertices()) throw std::invalid_argument("mesh: cell index out of range");
    double a = signed_area(vertices_[c[0]], vertices_[c[1]], vertices_[c[2]]);
    if (a < 0.0) std::swap(c[1], c[2]);  // normalize to CCW
    if (std::abs(a) < 1e-14) throw std::invalid_argument("mesh: degenerate cell");
  }
  build_connectivity();
}

void Mesh::build_connectivity() {
  const int nc = n_cells();
  cell_area_.resize(nc);
  cell_diameter_.resize(nc);
  cell_facets_.assign(nc, {-1, -1, -1});
  cell_normals_.assign(nc, {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()});

  total_area_ = 0.0;
  h_ = 0.0;
  for (int c = 0; c < nc; ++c) {
    const auto& cl = cells_[c];
    const Vec2 &p0 = vertices_[cl[0]], &p1 = vertices_[cl[1]], &p2 = vertices_[cl[2]];
    cell_area_[c] = signed_area(p0, p1, p2);
    total_area_ += cell_area_[c];
    cell_diameter_[c] = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
    h_ = std::max(h_, cell_diameter_[c]);
  }

  // One facet per undirected vertex pair; local facet i is opposite vertex i.
  std::map<std::array<int, 2>, int> facet_of;
  facets_.clear();
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < 3; ++i) {
      int a = cells_[c][(i + 1) % 3];
      int b = cells_[c][(i + 2) % 3];
      std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = facet_of.try_emplace(key, static_cast<int>(facets_.size()));
      if (inserted) {
        Facet f;
        f.vertices = key;
        f.minus_cell = c;
        f.diameter = (vertices_[key[1]] - vertices_[key[0]]).norm();
        facets_.push_back(f);
      } else {
        Facet& f = facets_[it->second];
        if (f.plus_cell >= 0 || f.minus_cell == c)
          throw std::invalid_argument("mesh: facet shared by more than two cells");
        f.plus_cell = c;
      }
      cell_facets_[c][i] = it->second;
    }
  }

  // Fix normals: clockwise rotation of the ascending-index tangent, then
  // minus/plus assigned so the normal points from minus into plus. Boundary
  // normals always point out of the domain.
  n_boundary_facets_ = 0;
  for (auto& f : facets_) {
    const Vec2& a = vertices_[f.vertices[0]];
    const Vec2& b = vertices_[f.vertices[1]];
    const Vec2 mid = 0.5 * (a + b);
    f.normal = rotate_cw((b - a).normalized());
    if (f.is_boundary()) {
      ++n_boundary_facets_;
      if (f.normal.dot(centroid(f.minus_cell) - mid) > 0.0) f.normal = -f.normal;
    } else {
      // keep the fixed normal; swap cells so it points minus -> plus
      if (f.normal.dot(centroid(f.plus_cell) - mid) < 0.0) std::swap(f.minus_cell, f.plus_cell);
    }
  }

  // Outward cell normals per local facet; the facet normal leaves its minus cell.
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < 3; ++i) {
      const Facet& f = facets_[cell_facets_[c][i]];
      cell_normals_[c][i] = (f.minus_cell == c) ? f.normal : Vec2(-f.normal);
    }
  }

  vertex_on_boundary_.assign(n_vertices(), false);
  for (const auto& f : facets_)
    if (f.is_boundary()) {
      vertex_on_boundary_[f.vertices[0]] = true;
      vertex_on_boundary_[f.vertices[1]] = true;
    }
  n_interior_vertices_ = static_cast<int>(
      std::count(vertex_on_boundary_.begin(), vertex_on_boundary_.end(), false));

  vertex_cells_.assign(n_vertices(), {});
  for (int c = 0; c < nc; ++c)
    for (int v : cells_[c]) vertex_cells_[v].push_back(c);
}

Vec2 Mesh::centroid(int c) const {
  const auto& cl = cells_[c];
  return (vertices_[cl[0]] + vertices_[cl[1]] + vertices_[cl[2]]) / 3.0;
}

Vec2 Mesh::point(int c, const std::array<double, 3>& bary) const {
  const auto& cl = cells_[c];
  return bary[0] * vertices_[cl[0]] + bary[1] * vertices_[cl[1]] + bary[2] * vertices_[cl[2]];
}

Vec2 Mesh::facet_point(int f, double xi) const {
  const Facet& fc = facets_[f];
  const Vec2& a = vertices_[fc.vertices[0]];
  const Vec2& b = vertices_[fc.vertices[1]];
  return 0.5 * (1.0 - xi) * a + 0.5 * (1.0 + xi) * b;
}

Mesh Mesh::with_flipped_facet(int f) const {
  Mesh copy = *this;
  Facet& fc = copy.facets_[f];
  if (fc.is_boundary()) throw std::invalid_argument("mesh: cannot flip a boundary facet");
  std::swap(fc.minus_cell, fc.plus_cell);
  fc.normal = -fc.normal;
  // keep outward cell normals consistent with the stored facet normal
  for (int c : {fc.minus_cell, fc.plus_cell})
    for (int i = 0; i < 3; ++i)
      if (copy.cell_facets_[c][i] == f)
        copy.cell_normals_[c][i] = (fc.minus_cell == c) ? fc.normal : Vec2(-fc.normal);
  return copy;
}

Mesh generate_structured(int n, const Rect& domain) {
  if (n < 1) throw std::invalid_argument("generate_structured: need n >= 1");
  if (domain.width() <= 0.0 || domain.height() <= 0.0)
    throw std::invalid_argument("generate_structured: degenerate rectangle");

  std::vector<Vec2> vertices;
  vertices.reserve((n + 1) * (n + 1));
  const double dx = domain.width() / n, dy = domain.height() / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(domain.x0 + i * dx, domain.y0 + j * dy);

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      // split along the bottom-left -> top-right diagonal
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  return Mesh(std::move(vertices), std::move(cells));
}

JumpAverageFrame jump_average_frame(const Mesh& mesh, int facet) {
  const Facet& f = mesh.facet(facet);
  return {f.minus_cell, f.plus_cell, f.normal};
}

double jump(const Mesh& mesh, int facet, double minus_value, double plus_value) {
  return mesh.facet(facet).is_boundary() ? minus_value : minus_value - plus_value;
}

double average(const Mesh& mesh, int facet, double minus_value, double plus_value) {
  return mesh.facet(facet).is_boundary() ? minus_value : 0.5 * (minus_value + plus_value);
}

Mesh read_mesh_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  if (!j.contains("vertices") || !j.contains("cells"))
    throw std::invalid_argument("mesh json: missing 'vertices' or 'cells'");
  std::vector<Vec2> vertices;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument("mesh json: bad vertex");
    vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  std::vector<std::array<int, 3>> cells;
  for (const auto& c : j["cells"]) {
    if (!c.is_array() || c.size() != 3) throw std::invalid_argument("mesh json: bad cell");
    cells.push_back({c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
  }
  return Mesh(std::move(vertices), std::move(cells));
}

void write_mesh_json(const Mesh& mesh, std::ostream& out) {
  nlohmann::json j;
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (int v = 0; v < mesh.n_vertices(); ++v)
    verts.push_back({mesh.vertex(v).x(), mesh.vertex(v).y()});
  auto& cells = j["cells"] = nlohmann::json::array();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cl = mesh.cell(c);
    cells.push_back({cl[0], cl[1], cl[2]});
  }
  out << j.dump(2) << "\n";
}

}  // namespace proxdg
