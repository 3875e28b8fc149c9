#include "proxdg/spaces.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCholesky>

#include "proxdg/quadrature.hpp"

namespace proxdg {

DofSpace::DofSpace(const Mesh& mesh, SpaceKind kind) : mesh_(&mesh), kind_(kind) {
  const int nc = mesh.n_cells();
  const int nf = mesh.n_facets();
  switch (kind.type) {
    case SpaceType::CellDG:
      if (kind.cell_degree < 0 || kind.cell_degree > 1)
        throw std::invalid_argument("DofSpace: cell degree must be 0 or 1");
      n_cell_local_ = cell_basis_size(kind.cell_degree);
      n_dofs_ = nc * n_cell_local_;
      break;
    case SpaceType::FacetDG:
    case SpaceType::Hybrid: {
      if (kind.type == SpaceType::Hybrid) {
        if (kind.cell_degree < 0 || kind.cell_degree > 1)
          throw std::invalid_argument("DofSpace: cell degree must be 0 or 1");
        n_cell_local_ = cell_basis_size(kind.cell_degree);
      }
      if (kind.facet_degree < 0 || kind.facet_degree > 1)
        throw std::invalid_argument("DofSpace: facet degree must be 0 or 1");
      n_facet_local_ = kind.facet_degree + 1;
      facet_offset_.assign(nf, -1);
      facet_data_offset_.assign(nf, -1);
      int off = nc * n_cell_local_;
      int data = 0;
      for (int f = 0; f < nf; ++f) {
        if (mesh.facet(f).is_boundary()) {
          facet_data_offset_[f] = data;
          data += n_facet_local_;
        } else {
          facet_offset_[f] = off;
          off += n_facet_local_;
        }
      }
      n_dofs_ = off;
      n_data_ = data;
      break;
    }
    case SpaceType::EG: {
      n_cell_local_ = 0;
      vertex_dof_.assign(mesh.n_vertices(), -1);
      vertex_data_.assign(mesh.n_vertices(), -1);
      int off = 0, data = 0;
      for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (mesh.vertex_on_boundary(v))
          vertex_data_[v] = data++;
        else
          vertex_dof_[v] = off++;
      }
      n_interior_vertex_dofs_ = off;
      n_dofs_ = off + nc;
      n_data_ = data;
      break;
    }
  }
}

FieldVector zero_field(const DofSpace& space) {
  return {Eigen::VectorXd::Zero(space.n_dofs()), Eigen::VectorXd::Zero(space.n_data())};
}

std::array<double, 3> p1_values(const std::array<double, 3>& bary) { return bary; }

std::array<Vec2, 3> p1_gradients(const Mesh& mesh, int cell) {
  const auto& cl = mesh.cell(cell);
  const double inv2a = 1.0 / (2.0 * mesh.cell_area(cell));
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Vec2 e = mesh.vertex(cl[(i + 2) % 3]) - mesh.vertex(cl[(i + 1) % 3]);
    g[i] = inv2a * Vec2(-e.y(), e.x());
  }
  return g;
}

double facet_basis(int i, double xi) { return i == 0 ? 1.0 : xi; }

namespace {

void check_inside(const std::array<double, 3>& bary) {
  const double tol = 1e-12;
  if (bary[0] < -tol || bary[1] < -tol || bary[2] < -tol ||
      std::abs(bary[0] + bary[1] + bary[2] - 1.0) > 1e-10)
    throw std::invalid_argument("evaluate: point outside cell");
}

// Value of an EG field (interior hats + cell constant) at a barycentric point.
double eg_value(const DofSpace& space, const FieldVector& f, int cell,
                const std::array<double, 3>& bary) {
  const Mesh& mesh = space.mesh();
  const auto& cl = mesh.cell(cell);
  double v = f.coeffs[space.eg_cell_dof(cell)];
  for (int i = 0; i < 3; ++i) {
    const int hat = space.vertex_dof(cl[i]);
    if (hat >= 0)
      v += f.coeffs[hat] * bary[i];
    else
      v += f.data[space.vertex_data_slot(cl[i])] * bary[i];
  }
  return v;
}

}  // namespace

double evaluate(const DofSpace& space, const FieldVector& f, int cell,
                const std::array<double, 3>& bary) {
  check_inside(bary);
  switch (space.kind().type) {
    case SpaceType::EG:
      return eg_value(space, f, cell, bary);
    case SpaceType::CellDG:
    case SpaceType::Hybrid: {
      if (space.n_cell_dofs_local() == 1) return f.coeffs[space.cell_dof(cell, 0)];
      double v = 0.0;
      for (int i = 0; i < 3; ++i) v += f.coeffs[space.cell_dof(cell, i)] * bary[i];
      return v;
    }
    case SpaceType::FacetDG:
      throw std::invalid_argument("evaluate: facet space has no cell component");
  }
  return 0.0;
}

Vec2 evaluate_gradient(const DofSpace& space, const FieldVector& f, int cell,
                       const std::array<double, 3>& bary) {
  check_inside(bary);
  const Mesh& mesh = space.mesh();
  switch (space.kind().type) {
    case SpaceType::EG: {
      const auto& cl = mesh.cell(cell);
      const auto grads = p1_gradients(mesh, cell);
      Vec2 g = Vec2::Zero();
      for (int i = 0; i < 3; ++i) {
        const int hat = space.vertex_dof(cl[i]);
        const double c = hat >= 0 ? f.coeffs[hat] : f.data[space.vertex_data_slot(cl[i])];
        g += c * grads[i];
      }
      return g;
    }
    case SpaceType::CellDG:
    case SpaceType::Hybrid: {
      if (space.n_cell_dofs_local() == 1) return Vec2::Zero();
      const auto grads = p1_gradients(mesh, cell);
      Vec2 g = Vec2::Zero();
      for (int i = 0; i < 3; ++i) g += f.coeffs[space.cell_dof(cell, i)] * grads[i];
      return g;
    }
    case SpaceType::FacetDG:
      throw std::invalid_argument("evaluate_gradient: facet space has no cell component");
  }
  return Vec2::Zero();
}

double evaluate_facet(const DofSpace& space, const FieldVector& f, int facet, double xi) {
  if (space.n_facet_dofs_local() == 0)
    throw std::invalid_argument("evaluate_facet: space has no facet component");
  double v = 0.0;
  for (int i = 0; i < space.n_facet_dofs_local(); ++i) {
    const int dof = space.facet_dof(facet, i);
    const double c = dof >= 0 ? f.coeffs[dof] : f.data[space.facet_data_slot(facet, i)];
    v += c * facet_basis(i, xi);
  }
  return v;
}

FieldVector project_cell(const Mesh& mesh, int degree, const ScalarFn& f, int quad_degree) {
  DofSpace space(mesh, SpaceKind::cell_dg(degree));
  FieldVector out = zero_field(space);
  const TriangleRule& rule = triangle_rule(quad_degree);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double area = mesh.cell_area(c);
    if (degree == 0) {
      double mean = 0.0;
      for (size_t q = 0; q < rule.points.size(); ++q)
        mean += rule.weights[q] * f(mesh.point(c, rule.points[q]));
      out.coeffs[space.cell_dof(c, 0)] = mean;  // weights sum to one
    } else {
      Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
      Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const auto& b = rule.points[q];
        const double w = rule.weights[q] * area;
        const double fv = f(mesh.point(c, b));
        for (int i = 0; i < 3; ++i) {
          rhs[i] += w * fv * b[i];
          for (int j = 0; j < 3; ++j) mass(i, j) += w * b[i] * b[j];
        }
      }
      const Eigen::Vector3d coef = mass.ldlt().solve(rhs);
      for (int i = 0; i < 3; ++i) out.coeffs[space.cell_dof(c, i)] = coef[i];
    }
  }
  return out;
}

FieldVector project_facet(const Mesh& mesh, int degree, const ScalarFn& g, int quad_degree) {
  DofSpace space(mesh, SpaceKind::facet_dg(degree));
  FieldVector out = zero_field(space);
  const SegmentRule& rule = segment_rule(quad_degree);
  for (int fct = 0; fct < mesh.n_facets(); ++fct) {
    // Legendre basis is L2-orthogonal on the facet: mass = diag(|F|, |F|/3),
    // and the half-length Jacobian cancels in the ratio.
    double m0 = 0.0, m1 = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double xi = rule.points[q];
      const double gv = g(mesh.facet_point(fct, xi));
      m0 += rule.weights[q] * gv;
      m1 += rule.weights[q] * gv * xi;
    }
    const double c0 = m0 / 2.0;
    const double c1 = 3.0 * m1 / 2.0;
    for (int i = 0; i < space.n_facet_dofs_local(); ++i) {
      const double ci = i == 0 ? c0 : c1;
      const int dof = space.facet_dof(fct, i);
      if (dof >= 0)
        out.coeffs[dof] = ci;
      else
        out.data[space.facet_data_slot(fct, i)] = ci;
    }
  }
  return out;
}

EgEmbedding eg_embedding(const DofSpace& space) {
  if (space.kind().type != SpaceType::EG)
    throw std::invalid_argument("eg_embedding: not an EG space");
  const Mesh& mesh = space.mesh();
  const int n_broken = 3 * mesh.n_cells();
  std::vector<Eigen::Triplet<double>> tf, td;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cl = mesh.cell(c);
    for (int i = 0; i < 3; ++i) {
      const int row = 3 * c + i;
      tf.emplace_back(row, space.eg_cell_dof(c), 1.0);
      const int hat = space.vertex_dof(cl[i]);
      if (hat >= 0)
        tf.emplace_back(row, hat, 1.0);
      else
        td.emplace_back(row, space.vertex_data_slot(cl[i]), 1.0);
    }
  }
  EgEmbedding e;
  e.free.resize(n_broken, space.n_dofs());
  e.data.resize(n_broken, std::max(space.n_data(), 0));
  e.free.setFromTriplets(tf.begin(), tf.end());
  e.data.setFromTriplets(td.begin(), td.end());
  return e;
}

Eigen::SparseMatrix<double> mass_matrix(const DofSpace& space) {
  const Mesh& mesh = space.mesh();
  std::vector<Eigen::Triplet<double>> trip;
  switch (space.kind().type) {
    case SpaceType::CellDG:
    case SpaceType::Hybrid: {
      const int nl = space.n_cell_dofs_local();
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const double a = mesh.cell_area(c);
        if (nl == 1) {
          trip.emplace_back(space.cell_dof(c, 0), space.cell_dof(c, 0), a);
        } else {
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              trip.emplace_back(space.cell_dof(c, i), space.cell_dof(c, j),
                                a / 12.0 * (i == j ? 2.0 : 1.0));
        }
      }
      if (space.kind().type == SpaceType::Hybrid) {
        for (int f = 0; f < mesh.n_facets(); ++f) {
          if (mesh.facet(f).is_boundary()) continue;
          const double len = mesh.facet(f).diameter;
          for (int i = 0; i < space.n_facet_dofs_local(); ++i)
            trip.emplace_back(space.facet_dof(f, i), space.facet_dof(f, i),
                              i == 0 ? len : len / 3.0);
        }
      }
      break;
    }
    case SpaceType::FacetDG: {
      for (int f = 0; f < mesh.n_facets(); ++f) {
        if (mesh.facet(f).is_boundary()) continue;
        const double len = mesh.facet(f).diameter;
        for (int i = 0; i < space.n_facet_dofs_local(); ++i)
          trip.emplace_back(space.facet_dof(f, i), space.facet_dof(f, i),
                            i == 0 ? len : len / 3.0);
      }
      break;
    }
    case SpaceType::EG: {
      // broken P1 mass pulled back through the embedding
      const EgEmbedding e = eg_embedding(space);
      DofSpace broken(mesh, SpaceKind::cell_dg(1));
      const Eigen::SparseMatrix<double> mb = mass_matrix(broken);
      return Eigen::SparseMatrix<double>(e.free.transpose() * mb * e.free);
    }
  }
  Eigen::SparseMatrix<double> m(space.n_dofs(), space.n_dofs());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

FieldVector interpolate(const DofSpace& space, const ScalarFn& v, int quad_degree) {
  const Mesh& mesh = space.mesh();
  FieldVector out = zero_field(space);
  switch (space.kind().type) {
    case SpaceType::CellDG: {
      return project_cell(mesh, space.kind().cell_degree, v, quad_degree);
    }
    case SpaceType::Hybrid: {
      const FieldVector cells = project_cell(mesh, space.kind().cell_degree, v, quad_degree);
      const FieldVector facets = project_facet(mesh, space.kind().facet_degree, v, quad_degree);
      const int ncd = mesh.n_cells() * space.n_cell_dofs_local();
      out.coeffs.head(ncd) = cells.coeffs;
      DofSpace fspace(mesh, SpaceKind::facet_dg(space.kind().facet_degree));
      for (int f = 0; f < mesh.n_facets(); ++f)
        for (int i = 0; i < space.n_facet_dofs_local(); ++i) {
          if (space.facet_dof(f, i) >= 0)
            out.coeffs[space.facet_dof(f, i)] = facets.coeffs[fspace.facet_dof(f, i)];
          // boundary data slots stay zero; callers impose data separately
        }
      return out;
    }
    case SpaceType::EG: {
      // global L2 projection: solve the EG mass system
      const EgEmbedding e = eg_embedding(space);
      DofSpace broken(mesh, SpaceKind::cell_dg(1));
      const TriangleRule& rule = triangle_rule(quad_degree);
      Eigen::VectorXd rhs_broken = Eigen::VectorXd::Zero(broken.n_dofs());
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const double area = mesh.cell_area(c);
        for (size_t q = 0; q < rule.points.size(); ++q) {
          const auto& b = rule.points[q];
          const double w = rule.weights[q] * area * v(mesh.point(c, b));
          for (int i = 0; i < 3; ++i) rhs_broken[broken.cell_dof(c, i)] += w * b[i];
        }
      }
      const Eigen::VectorXd rhs = e.free.transpose() * rhs_broken;
      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(mass_matrix(space));
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("interpolate: EG mass matrix not SPD");
      out.coeffs = llt.solve(rhs);
      return out;
    }
    case SpaceType::FacetDG:
      return project_facet(mesh, space.kind().facet_degree, v, quad_degree);
  }
  return out;
}

}  // namespace proxdg
