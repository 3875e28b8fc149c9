#include "proxdg/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "proxdg/quadrature.hpp"

namespace proxdg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double CellPolyField::value(const Mesh& mesh, int cell, const Vec2& p,
                            const std::array<double, 3>& bary) const {
  if (monomial) {
    double v = 0.0;
    for (int k = 0; k < coeffs.cols(); ++k) v += coeffs(cell, k) * monomial_value(mesh, cell, k, p);
    return v;
  }
  if (degree == 0) return coeffs(cell, 0);
  return coeffs(cell, 0) * bary[0] + coeffs(cell, 1) * bary[1] + coeffs(cell, 2) * bary[2];
}

Vec2 CellPolyField::gradient(const Mesh& mesh, int cell, const Vec2& p,
                             const std::array<double, 3>& bary) const {
  (void)bary;
  if (monomial) {
    Vec2 g = Vec2::Zero();
    for (int k = 0; k < coeffs.cols(); ++k)
      g += coeffs(cell, k) * monomial_gradient(mesh, cell, k, p);
    return g;
  }
  if (degree == 0) return Vec2::Zero();
  const auto grads = p1_gradients(mesh, cell);
  return coeffs(cell, 0) * grads[0] + coeffs(cell, 1) * grads[1] + coeffs(cell, 2) * grads[2];
}

CellPolyField cell_component(const AssembledSystem& system, const VectorXd& u) {
  const Mesh& mesh = *system.mesh;
  const DofSpace& space = system.space;
  CellPolyField out;
  out.monomial = false;
  switch (space.kind().type) {
    case SpaceType::CellDG:
    case SpaceType::Hybrid: {
      out.degree = space.kind().type == SpaceType::CellDG ? space.kind().cell_degree
                                                          : space.kind().cell_degree;
      const int nl = space.n_cell_dofs_local();
      out.coeffs.resize(mesh.n_cells(), nl);
      for (int c = 0; c < mesh.n_cells(); ++c)
        for (int i = 0; i < nl; ++i) out.coeffs(c, i) = u[space.cell_dof(c, i)];
      break;
    }
    case SpaceType::EG: {
      out.degree = 1;
      out.coeffs.resize(mesh.n_cells(), 3);
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto& cl = mesh.cell(c);
        for (int i = 0; i < 3; ++i) {
          const int hat = space.vertex_dof(cl[i]);
          const double hv =
              hat >= 0 ? u[hat] : system.data[space.vertex_data_slot(cl[i])];
          out.coeffs(c, i) = u[space.eg_cell_dof(c)] + hv;
        }
      }
      break;
    }
    case SpaceType::FacetDG:
      throw std::invalid_argument("cell_component: facet space has no cell part");
  }
  return out;
}

CellPolyField reconstruct_solution(const AssembledSystem& system, const VectorXd& u) {
  if (system.reconstruction.empty())
    throw std::invalid_argument("reconstruct_solution: system has no reconstruction operators");
  const Mesh& mesh = *system.mesh;
  const DofSpace& space = system.space;
  const int ncl = space.n_cell_dofs_local();
  const int nfl = space.n_facet_dofs_local();
  const int nr = static_cast<int>(system.reconstruction.front().rows());
  CellPolyField out;
  out.monomial = true;
  out.degree = space.kind().facet_degree + 1;
  out.coeffs.resize(mesh.n_cells(), nr);
  VectorXd local(ncl + 3 * nfl);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int i = 0; i < ncl; ++i) local[i] = u[space.cell_dof(c, i)];
    for (int lf = 0; lf < 3; ++lf) {
      const int fct = mesh.cell_facet(c, lf);
      for (int j = 0; j < nfl; ++j) {
        const int dof = space.facet_dof(fct, j);
        local[ncl + nfl * lf + j] =
            dof >= 0 ? u[dof] : system.data[space.facet_data_slot(fct, j)];
      }
    }
    out.coeffs.row(c) = (system.reconstruction[c] * local).transpose();
  }
  return out;
}

namespace {

// Trace of a cell field at facet parameter xi, seen from `cell`.
double field_trace(const Mesh& mesh, const CellPolyField& field, int cell, int facet, double xi) {
  const Vec2 p = mesh.facet_point(facet, xi);
  const auto& cl = mesh.cell(cell);
  const auto& fv = mesh.facet(facet).vertices;
  std::array<double, 3> bary{0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    if (cl[i] == fv[0]) bary[i] = 0.5 * (1.0 - xi);
    if (cl[i] == fv[1]) bary[i] = 0.5 * (1.0 + xi);
  }
  return field.value(mesh, cell, p, bary);
}

}  // namespace

FieldErrors error_norms(const Mesh& mesh, const CellPolyField& field, const ScalarFn& exact,
                        const GradFn& exact_grad, int quad_degree) {
  FieldErrors err;
  const TriangleRule& rule = triangle_rule(quad_degree);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double area = mesh.cell_area(c);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec2 p = mesh.point(c, bary);
      const double w = rule.weights[q] * area;
      const double dv = field.value(mesh, c, p, bary) - exact(p);
      const Vec2 dg = field.gradient(mesh, c, p, bary) - exact_grad(p);
      err.l2 += w * dv * dv;
      err.h1 += w * dg.squaredNorm();
    }
  }
  double jumps = 0.0;
  const SegmentRule& frule = segment_rule(std::max(5, quad_degree));
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    double acc = 0.0;
    for (size_t q = 0; q < frule.points.size(); ++q) {
      const double xi = frule.points[q];
      const double w = 0.5 * fc.diameter * frule.weights[q];
      double j;
      if (fc.is_boundary())
        j = field_trace(mesh, field, fc.minus_cell, f, xi) - exact(mesh.facet_point(f, xi));
      else
        j = field_trace(mesh, field, fc.minus_cell, f, xi) -
            field_trace(mesh, field, fc.plus_cell, f, xi);
      acc += w * j * j;
    }
    jumps += acc / fc.diameter;
  }
  err.dg = std::sqrt(err.h1 + jumps);
  err.l2 = std::sqrt(err.l2);
  err.h1 = std::sqrt(err.h1);
  return err;
}

double lambda_l2_error(const Mesh& mesh, const VectorXd& lambda, const ScalarFn& exact,
                       int quad_degree) {
  const TriangleRule& rule = triangle_rule(quad_degree);
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double area = mesh.cell_area(c);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double d = lambda[c] - exact(mesh.point(c, rule.points[q]));
      acc += rule.weights[q] * area * d * d;
    }
  }
  return std::sqrt(acc);
}

double o_l2_error(const Mesh& mesh, const VectorXd& o_margin, const ScalarFn& obstacle,
                  const ScalarFn& exact, int quad_degree) {
  const TriangleRule& rule = triangle_rule(quad_degree);
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double area = mesh.cell_area(c);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 p = mesh.point(c, rule.points[q]);
      const double d = obstacle(p) + o_margin[c] - exact(p);
      acc += rule.weights[q] * area * d * d;
    }
  }
  return std::sqrt(acc);
}

double cellwise_l2_norm(const Mesh& mesh, const VectorXd& values) {
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) acc += mesh.cell_area(c) * values[c] * values[c];
  return std::sqrt(acc);
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw std::invalid_argument("eoc: need matching lists of length >= 2");
  std::vector<double> orders;
  for (size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(errors[i + 1] > 0.0))
      throw std::invalid_argument("eoc: errors must be positive");
    if (!(hs[i] > hs[i + 1])) throw std::invalid_argument("eoc: mesh sizes must decrease");
    orders.push_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
  }
  return orders;
}

Eigen::VectorXd feasibility_margins(const AssembledSystem& system, const VectorXd& u) {
  return system.cell_mean_integrals(u) - system.obstacle_integral;
}

namespace {

// Projection of the uniform weights onto the constraint plane with an
// active-set loop on the nonnegativity bounds.
bool solve_vertex_weights(const Vec2& z, const std::vector<Vec2>& centroids,
                          std::vector<double>& alpha) {
  const int m = static_cast<int>(centroids.size());
  MatrixXd cons(3, m);
  for (int i = 0; i < m; ++i) {
    cons(0, i) = 1.0;
    cons(1, i) = centroids[i].x();
    cons(2, i) = centroids[i].y();
  }
  Eigen::Vector3d d(1.0, z.x(), z.y());

  std::vector<bool> fixed(m, false);
  for (int pass = 0; pass <= 2 * m; ++pass) {
    std::vector<int> free;
    for (int i = 0; i < m; ++i)
      if (!fixed[i]) free.push_back(i);
    if (free.size() < 1) return false;
    MatrixXd cf(3, free.size());
    for (size_t a = 0; a < free.size(); ++a) cf.col(a) = cons.col(free[a]);
    const VectorXd u0 = VectorXd::Constant(free.size(), 1.0 / m);
    const Eigen::Vector3d rhs = d - cf * u0;
    const Eigen::Vector3d nu = (cf * cf.transpose()).fullPivLu().solve(rhs);
    const VectorXd af = u0 + cf.transpose() * nu;

    int worst = -1;
    double worst_val = -1e-13;
    for (int a = 0; a < af.size(); ++a)
      if (af[a] < worst_val) {
        worst_val = af[a];
        worst = free[a];
      }
    if (worst >= 0) {
      fixed[worst] = true;
      continue;
    }
    alpha.assign(m, 0.0);
    for (size_t a = 0; a < free.size(); ++a) alpha[free[a]] = std::max(af[a], 0.0);
    // verify the constraints actually hold
    Eigen::Vector3d res = Eigen::Vector3d::Zero();
    for (int i = 0; i < m; ++i) res += alpha[i] * cons.col(i);
    res -= d;
    return res.norm() <= 1e-12 * (1.0 + z.norm());
  }
  return false;
}

// Caratheodory fallback: some triple of centroids contains the vertex.
bool enumerate_vertex_weights(const Vec2& z, const std::vector<Vec2>& centroids,
                              std::vector<double>& alpha) {
  const int m = static_cast<int>(centroids.size());
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c) {
        Eigen::Matrix3d mat;
        mat << 1.0, 1.0, 1.0, centroids[a].x(), centroids[b].x(), centroids[c].x(),
            centroids[a].y(), centroids[b].y(), centroids[c].y();
        const Eigen::FullPivLU<Eigen::Matrix3d> lu(mat);
        if (!lu.isInvertible()) continue;
        const Eigen::Vector3d w = lu.solve(Eigen::Vector3d(1.0, z.x(), z.y()));
        if (w.minCoeff() < -1e-13) continue;
        alpha.assign(m, 0.0);
        alpha[a] = std::max(w[0], 0.0);
        alpha[b] = std::max(w[1], 0.0);
        alpha[c] = std::max(w[2], 0.0);
        return true;
      }
  return false;
}

}  // namespace

SmootherWeights compute_weights(const Mesh& mesh) {
  SmootherWeights weights;
  weights.per_vertex.resize(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.vertex_on_boundary(v)) continue;
    const auto& cells = mesh.vertex_cells(v);
    std::vector<Vec2> centroids;
    centroids.reserve(cells.size());
    for (int c : cells) centroids.push_back(mesh.centroid(c));
    std::vector<double> alpha;
    if (!solve_vertex_weights(mesh.vertex(v), centroids, alpha) &&
        !enumerate_vertex_weights(mesh.vertex(v), centroids, alpha))
      throw std::runtime_error("compute_weights: vertex " + std::to_string(v) +
                               " is not in the convex hull of incident centroids");
    auto& entries = weights.per_vertex[v];
    for (size_t i = 0; i < cells.size(); ++i)
      if (alpha[i] > 0.0) entries.push_back({cells[i], alpha[i]});
  }
  return weights;
}

VectorXd clement_smooth(const Mesh& mesh, const SmootherWeights& weights,
                        const VectorXd& cell_means) {
  VectorXd nodal = VectorXd::Zero(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.vertex_on_boundary(v)) continue;
    double acc = 0.0;
    for (const auto& e : weights.per_vertex[v]) acc += e.weight * cell_means[e.cell];
    nodal[v] = acc;
  }
  return nodal;
}

double p1_nodal_l2_norm(const Mesh& mesh, const VectorXd& nodal_values) {
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cl = mesh.cell(c);
    const double a = nodal_values[cl[0]], b = nodal_values[cl[1]], d = nodal_values[cl[2]];
    // exact P1 mass: |T|/12 * [2 1 1; 1 2 1; 1 1 2]
    acc += mesh.cell_area(c) / 12.0 *
           (2.0 * (a * a + b * b + d * d) + 2.0 * (a * b + a * d + b * d));
  }
  return std::sqrt(acc);
}

Eigen::SparseMatrix<double> dg_norm_gram(const Mesh& mesh) {
  DofSpace space(mesh, SpaceKind::cell_dg(1));
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto grads = p1_gradients(mesh, c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(space.cell_dof(c, i), space.cell_dof(c, j),
                          mesh.cell_area(c) * grads[i].dot(grads[j]));
  }
  const SegmentRule& frule = segment_rule(5);
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    const int nside = fc.is_boundary() ? 1 : 2;
    int dofs[6];
    for (int i = 0; i < 3; ++i) {
      dofs[i] = space.cell_dof(fc.minus_cell, i);
      if (nside == 2) dofs[3 + i] = space.cell_dof(fc.plus_cell, i);
    }
    MatrixXd K = MatrixXd::Zero(3 * nside, 3 * nside);
    for (size_t q = 0; q < frule.points.size(); ++q) {
      const double xi = frule.points[q];
      const double w = 0.5 * fc.diameter * frule.weights[q] / fc.diameter;
      const auto& cl_m = mesh.cell(fc.minus_cell);
      const auto& fv = fc.vertices;
      double jv[6] = {0, 0, 0, 0, 0, 0};
      for (int i = 0; i < 3; ++i) {
        if (cl_m[i] == fv[0]) jv[i] = 0.5 * (1.0 - xi);
        if (cl_m[i] == fv[1]) jv[i] = 0.5 * (1.0 + xi);
      }
      if (nside == 2) {
        const auto& cl_p = mesh.cell(fc.plus_cell);
        for (int i = 0; i < 3; ++i) {
          if (cl_p[i] == fv[0]) jv[3 + i] = -0.5 * (1.0 - xi);
          if (cl_p[i] == fv[1]) jv[3 + i] = -0.5 * (1.0 + xi);
        }
      }
      for (int i = 0; i < 3 * nside; ++i)
        for (int j = 0; j < 3 * nside; ++j) K(i, j) += w * jv[i] * jv[j];
    }
    for (int i = 0; i < 3 * nside; ++i)
      for (int j = 0; j < 3 * nside; ++j) trip.emplace_back(dofs[i], dofs[j], K(i, j));
  }
  Eigen::SparseMatrix<double> g(space.n_dofs(), space.n_dofs());
  g.setFromTriplets(trip.begin(), trip.end());
  return g;
}

}  // namespace proxdg
