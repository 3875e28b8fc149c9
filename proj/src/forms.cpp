#include "proxdg/forms.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "proxdg/quadrature.hpp"

namespace proxdg {

Method method_from_string(const std::string& name) {
  if (name == "ipdg") return Method::IPDG;
  if (name == "eg") return Method::EG;
  if (name == "hip") return Method::HIP;
  if (name == "hho") return Method::HHO;
  throw std::invalid_argument("unknown method: " + name);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::IPDG: return "ipdg";
    case Method::EG: return "eg";
    case Method::HIP: return "hip";
    case Method::HHO: return "hho";
  }
  return "";
}

MethodKind MethodKind::ipdg(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("ipdg: sigma must be positive");
  return {Method::IPDG, sigma, 1, 0};
}

MethodKind MethodKind::eg(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("eg: sigma must be positive");
  return {Method::EG, sigma, 1, 0};
}

MethodKind MethodKind::hip(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("hip: sigma must be positive");
  return {Method::HIP, sigma, 1, 1};
}

MethodKind MethodKind::hho(int cell_degree, int facet_degree) {
  const bool ok = (cell_degree == 0 && facet_degree == 0) ||
                  (cell_degree == 0 && facet_degree == 1) ||
                  (cell_degree == 1 && facet_degree == 1);
  if (!ok) throw std::invalid_argument("hho: admissible degree pairs are (0,0), (0,1), (1,1)");
  return {Method::HHO, 0.0, cell_degree, facet_degree};
}

std::string MethodKind::label() const {
  if (method == Method::HHO)
    return "hho(" + std::to_string(cell_degree) + "," + std::to_string(facet_degree) + ")";
  return to_string(method);
}

SpaceKind space_of(const MethodKind& method) {
  switch (method.method) {
    case Method::IPDG: return SpaceKind::cell_dg(1);
    case Method::EG: return SpaceKind::eg();
    case Method::HIP: return SpaceKind::hybrid(1, 1);
    case Method::HHO: return SpaceKind::hybrid(method.cell_degree, method.facet_degree);
  }
  return SpaceKind::cell_dg(1);
}

double monomial_value(const Mesh& mesh, int cell, int k, const Vec2& p) {
  const Vec2 s = (p - mesh.centroid(cell)) / mesh.cell_diameter(cell);
  switch (k) {
    case 0: return 1.0;
    case 1: return s.x();
    case 2: return s.y();
    case 3: return s.x() * s.x();
    case 4: return s.x() * s.y();
    case 5: return s.y() * s.y();
  }
  throw std::invalid_argument("monomial_value: index out of range");
}

Vec2 monomial_gradient(const Mesh& mesh, int cell, int k, const Vec2& p) {
  const double inv_h = 1.0 / mesh.cell_diameter(cell);
  const Vec2 s = (p - mesh.centroid(cell)) * inv_h;
  switch (k) {
    case 0: return Vec2::Zero();
    case 1: return Vec2(inv_h, 0.0);
    case 2: return Vec2(0.0, inv_h);
    case 3: return Vec2(2.0 * s.x() * inv_h, 0.0);
    case 4: return Vec2(s.y() * inv_h, s.x() * inv_h);
    case 5: return Vec2(0.0, 2.0 * s.y() * inv_h);
  }
  throw std::invalid_argument("monomial_gradient: index out of range");
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

// Barycentric coordinates inside `cell` of the point at facet parameter xi.
std::array<double, 3> facet_bary(const Mesh& mesh, int cell, int facet, double xi) {
  const auto& cl = mesh.cell(cell);
  const auto& fv = mesh.facet(facet).vertices;
  std::array<double, 3> b{0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    if (cl[i] == fv[0]) b[i] = 0.5 * (1.0 - xi);
    if (cl[i] == fv[1]) b[i] = 0.5 * (1.0 + xi);
  }
  return b;
}

// Cell basis (P0 constant or P1 nodal) values at a barycentric point.
void cell_basis_values(int degree, const std::array<double, 3>& bary, double* vals) {
  if (degree == 0) {
    vals[0] = 1.0;
  } else {
    vals[0] = bary[0];
    vals[1] = bary[1];
    vals[2] = bary[2];
  }
}

VectorXd obstacle_integrals(const Mesh& mesh, const ScalarFn& phi, int quad_degree) {
  const TriangleRule& rule = triangle_rule(quad_degree);
  VectorXd out(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double s = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q)
      s += rule.weights[q] * phi(mesh.point(c, rule.points[q]));
    out[c] = s * mesh.cell_area(c);
  }
  return out;
}

// Interior-penalty form on broken P1 cell dofs, Nitsche data terms on the
// right-hand side.
AssembledSystem assemble_broken_ipdg(const Mesh& mesh, const MethodKind& method, const ScalarFn& f,
                                     const ScalarFn& g, const ScalarFn& phi, int quad_degree) {
  const double sigma = method.sigma;
  AssembledSystem sys{MethodKind::ipdg(sigma), &mesh, DofSpace(mesh, SpaceKind::cell_dg(1))};
  const int n = sys.space.n_dofs();
  sys.b = VectorXd::Zero(n);
  sys.data = VectorXd::Zero(0);
  sys.m_data = VectorXd::Zero(mesh.n_cells());
  sys.dirichlet_shift = VectorXd::Zero(n);
  sys.obstacle_integral = obstacle_integrals(mesh, phi, quad_degree);
  sys.cell_area = VectorXd::Zero(mesh.n_cells());

  std::vector<Triplet> ta, tm;
  const TriangleRule& cell_rule = triangle_rule(quad_degree);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double area = mesh.cell_area(c);
    sys.cell_area[c] = area;
    const auto grads = p1_gradients(mesh, c);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j)
        ta.emplace_back(sys.space.cell_dof(c, i), sys.space.cell_dof(c, j),
                        area * grads[i].dot(grads[j]));
      tm.emplace_back(c, sys.space.cell_dof(c, i), area / 3.0);
      // load (f, v)
      double li = 0.0;
      for (size_t q = 0; q < cell_rule.points.size(); ++q)
        li += cell_rule.weights[q] * f(mesh.point(c, cell_rule.points[q])) * cell_rule.points[q][i];
      sys.b[sys.space.cell_dof(c, i)] += li * area;
    }
  }

  const SegmentRule& frule = segment_rule(std::max(3, quad_degree));
  for (int fct = 0; fct < mesh.n_facets(); ++fct) {
    const Facet& fc = mesh.facet(fct);
    const double len = fc.diameter;
    const double pen = sigma / fc.diameter;
    if (!fc.is_boundary()) {
      const int cm = fc.minus_cell, cp = fc.plus_cell;
      const auto gm = p1_gradients(mesh, cm), gp = p1_gradients(mesh, cp);
      int dofs[6];
      double gn[6];
      for (int i = 0; i < 3; ++i) {
        dofs[i] = sys.space.cell_dof(cm, i);
        dofs[3 + i] = sys.space.cell_dof(cp, i);
        gn[i] = 0.5 * gm[i].dot(fc.normal);
        gn[3 + i] = 0.5 * gp[i].dot(fc.normal);
      }
      MatrixXd K = MatrixXd::Zero(6, 6);
      for (size_t q = 0; q < frule.points.size(); ++q) {
        const double xi = frule.points[q];
        const double w = 0.5 * len * frule.weights[q];
        const auto bm = facet_bary(mesh, cm, fct, xi);
        const auto bp = facet_bary(mesh, cp, fct, xi);
        double jv[6];
        for (int i = 0; i < 3; ++i) {
          jv[i] = bm[i];
          jv[3 + i] = -bp[i];
        }
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j)
            K(i, j) += w * (-(gn[i] * jv[j] + jv[i] * gn[j]) + pen * jv[i] * jv[j]);
      }
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) ta.emplace_back(dofs[i], dofs[j], K(i, j));
    } else {
      const int cm = fc.minus_cell;
      const auto gm = p1_gradients(mesh, cm);
      int dofs[3];
      double gn[3];
      for (int i = 0; i < 3; ++i) {
        dofs[i] = sys.space.cell_dof(cm, i);
        gn[i] = gm[i].dot(fc.normal);
      }
      MatrixXd K = MatrixXd::Zero(3, 3);
      VectorXd rhs = VectorXd::Zero(3);
      for (size_t q = 0; q < frule.points.size(); ++q) {
        const double xi = frule.points[q];
        const double w = 0.5 * len * frule.weights[q];
        const auto bm = facet_bary(mesh, cm, fct, xi);
        const double gval = g(mesh.facet_point(fct, xi));
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j)
            K(i, j) += w * (-(gn[i] * bm[j] + bm[i] * gn[j]) + pen * bm[i] * bm[j]);
          rhs[i] += w * gval * (-gn[i] + pen * bm[i]);
        }
      }
      for (int i = 0; i < 3; ++i) {
        sys.b[dofs[i]] += rhs[i];
        for (int j = 0; j < 3; ++j) ta.emplace_back(dofs[i], dofs[j], K(i, j));
      }
    }
  }

  sys.A.resize(n, n);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.M.resize(mesh.n_cells(), n);
  sys.M.setFromTriplets(tm.begin(), tm.end());
  return sys;
}

AssembledSystem assemble_eg(const Mesh& mesh, const MethodKind& method, const ScalarFn& f,
                            const ScalarFn& g, const ScalarFn& phi, int quad_degree) {
  AssembledSystem broken = assemble_broken_ipdg(mesh, method, f, g, phi, quad_degree);
  AssembledSystem sys{method, &mesh, DofSpace(mesh, SpaceKind::eg())};
  const EgEmbedding emb = eg_embedding(sys.space);

  sys.data = VectorXd::Zero(sys.space.n_data());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (sys.space.vertex_data_slot(v) >= 0) sys.data[sys.space.vertex_data_slot(v)] = g(mesh.vertex(v));

  const VectorXd lifted = emb.data * sys.data;  // broken representation of the data part
  const VectorXd a_lift = broken.A * lifted;
  sys.A = Eigen::SparseMatrix<double>(emb.free.transpose() * broken.A * emb.free);
  sys.dirichlet_shift = emb.free.transpose() * a_lift;
  sys.a_data_data = lifted.dot(a_lift);
  sys.b = emb.free.transpose() * broken.b - sys.dirichlet_shift;
  sys.M = Eigen::SparseMatrix<double>(broken.M * emb.free);
  sys.m_data = broken.M * lifted;
  sys.obstacle_integral = std::move(broken.obstacle_integral);
  sys.cell_area = std::move(broken.cell_area);
  return sys;
}

// Local H-IP form: cell gradient block plus per-facet consistency and
// h_T-scaled penalty on the trace mismatch v_T - v_F.
MatrixXd hip_local(const Mesh& mesh, int c, double sigma) {
  const int nloc = 3 + 3 * 2;
  MatrixXd K = MatrixXd::Zero(nloc, nloc);
  const double area = mesh.cell_area(c);
  const double ht = mesh.cell_diameter(c);
  const auto grads = p1_gradients(mesh, c);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) K(i, j) += area * grads[i].dot(grads[j]);

  const SegmentRule& frule = segment_rule(3);
  for (int lf = 0; lf < 3; ++lf) {
    const int fct = mesh.cell_facet(c, lf);
    const double len = mesh.facet(fct).diameter;
    const Vec2& nt = mesh.cell_normal(c, lf);
    double gn[9] = {0};
    for (int i = 0; i < 3; ++i) gn[i] = grads[i].dot(nt);
    for (size_t q = 0; q < frule.points.size(); ++q) {
      const double xi = frule.points[q];
      const double w = 0.5 * len * frule.weights[q];
      const auto bm = facet_bary(mesh, c, fct, xi);
      double d[9] = {0};
      for (int i = 0; i < 3; ++i) d[i] = bm[i];
      for (int j = 0; j < 2; ++j) d[3 + 2 * lf + j] = -facet_basis(j, xi);
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          K(i, j) += w * (-(gn[i] * d[j] + d[i] * gn[j]) + sigma / ht * d[i] * d[j]);
    }
  }
  return K;
}

AssembledSystem assemble_hybrid(const Mesh& mesh, const MethodKind& method, const ScalarFn& f,
                                const ScalarFn& g, const ScalarFn& phi, int quad_degree) {
  const int l = method.method == Method::HIP ? 1 : method.cell_degree;
  const int r = method.method == Method::HIP ? 1 : method.facet_degree;
  AssembledSystem sys{method, &mesh, DofSpace(mesh, SpaceKind::hybrid(l, r))};
  const DofSpace& space = sys.space;
  const int n = space.n_dofs();
  const int ncl = space.n_cell_dofs_local();
  const int nfl = space.n_facet_dofs_local();
  const int nloc = ncl + 3 * nfl;

  // boundary facet dofs carry the projected Dirichlet data
  const FieldVector gproj = project_facet(mesh, r, g, quad_degree);
  sys.data = gproj.data;
  if (sys.data.size() != space.n_data()) throw std::logic_error("assemble: data layout mismatch");

  sys.b = VectorXd::Zero(n);
  sys.dirichlet_shift = VectorXd::Zero(n);
  sys.m_data = VectorXd::Zero(mesh.n_cells());
  sys.obstacle_integral = obstacle_integrals(mesh, phi, quad_degree);
  sys.cell_area = VectorXd::Zero(mesh.n_cells());
  sys.blocks.resize(mesh.n_cells());
  if (method.method == Method::HHO) sys.reconstruction.resize(mesh.n_cells());

  std::vector<Triplet> ta, tm;
  const TriangleRule& cell_rule = triangle_rule(quad_degree);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double area = mesh.cell_area(c);
    sys.cell_area[c] = area;

    MatrixXd K;
    if (method.method == Method::HIP) {
      K = hip_local(mesh, c, method.sigma);
    } else {
      HhoLocalOperators ops = hho_local_operators(mesh, c, l, r);
      K = std::move(ops.bilinear);
      sys.reconstruction[c] = std::move(ops.reconstruction);
    }

    // local-to-global: negative entries mark data slots (-slot - 1)
    std::vector<int> map(nloc);
    for (int i = 0; i < ncl; ++i) map[i] = space.cell_dof(c, i);
    for (int lf = 0; lf < 3; ++lf) {
      const int fct = mesh.cell_facet(c, lf);
      for (int j = 0; j < nfl; ++j) {
        const int dof = space.facet_dof(fct, j);
        map[ncl + nfl * lf + j] = dof >= 0 ? dof : -space.facet_data_slot(fct, j) - 1;
      }
    }

    // cell load (f, p(v)) and coupling (p(v), 1)_T
    auto& blk = sys.blocks[c];
    blk.m_cell = VectorXd::Zero(ncl);
    for (int i = 0; i < ncl; ++i) {
      double li = 0.0;
      for (size_t q = 0; q < cell_rule.points.size(); ++q) {
        double vals[3];
        cell_basis_values(l, cell_rule.points[q], vals);
        li += cell_rule.weights[q] * f(mesh.point(c, cell_rule.points[q])) * vals[i];
      }
      sys.b[map[i]] += li * area;
      blk.m_cell[i] = l == 0 ? area : area / 3.0;
      tm.emplace_back(c, map[i], blk.m_cell[i]);
    }

    // scatter with data folding
    for (int i = 0; i < nloc; ++i) {
      if (map[i] < 0) {
        const double di = sys.data[-map[i] - 1];
        for (int j = 0; j < nloc; ++j)
          if (map[j] < 0) sys.a_data_data += di * K(i, j) * sys.data[-map[j] - 1];
        continue;
      }
      for (int j = 0; j < nloc; ++j) {
        if (map[j] >= 0) {
          ta.emplace_back(map[i], map[j], K(i, j));
        } else {
          const double shift = K(i, j) * sys.data[-map[j] - 1];
          sys.dirichlet_shift[map[i]] += shift;
          sys.b[map[i]] -= shift;
        }
      }
    }

    // free blocks in condensation order
    blk.cell_dofs.assign(map.begin(), map.begin() + ncl);
    blk.facet_dofs.clear();
    std::vector<int> free_facet_local;
    for (int i = ncl; i < nloc; ++i)
      if (map[i] >= 0) {
        blk.facet_dofs.push_back(map[i]);
        free_facet_local.push_back(i);
      }
    const int nff = static_cast<int>(free_facet_local.size());
    blk.a_cc = K.topLeftCorner(ncl, ncl);
    blk.a_cf.resize(ncl, nff);
    blk.a_ff.resize(nff, nff);
    for (int a = 0; a < nff; ++a) {
      for (int i = 0; i < ncl; ++i) blk.a_cf(i, a) = K(i, free_facet_local[a]);
      for (int bidx = 0; bidx < nff; ++bidx)
        blk.a_ff(a, bidx) = K(free_facet_local[a], free_facet_local[bidx]);
    }
  }

  sys.A.resize(n, n);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.M.resize(mesh.n_cells(), n);
  sys.M.setFromTriplets(tm.begin(), tm.end());
  return sys;
}

}  // namespace

HhoLocalOperators hho_local_operators(const Mesh& mesh, int cell, int cell_degree,
                                      int facet_degree) {
  MethodKind::hho(cell_degree, facet_degree);  // validates the pair
  const int l = cell_degree, r = facet_degree;
  const int nr = cell_basis_size(r + 1);
  const int ncl = cell_basis_size(l);
  const int nfl = r + 1;
  const int nloc = ncl + 3 * nfl;
  const double area = mesh.cell_area(cell);
  const double ht = mesh.cell_diameter(cell);

  const TriangleRule& crule = triangle_rule(6);
  MatrixXd gs = MatrixXd::Zero(nr, nr);       // gradient Gram of monomials
  VectorXd mono_mean = VectorXd::Zero(nr);    // int_T m_k
  MatrixXd n_lc = MatrixXd::Zero(ncl, nr);    // (phi_i, m_k)_T
  MatrixXd mass_l = MatrixXd::Zero(ncl, ncl); // cell mass of P^l basis
  VectorXd cell_ones = VectorXd::Zero(ncl);   // (phi_i, 1)_T
  for (size_t q = 0; q < crule.points.size(); ++q) {
    const auto& bary = crule.points[q];
    const double w = crule.weights[q] * area;
    const Vec2 p = mesh.point(cell, bary);
    double lv[3];
    cell_basis_values(l, bary, lv);
    std::array<Vec2, 6> mg;
    std::array<double, 6> mv;
    for (int k = 0; k < nr; ++k) {
      mv[k] = monomial_value(mesh, cell, k, p);
      mg[k] = monomial_gradient(mesh, cell, k, p);
    }
    for (int k = 0; k < nr; ++k) {
      mono_mean[k] += w * mv[k];
      for (int k2 = 0; k2 < nr; ++k2) gs(k, k2) += w * mg[k].dot(mg[k2]);
      for (int i = 0; i < ncl; ++i) n_lc(i, k) += w * lv[i] * mv[k];
    }
    for (int i = 0; i < ncl; ++i) {
      cell_ones[i] += w * lv[i];
      for (int j = 0; j < ncl; ++j) mass_l(i, j) += w * lv[i] * lv[j];
    }
  }

  // right-hand side of the reconstruction problem, tested with each monomial
  MatrixXd brhs = MatrixXd::Zero(nr, nloc);
  const auto grads = p1_gradients(mesh, cell);
  for (size_t q = 0; q < crule.points.size(); ++q) {
    const auto& bary = crule.points[q];
    const double w = crule.weights[q] * area;
    const Vec2 p = mesh.point(cell, bary);
    for (int k = 1; k < nr; ++k) {
      const Vec2 gk = monomial_gradient(mesh, cell, k, p);
      if (l == 1)
        for (int i = 0; i < 3; ++i) brhs(k, i) += w * grads[i].dot(gk);
    }
  }
  const SegmentRule& frule = segment_rule(7);
  for (int lf = 0; lf < 3; ++lf) {
    const int fct = mesh.cell_facet(cell, lf);
    const double len = mesh.facet(fct).diameter;
    const Vec2& nt = mesh.cell_normal(cell, lf);
    for (size_t q = 0; q < frule.points.size(); ++q) {
      const double xi = frule.points[q];
      const double w = 0.5 * len * frule.weights[q];
      const Vec2 p = mesh.facet_point(fct, xi);
      const auto bary = facet_bary(mesh, cell, fct, xi);
      double lv[3];
      cell_basis_values(l, bary, lv);
      for (int k = 1; k < nr; ++k) {
        const double gkn = monomial_gradient(mesh, cell, k, p).dot(nt);
        for (int i = 0; i < ncl; ++i) brhs(k, i) -= w * lv[i] * gkn;
        for (int j = 0; j < nfl; ++j) brhs(k, ncl + nfl * lf + j) += w * facet_basis(j, xi) * gkn;
      }
    }
  }

  HhoLocalOperators ops;
  ops.reconstruction = MatrixXd::Zero(nr, nloc);
  {
    const Eigen::LDLT<MatrixXd> ldlt(gs.bottomRightCorner(nr - 1, nr - 1));
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("hho: singular local gradient Gram matrix");
    ops.reconstruction.bottomRows(nr - 1) = ldlt.solve(brhs.bottomRows(nr - 1));
  }
  // fix the constant so cell means of input and reconstruction agree
  Eigen::RowVectorXd mean_row = Eigen::RowVectorXd::Zero(nloc);
  mean_row.head(ncl) = cell_ones.transpose();
  ops.reconstruction.row(0) =
      (mean_row - mono_mean.tail(nr - 1).transpose() * ops.reconstruction.bottomRows(nr - 1)) /
      mono_mean[0];

  // projection of the reconstruction onto the P^l cell space
  const MatrixXd proj_l = mass_l.ldlt().solve(n_lc);

  ops.stabilization = MatrixXd::Zero(3 * nfl, nloc);
  MatrixXd penalty = MatrixXd::Zero(nloc, nloc);
  for (int lf = 0; lf < 3; ++lf) {
    const int fct = mesh.cell_facet(cell, lf);
    const double len = mesh.facet(fct).diameter;
    MatrixXd tr_mono = MatrixXd::Zero(nfl, nr);   // int_F L_i m_k
    MatrixXd tr_cell = MatrixXd::Zero(nfl, ncl);  // int_F L_i phi_j
    for (size_t q = 0; q < frule.points.size(); ++q) {
      const double xi = frule.points[q];
      const double w = 0.5 * len * frule.weights[q];
      const Vec2 p = mesh.facet_point(fct, xi);
      const auto bary = facet_bary(mesh, cell, fct, xi);
      double lv[3];
      cell_basis_values(l, bary, lv);
      for (int i = 0; i < nfl; ++i) {
        const double li = facet_basis(i, xi);
        for (int k = 0; k < nr; ++k) tr_mono(i, k) += w * li * monomial_value(mesh, cell, k, p);
        for (int j = 0; j < ncl; ++j) tr_cell(i, j) += w * li * lv[j];
      }
    }
    // facet Legendre mass is diagonal: diag(len, len/3)
    VectorXd fm(nfl);
    fm[0] = len;
    if (nfl > 1) fm[1] = len / 3.0;
    const MatrixXd pr_mono = fm.asDiagonal().inverse() * tr_mono;
    const MatrixXd pr_cell = fm.asDiagonal().inverse() * tr_cell;

    MatrixXd s_f = (pr_mono - pr_cell * proj_l) * ops.reconstruction;
    for (int j = 0; j < ncl; ++j) s_f.col(j) += pr_cell.col(j);
    for (int j = 0; j < nfl; ++j) s_f(j, ncl + nfl * lf + j) -= 1.0;

    ops.stabilization.middleRows(nfl * lf, nfl) = s_f;
    penalty += s_f.transpose() * fm.asDiagonal() * s_f / ht;
  }

  ops.bilinear = ops.reconstruction.transpose() * gs * ops.reconstruction + penalty;
  return ops;
}

AssembledSystem assemble_system(const Mesh& mesh, const MethodKind& method, const ScalarFn& f,
                                const ScalarFn& g, const ScalarFn& phi, int quad_degree) {
  switch (method.method) {
    case Method::IPDG: {
      AssembledSystem sys = assemble_broken_ipdg(mesh, method, f, g, phi, quad_degree);
      sys.method = method;
      return sys;
    }
    case Method::EG: return assemble_eg(mesh, method, f, g, phi, quad_degree);
    case Method::HIP:
    case Method::HHO: return assemble_hybrid(mesh, method, f, g, phi, quad_degree);
  }
  throw std::logic_error("assemble_system: unhandled method");
}

AssembledSystem assemble_ipdg(const Mesh& mesh, const SpaceKind& space, double sigma,
                              const ScalarFn& f, const ScalarFn& g, const ScalarFn& phi,
                              int quad_degree) {
  if (space.type == SpaceType::EG)
    return assemble_system(mesh, MethodKind::eg(sigma), f, g, phi, quad_degree);
  if (space.type == SpaceType::CellDG && space.cell_degree == 1)
    return assemble_system(mesh, MethodKind::ipdg(sigma), f, g, phi, quad_degree);
  throw std::invalid_argument("assemble_ipdg: space must be CellDG(1) or EG");
}

AssembledSystem assemble_hip(const Mesh& mesh, double sigma, const ScalarFn& f, const ScalarFn& g,
                             const ScalarFn& phi, int quad_degree) {
  return assemble_system(mesh, MethodKind::hip(sigma), f, g, phi, quad_degree);
}

AssembledSystem assemble_hho(const Mesh& mesh, int cell_degree, int facet_degree, const ScalarFn& f,
                             const ScalarFn& g, const ScalarFn& phi, int quad_degree) {
  return assemble_system(mesh, MethodKind::hho(cell_degree, facet_degree), f, g, phi, quad_degree);
}

double AssembledSystem::full_quadratic(const Eigen::VectorXd& u) const {
  return u.dot(A * u) + 2.0 * u.dot(dirichlet_shift) + a_data_data;
}

double AssembledSystem::energy(const Eigen::VectorXd& u) const {
  return 0.5 * u.dot(A * u) - b.dot(u);
}

Eigen::VectorXd AssembledSystem::cell_mean_integrals(const Eigen::VectorXd& u) const {
  return M * u + m_data;
}

void verify_coercive(const AssembledSystem& system) {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(system.A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("stiffness matrix not positive definite for method " +
                             system.method.label() +
                             " (sigma=" + std::to_string(system.method.sigma) +
                             "); increase the penalty parameter");
}

}  // namespace proxdg
