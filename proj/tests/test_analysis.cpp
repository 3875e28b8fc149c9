#include <doctest.h>

#include <cmath>

#include "proxdg/analysis.hpp"
#include "proxdg/bench.hpp"
#include "proxdg/problems.hpp"
#include "support.hpp"

using namespace proxdg;

namespace {
const auto kZero = [](const Vec2&) { return 0.0; };
const auto kZeroGrad = [](const Vec2&) { return Vec2::Zero().eval(); };
}  // namespace

TEST_CASE("interpolants of affine functions have vanishing errors") {
  const Mesh mesh = generate_structured(3, {-1, -1, 1, 1});
  auto aff = [](const Vec2& p) { return 1.0 - 0.5 * p.x() + 2.0 * p.y(); };
  auto aff_grad = [](const Vec2&) { return Vec2(-0.5, 2.0); };
  const FieldVector proj = project_cell(mesh, 1, aff);
  CellPolyField field;
  field.degree = 1;
  field.monomial = false;
  field.coeffs.resize(mesh.n_cells(), 3);
  const DofSpace space(mesh, SpaceKind::cell_dg(1));
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int i = 0; i < 3; ++i) field.coeffs(c, i) = proj.coeffs[space.cell_dof(c, i)];
  const FieldErrors err = error_norms(mesh, field, aff, aff_grad);
  CHECK(err.l2 <= 1e-12);
  CHECK(err.h1 <= 1e-12);
  CHECK(err.dg <= 1e-12);
}

TEST_CASE("quadratic exact solution against the zero field") {
  const Mesh mesh = generate_structured(4, {-1, -1, 1, 1});
  CellPolyField zero;
  zero.degree = 0;
  zero.coeffs = Eigen::MatrixXd::Zero(mesh.n_cells(), 1);
  auto u = [](const Vec2& p) { return p.x() * p.x(); };
  auto du = [](const Vec2& p) { return Vec2(2.0 * p.x(), 0.0); };
  const FieldErrors err = error_norms(mesh, zero, u, du);
  // int_{(-1,1)^2} x^4 = 4/5
  CHECK(err.l2 == doctest::Approx(std::sqrt(0.8)).epsilon(1e-12));
}

TEST_CASE("DG norm of a cell indicator by hand") {
  const Mesh mesh = generate_structured(1, {0, 0, 1, 1});
  // the indicator of the lower-right cell: interior diagonal of length
  // sqrt(2) contributes 1, the two boundary legs contribute 1 each
  int lower = -1;
  for (int c = 0; c < mesh.n_cells(); ++c)
    if ((mesh.centroid(c) - Vec2(2.0 / 3.0, 1.0 / 3.0)).norm() < 1e-12) lower = c;
  REQUIRE(lower >= 0);
  CellPolyField field;
  field.degree = 0;
  field.coeffs = Eigen::MatrixXd::Zero(2, 1);
  field.coeffs(lower, 0) = 1.0;
  const FieldErrors err = error_norms(mesh, field, kZero, kZeroGrad);
  CHECK(err.dg == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(err.h1 <= 1e-14);
  CHECK(err.l2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("empirical orders of convergence") {
  CHECK(eoc({0.4, 0.1}, {0.5, 0.25})[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(eoc({0.2, 0.1}, {0.5, 0.25})[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(eoc({1.0, std::pow(2.0, -1.5)}, {1.0, 0.5})[0] == doctest::Approx(1.5).epsilon(1e-13));
  CHECK_THROWS_AS(eoc({1.0, 0.0}, {1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(eoc({1.0, 0.5}, {0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(eoc({1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("constant hybrid fields reconstruct to constants") {
  const Mesh mesh = generate_structured(2, {-1, -1, 1, 1});
  const auto one = [](const Vec2&) { return 1.0; };
  const AssembledSystem sys = assemble_system(mesh, MethodKind::hho(0, 1), kZero, one, kZero);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.space.n_dofs());
  for (int c = 0; c < mesh.n_cells(); ++c) u[sys.space.cell_dof(c, 0)] = 1.0;
  for (int f = 0; f < mesh.n_facets(); ++f)
    if (sys.space.facet_dof(f, 0) >= 0) u[sys.space.facet_dof(f, 0)] = 1.0;
  const CellPolyField rec = reconstruct_solution(sys, u);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CHECK(rec.coeffs(c, 0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rec.coeffs.row(c).tail(rec.coeffs.cols() - 1).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("reconstruction beats the cell field on the benchmark") {
  const ProblemSpec pb = benchmark_problem();
  RunConfig config{MethodKind::hho(1, 1), {}, 6};
  const LevelResult level = solve_level(pb, 16, config);
  REQUIRE(level.report.converged);
  CHECK(level.h1_recon < level.h1_u);
  CHECK(level.l2_recon < level.l2_u);
}

TEST_CASE("feasibility margins") {
  const Mesh mesh = generate_structured(2, {-1, -1, 1, 1});
  auto phi = [](const Vec2& p) { return 0.3 * p.x() - 0.1; };
  const AssembledSystem sys = assemble_system(mesh, MethodKind::ipdg(), kZero, kZero, phi);
  const FieldVector proj = project_cell(mesh, 1, phi);
  SUBCASE("one above the obstacle") {
    const Eigen::VectorXd margins =
        feasibility_margins(sys, proj.coeffs + Eigen::VectorXd::Ones(proj.coeffs.size()));
    for (int c = 0; c < mesh.n_cells(); ++c)
      CHECK(margins[c] == doctest::Approx(mesh.cell_area(c)).epsilon(1e-12));
  }
  SUBCASE("one below the obstacle") {
    const Eigen::VectorXd margins =
        feasibility_margins(sys, proj.coeffs - Eigen::VectorXd::Ones(proj.coeffs.size()));
    for (int c = 0; c < mesh.n_cells(); ++c)
      CHECK(margins[c] == doctest::Approx(-mesh.cell_area(c)).epsilon(1e-12));
  }
}

TEST_CASE("clement weights satisfy the convex-combination constraints") {
  for (int n : {2, 4, 6}) {
    const Mesh mesh = generate_structured(n, {-1, -1, 1, 1});
    const SmootherWeights weights = compute_weights(mesh);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (mesh.vertex_on_boundary(v)) {
        CHECK(weights.per_vertex[v].empty());
        continue;
      }
      double sum = 0.0;
      Vec2 combo = Vec2::Zero();
      for (const auto& e : weights.per_vertex[v]) {
        CHECK(e.weight >= 0.0);
        sum += e.weight;
        combo += e.weight * mesh.centroid(e.cell);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      CHECK((combo - mesh.vertex(v)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("interior hexagonal patches admit the uniform weights") {
  const Mesh mesh = generate_structured(4, {-1, -1, 1, 1});
  const SmootherWeights weights = compute_weights(mesh);
  int checked = 0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.vertex_on_boundary(v) || mesh.vertex_cells(v).size() != 6) continue;
    for (const auto& e : weights.per_vertex[v]) CHECK(e.weight == doctest::Approx(1.0 / 6.0));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("clement smoothing of constants and stability") {
  const Mesh mesh = generate_structured(4, {-1, -1, 1, 1});
  const SmootherWeights weights = compute_weights(mesh);
  SUBCASE("constants are reproduced at interior vertices") {
    const Eigen::VectorXd nodal =
        clement_smooth(mesh, weights, Eigen::VectorXd::Constant(mesh.n_cells(), 2.5));
    for (int v = 0; v < mesh.n_vertices(); ++v)
      CHECK(nodal[v] == doctest::Approx(mesh.vertex_on_boundary(v) ? 0.0 : 2.5));
  }
  SUBCASE("measured L2 stability constant stays below two") {
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd means(mesh.n_cells());
      for (int c = 0; c < mesh.n_cells(); ++c) means[c] = testing::uniform(-1.0, 1.0);
      const Eigen::VectorXd nodal = clement_smooth(mesh, weights, means);
      CHECK(p1_nodal_l2_norm(mesh, nodal) <= 2.0 * cellwise_l2_norm(mesh, means));
    }
  }
}

TEST_CASE("cell components resolve the boundary lifting") {
  const Mesh mesh = generate_structured(2, {-1, -1, 1, 1});
  auto aff = [](const Vec2& p) { return 0.25 * p.x() + p.y(); };
  const AssembledSystem sys = assemble_system(mesh, MethodKind::eg(), kZero, aff, kZero);
  const Eigen::VectorXd u = solve_spd(sys.A, sys.b);
  const CellPolyField field = cell_component(sys, u);
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = mesh.vertex(mesh.cell(c)[i]);
      std::array<double, 3> bary{0, 0, 0};
      bary[i] = 1.0;
      CHECK(field.value(mesh, c, p, bary) == doctest::Approx(aff(p)).epsilon(1e-9));
    }
}
