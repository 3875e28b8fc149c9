#pragma once

#include <iosfwd>
#include <string>

#include "proxdg/analysis.hpp"
#include "proxdg/mesh.hpp"
#include "proxdg/spaces.hpp"

namespace proxdg {

/// An obstacle problem instance on a rectangle. The exact triple (solution,
/// gradient, multiplier) is optional and only used for error reporting.
struct ProblemSpec {
  std::string name;
  Rect domain{-1.0, -1.0, 1.0, 1.0};
  ScalarFn obstacle;
  ScalarFn rhs;
  ScalarFn dirichlet;
  ScalarFn exact;         // may be empty
  GradFn exact_grad;      // may be empty
  ScalarFn exact_lambda;  // may be empty

  bool has_exact() const { return static_cast<bool>(exact); }
};

/// Constants of the spherical-obstacle benchmark: the contact radius solves
/// a^2 (1 - ln a) = 1/4, the strength is Q = sqrt(1/4 - a^2) / ln a, and the
/// obstacle switches to its C1 linear extension at r = 9/20.
struct BenchmarkConstants {
  double contact_radius = 0.0;
  double strength = 0.0;
  double break_radius = 0.45;
  double extension_slope = 0.0;
  double extension_intercept = 0.0;
};

/// Computed at startup by bisection + Newton polish (never hard-coded).
BenchmarkConstants benchmark_constants();

/// Spherical obstacle on (-1,1)^2 with f = 0, exact solution Q ln r outside
/// the contact disk, and the exact trace imposed as Dirichlet data.
ProblemSpec benchmark_problem();

/// Far-away obstacle (phi = -1e6) with a smooth manufactured solution;
/// reproduces unconstrained convergence and a vanishing multiplier.
ProblemSpec flat_problem();

/// Constant-data problem, no exact solution.
ProblemSpec constant_problem(double phi, double f, double g, const Rect& domain);

/// JSON problem file: {"obstacle": c, "rhs": c, "dirichlet": c,
/// "domain": [x0,y0,x1,y1]} with constant data.
ProblemSpec problem_from_json(std::istream& in);

/// Sampled verification of a problem's exact pair: harmonicity away from
/// contact (via the divergence of the exact gradient), boundary trace match,
/// complementarity and sign of the multiplier, and g >= phi compatibility.
/// Throws std::runtime_error on the first violated check.
void self_check(const ProblemSpec& problem);

}  // namespace proxdg
