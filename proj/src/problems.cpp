#include "proxdg/problems.hpp"

#include <cmath>
#include <istream>
#include <stdexcept>

#include <json.hpp>

namespace proxdg {

namespace {

constexpr double kPi = 3.14159265358979323846;

double contact_residual(double a) { return a * a * (1.0 - std::log(a)) - 0.25; }

}  // namespace

BenchmarkConstants benchmark_constants() {
  // bisection on (0.2, 0.5), then Newton to machine precision
  double lo = 0.2, hi = 0.5;
  if (contact_residual(lo) * contact_residual(hi) >= 0.0)
    throw std::logic_error("benchmark_constants: bisection bracket invalid");
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (contact_residual(lo) * contact_residual(mid) <= 0.0 ? hi : lo) = mid;
  }
  double a = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double da = a * (1.0 - 2.0 * std::log(a));  // d/da of a^2 (1 - ln a)
    a -= contact_residual(a) / da;
  }

  BenchmarkConstants k;
  k.contact_radius = a;
  k.strength = std::sqrt(0.25 - a * a) / std::log(a);
  const double r0 = k.break_radius;
  const double phi_r0 = std::sqrt(0.25 - r0 * r0);
  k.extension_slope = -r0 / phi_r0;
  k.extension_intercept = phi_r0 - k.extension_slope * r0;
  return k;
}

ProblemSpec benchmark_problem() {
  const BenchmarkConstants k = benchmark_constants();
  const double a = k.contact_radius, q = k.strength;
  const double r0 = k.break_radius;
  const double slope = k.extension_slope, icpt = k.extension_intercept;

  ProblemSpec pb;
  pb.name = "benchmark";
  pb.domain = {-1.0, -1.0, 1.0, 1.0};
  pb.obstacle = [r0, slope, icpt](const Vec2& p) {
    const double r = p.norm();
    return r <= r0 ? std::sqrt(0.25 - r * r) : icpt + slope * r;
  };
  pb.rhs = [](const Vec2&) { return 0.0; };
  pb.exact = [a, q](const Vec2& p) {
    const double r = p.norm();
    return r > a ? q * std::log(r) : std::sqrt(0.25 - r * r);
  };
  pb.exact_grad = [a, q](const Vec2& p) {
    const double r2 = p.squaredNorm();
    if (r2 > a * a) return Vec2(q * p / r2);
    return Vec2(-p / std::sqrt(0.25 - r2));
  };
  pb.exact_lambda = [a](const Vec2& p) {
    const double r2 = p.squaredNorm();
    if (r2 >= a * a) return 0.0;
    return (0.5 - r2) / std::pow(0.25 - r2, 1.5);
  };
  pb.dirichlet = [q](const Vec2& p) { return q * std::log(p.norm()); };
  return pb;
}

ProblemSpec flat_problem() {
  ProblemSpec pb;
  pb.name = "flat";
  pb.domain = {-1.0, -1.0, 1.0, 1.0};
  pb.obstacle = [](const Vec2&) { return -1e6; };
  pb.exact = [](const Vec2& p) { return std::sin(kPi * p.x()) * std::sin(kPi * p.y()); };
  pb.exact_grad = [](const Vec2& p) {
    return Vec2(kPi * std::cos(kPi * p.x()) * std::sin(kPi * p.y()),
                kPi * std::sin(kPi * p.x()) * std::cos(kPi * p.y()));
  };
  pb.exact_lambda = [](const Vec2&) { return 0.0; };
  pb.rhs = [](const Vec2& p) {
    return 2.0 * kPi * kPi * std::sin(kPi * p.x()) * std::sin(kPi * p.y());
  };
  pb.dirichlet = [](const Vec2&) { return 0.0; };
  return pb;
}

ProblemSpec constant_problem(double phi, double f, double g, const Rect& domain) {
  if (g < phi)
    throw std::invalid_argument("constant_problem: boundary data below the obstacle");
  ProblemSpec pb;
  pb.name = "constant";
  pb.domain = domain;
  pb.obstacle = [phi](const Vec2&) { return phi; };
  pb.rhs = [f](const Vec2&) { return f; };
  pb.dirichlet = [g](const Vec2&) { return g; };
  return pb;
}

ProblemSpec problem_from_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  const double phi = j.value("obstacle", 0.0);
  const double f = j.value("rhs", 0.0);
  const double g = j.value("dirichlet", 0.0);
  Rect domain{-1.0, -1.0, 1.0, 1.0};
  if (j.contains("domain")) {
    const auto& d = j["domain"];
    if (!d.is_array() || d.size() != 4)
      throw std::invalid_argument("problem json: domain must be [x0,y0,x1,y1]");
    domain = {d[0].get<double>(), d[1].get<double>(), d[2].get<double>(), d[3].get<double>()};
  }
  ProblemSpec pb = constant_problem(phi, f, g, domain);
  pb.name = "file";
  return pb;
}

void self_check(const ProblemSpec& pb) {
  if (!pb.has_exact()) return;
  const int ns = 17;
  const double eps = 1e-6;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("problem self-check failed (" + pb.name + "): " + what);
  };

  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < ns; ++j) {
      const Vec2 p(pb.domain.x0 + (i + 0.5) / ns * pb.domain.width(),
                   pb.domain.y0 + (j + 0.5) / ns * pb.domain.height());
      const double u = pb.exact(p);
      const double phi = pb.obstacle(p);
      if (u < phi - 1e-12) fail("exact solution dips below the obstacle");
      if (pb.exact_lambda) {
        const double lam = pb.exact_lambda(p);
        if (lam < 0.0) fail("multiplier negative");
        if (std::abs(lam * (u - phi)) > 1e-9) fail("complementarity violated");
        // away from contact the solution satisfies the PDE: check the
        // divergence of the exact gradient by central differences, keeping
        // the whole stencil clear of the free boundary
        const bool clear = pb.exact_lambda(p + Vec2(2 * eps, 0)) == 0.0 &&
                           pb.exact_lambda(p - Vec2(2 * eps, 0)) == 0.0 &&
                           pb.exact_lambda(p + Vec2(0, 2 * eps)) == 0.0 &&
                           pb.exact_lambda(p - Vec2(0, 2 * eps)) == 0.0;
        if (lam == 0.0 && clear && pb.exact_grad) {
          const double div =
              (pb.exact_grad(p + Vec2(eps, 0)).x() - pb.exact_grad(p - Vec2(eps, 0)).x()) /
                  (2 * eps) +
              (pb.exact_grad(p + Vec2(0, eps)).y() - pb.exact_grad(p - Vec2(0, eps)).y()) /
                  (2 * eps);
          if (std::abs(div + pb.rhs(p)) > 1e-9) fail("exact pair violates the PDE");
        }
      }
    }
  }
  // boundary trace and compatibility
  for (int i = 0; i <= ns; ++i) {
    const double t = static_cast<double>(i) / ns;
    const Vec2 pts[4] = {{pb.domain.x0 + t * pb.domain.width(), pb.domain.y0},
                         {pb.domain.x0 + t * pb.domain.width(), pb.domain.y1},
                         {pb.domain.x0, pb.domain.y0 + t * pb.domain.height()},
                         {pb.domain.x1, pb.domain.y0 + t * pb.domain.height()}};
    for (const Vec2& p : pts) {
      if (std::abs(pb.exact(p) - pb.dirichlet(p)) > 1e-10) fail("boundary trace mismatch");
      if (pb.dirichlet(p) < pb.obstacle(p) - 1e-12) fail("boundary data below the obstacle");
    }
  }
}

}  // namespace proxdg
