#include <doctest.h>

#include <cmath>

#include "proxdg/entropy.hpp"
#include "support.hpp"

using namespace proxdg;

namespace {
constexpr double kPi2_6 = 1.6449340668482264;
const EntropyKind kKinds[] = {EntropyKind::Shannon, EntropyKind::Softplus};
}  // namespace

TEST_CASE("conjugate gradient values") {
  CHECK(grad_conj(EntropyKind::Shannon, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(grad_conj(EntropyKind::Softplus, 0.0, 0.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(grad_conj(EntropyKind::Shannon, -2.0, std::log(3.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("conjugate curvature values and finite-difference oracle") {
  CHECK(hess_conj(EntropyKind::Shannon, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK(hess_conj(EntropyKind::Softplus, 0.0, 0.0) == doctest::Approx(0.5));
  const double h = 1e-5, psi = 0.7;
  for (EntropyKind kind : kKinds) {
    const double fd =
        (grad_conj(kind, 0.3, psi + h) - grad_conj(kind, 0.3, psi - h)) / (2.0 * h);
    CHECK(hess_conj(kind, 0.3, psi) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("gradient is the inverse of the conjugate gradient") {
  CHECK(grad(EntropyKind::Shannon, 0.0, 1.0) == doctest::Approx(0.0));
  CHECK(grad(EntropyKind::Softplus, 0.0, std::log(2.0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(grad(EntropyKind::Shannon, 0.0, -0.5), std::domain_error);
  CHECK_THROWS_AS(grad(EntropyKind::Softplus, 1.0, 1.0), std::domain_error);

  for (EntropyKind kind : kKinds) {
    const double phi = -0.7;
    for (double margin : {1e-6, 1e-3, 0.1, 1.0, 37.0, 1e3}) {
      const double u = phi + margin;
      CHECK(grad_conj(kind, phi, grad(kind, phi, u)) == doctest::Approx(u).epsilon(1e-10));
    }
    // at zero obstacle the observable equals the margin exactly, so the
    // identity is representable over the whole latent range
    for (double psi = -30.0; psi <= 30.0; psi += 2.5)
      CHECK(grad(kind, 0.0, grad_conj(kind, 0.0, psi)) == doctest::Approx(psi).epsilon(1e-10));
    // with a nonzero obstacle the margin is partially absorbed into u below
    // psi ~ -12 (double precision), so test the representable range
    for (double psi = -12.0; psi <= 30.0; psi += 2.5)
      CHECK(grad(kind, phi, grad_conj(kind, phi, psi)) == doctest::Approx(psi).epsilon(1e-10));
  }
}

TEST_CASE("bregman divergence") {
  SUBCASE("zero at equal arguments, positive otherwise") {
    for (EntropyKind kind : kKinds) {
      CHECK(bregman(kind, 0.0, 1.0, 1.0) == doctest::Approx(0.0));
      for (int i = 0; i < 50; ++i) {
        const double phi = testing::uniform(-2.0, 2.0);
        const double a = phi + testing::uniform(0.01, 5.0);
        const double b = phi + testing::uniform(0.01, 5.0);
        const double d = bregman(kind, phi, a, b);
        CHECK(d >= 0.0);
        if (std::abs(a - b) > 0.1) CHECK(d > 0.0);
      }
    }
  }
  SUBCASE("shannon closed form") {
    CHECK(bregman(EntropyKind::Shannon, 0.0, 2.0, 1.0) ==
          doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-14));
  }
  SUBCASE("obstacle contact is admissible in the first argument") {
    CHECK(bregman(EntropyKind::Shannon, 0.5, 0.5, 1.0) == doctest::Approx(0.5));
    CHECK(bregman(EntropyKind::Softplus, 0.5, 0.5, 1.0) > 0.0);
    CHECK_THROWS_AS(bregman(EntropyKind::Shannon, 0.5, 1.0, 0.5), std::domain_error);
  }
  SUBCASE("three-point identity") {
    for (EntropyKind kind : kKinds) {
      for (int i = 0; i < 100; ++i) {
        const double phi = testing::uniform(-1.0, 1.0);
        const double a = phi + testing::uniform(0.05, 4.0);
        const double b = phi + testing::uniform(0.05, 4.0);
        const double c = phi + testing::uniform(0.05, 4.0);
        const double lhs = bregman(kind, phi, a, b) - bregman(kind, phi, a, c) +
                           bregman(kind, phi, b, c);
        const double rhs = (grad(kind, phi, b) - grad(kind, phi, c)) * (b - a);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("conjugate gradient is strictly monotone") {
  for (EntropyKind kind : kKinds) {
    for (int i = 0; i < 100; ++i) {
      const double p1 = testing::uniform(-20.0, 20.0);
      const double p2 = testing::uniform(-20.0, 20.0);
      if (std::abs(p1 - p2) < 1e-6) continue;
      CHECK((grad_conj(kind, 0.0, p1) - grad_conj(kind, 0.0, p2)) * (p1 - p2) > 0.0);
    }
  }
}

TEST_CASE("overflow safety on the latent range") {
  for (EntropyKind kind : kKinds) {
    for (double psi : {-700.0, -500.0, 500.0, 700.0}) {
      CHECK(std::isfinite(grad_conj(kind, 0.0, psi)));
      CHECK(std::isfinite(hess_conj(kind, 0.0, psi)));
      CHECK(conj_margin(kind, psi) > 0.0);
      CHECK(hess_conj(kind, 0.0, psi) > 0.0);
    }
  }
}

TEST_CASE("dilogarithm reference values and identities") {
  CHECK(dilog(0.0) == doctest::Approx(0.0));
  CHECK(dilog(1.0) == doctest::Approx(kPi2_6).epsilon(1e-14));
  CHECK(dilog(-1.0) == doctest::Approx(-kPi2_6 / 2.0).epsilon(1e-13));
  const double ln2 = std::log(2.0);
  CHECK(dilog(0.5) == doctest::Approx(kPi2_6 / 2.0 - 0.5 * ln2 * ln2).epsilon(1e-14));
  // inversion identity evaluated independently of the branch used internally
  for (double z : {-1.5, -3.0, -20.0}) {
    const double lhs = dilog(z) + dilog(1.0 / z);
    const double rhs = -kPi2_6 - 0.5 * std::log(-z) * std::log(-z);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }
  CHECK_THROWS_AS(dilog(1.5), std::domain_error);
}

TEST_CASE("conjugate values are consistent with their gradients") {
  const double h = 1e-5;
  for (EntropyKind kind : kKinds) {
    for (double psi : {-3.0, -0.5, 0.0, 1.2, 8.0}) {
      const double phi = 0.4;
      const double fd = (conj_value(kind, phi, psi + h) - conj_value(kind, phi, psi - h)) / (2 * h);
      CHECK(fd == doctest::Approx(grad_conj(kind, phi, psi)).epsilon(1e-8));
    }
    for (double margin : {0.3, 1.0, 2.5}) {
      const double phi = -0.2, u = phi + margin;
      const double fd =
          (entropy_value(kind, phi, u + h) - entropy_value(kind, phi, u - h)) / (2 * h);
      CHECK(fd == doctest::Approx(grad(kind, phi, u)).epsilon(1e-8));
    }
  }
}

TEST_CASE("entropy names round-trip") {
  CHECK(entropy_from_string("shannon") == EntropyKind::Shannon);
  CHECK(entropy_from_string(to_string(EntropyKind::Softplus)) == EntropyKind::Softplus);
  CHECK_THROWS_AS(entropy_from_string("gibbs"), std::invalid_argument);
}
