#include "proxdg/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace proxdg {

EntropyKind entropy_from_string(const std::string& name) {
  if (name == "shannon") return EntropyKind::Shannon;
  if (name == "softplus") return EntropyKind::Softplus;
  throw std::invalid_argument("unknown entropy: " + name);
}

std::string to_string(EntropyKind kind) {
  return kind == EntropyKind::Shannon ? "shannon" : "softplus";
}

template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return x > Scalar(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

template double softplus<double>(double);
template float softplus<float>(float);
template double sigmoid<double>(double);
template float sigmoid<float>(float);

double conj_margin(EntropyKind kind, double psi) {
  return kind == EntropyKind::Shannon ? std::exp(psi) : softplus(psi);
}

double grad_conj(EntropyKind kind, double phi, double psi) {
  return phi + conj_margin(kind, psi);
}

double hess_conj(EntropyKind kind, double /*phi*/, double psi) {
  return kind == EntropyKind::Shannon ? std::exp(psi) : sigmoid(psi);
}

namespace {

// ln(e^s - 1), stable across the whole positive range.
double log_expm1(double s) {
  if (s > 30.0) return s + std::log1p(-std::exp(-s));
  return std::log(std::expm1(s));
}

}  // namespace

double grad(EntropyKind kind, double phi, double u) {
  const double s = u - phi;
  if (!(s > 0.0)) throw std::domain_error("entropy grad: argument must exceed the obstacle");
  return kind == EntropyKind::Shannon ? std::log(s) : log_expm1(s);
}

double entropy_value(EntropyKind kind, double phi, double u) {
  const double s = u - phi;
  if (s < 0.0) throw std::domain_error("entropy value: argument below the obstacle");
  if (s == 0.0) return 0.0;  // 0 ln 0 := 0 (and Li2(0) = 0)
  if (kind == EntropyKind::Shannon) return s * std::log(s) - s;
  return s * log_expm1(s) + dilog(1.0 - std::exp(s));
}

double conj_value(EntropyKind kind, double phi, double psi) {
  if (kind == EntropyKind::Shannon) return std::exp(psi) + phi * psi;
  // R* = phi psi - Li2(-e^psi); inverted analytically for psi > 0 so the
  // exponential never overflows.
  constexpr double pi2_6 = 1.6449340668482264;
  if (psi > 0.0) return phi * psi + pi2_6 + 0.5 * psi * psi + dilog(-std::exp(-psi));
  return phi * psi - dilog(-std::exp(psi));
}

double bregman(EntropyKind kind, double phi, double a, double b) {
  const double s = a - phi, t = b - phi;
  if (s < 0.0) throw std::domain_error("bregman: first argument below the obstacle");
  if (!(t > 0.0)) throw std::domain_error("bregman: second argument not above the obstacle");
  if (kind == EntropyKind::Shannon) {
    if (s == 0.0) return t;
    return s * std::log(s / t) - s + t;
  }
  return entropy_value(kind, phi, a) - entropy_value(kind, phi, b) - log_expm1(t) * (s - t);
}

double dilog(double x) {
  constexpr double pi2_6 = 1.6449340668482264;
  if (x > 1.0) throw std::domain_error("dilog: argument must be <= 1");
  if (x == 1.0) return pi2_6;
  if (x < -1.0) {
    const double l = std::log(-x);
    return -pi2_6 - 0.5 * l * l - dilog(1.0 / x);
  }
  if (x < 0.0) {
    const double u = x / (x - 1.0);  // in (0, 1/2]
    const double l = std::log1p(-x);
    return -0.5 * l * l - dilog(u);
  }
  if (x > 0.5) return pi2_6 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
  // direct series on [0, 1/2]
  double term = x, sum = x;
  for (int k = 2; k < 80; ++k) {
    term *= x;
    const double add = term / (k * k);
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace proxdg
