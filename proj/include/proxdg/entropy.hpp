#pragma once

#include <string>

namespace proxdg {

/// Obstacle-anchored Legendre entropy pair. All functions are pointwise in
/// the obstacle value phi and total on finite latent arguments; overflow-safe
/// forms are used throughout.
enum class EntropyKind { Shannon, Softplus };

EntropyKind entropy_from_string(const std::string& name);
std::string to_string(EntropyKind kind);

/// Numerically stable ln(1 + e^x).
template <typename Scalar>
Scalar softplus(Scalar x);

/// Numerically stable logistic function e^x / (1 + e^x).
template <typename Scalar>
Scalar sigmoid(Scalar x);

/// grad R*(phi, psi): maps a latent value to an observable value > phi.
double grad_conj(EntropyKind kind, double phi, double psi);

/// The margin grad_conj(phi, psi) - phi, strictly positive for finite psi.
/// Kept separate so bound preservation survives floating-point absorption.
double conj_margin(EntropyKind kind, double psi);

/// Curvature d^2 R*/d psi^2, strictly positive.
double hess_conj(EntropyKind kind, double phi, double psi);

/// grad R(phi, u), the inverse of grad_conj; requires u > phi.
double grad(EntropyKind kind, double phi, double u);

/// Entropy value R(phi, u) for u >= phi, with the 0 ln 0 := 0 convention.
double entropy_value(EntropyKind kind, double phi, double u);

/// Conjugate value R*(phi, psi) (diagnostic; softplus uses the dilogarithm).
double conj_value(EntropyKind kind, double phi, double psi);

/// Bregman divergence D(a,b) = R(a) - R(b) - grad R(b) (a - b) for
/// a >= phi, b > phi; nonnegative and zero iff a = b.
double bregman(EntropyKind kind, double phi, double a, double b);

/// Real dilogarithm Li2(x) for x <= 1, via series and reflection identities;
/// absolute accuracy ~1e-14 on the range used here.
double dilog(double x);

}  // namespace proxdg
