#pragma once

namespace harmonic::detail {

// psi(x) = d/dx log Gamma(x) for real x away from the poles 0, -1, -2, ...
// Reflection below 1/2, recurrence up to 10, then the asymptotic series.
double digamma(double x);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
// a > 0, x >= 0. Series for x < a + 1, continued fraction otherwise.
double gamma_q(double a, double x);

}  // namespace harmonic::detail
