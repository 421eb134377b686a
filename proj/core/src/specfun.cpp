#include "harmonic/detail/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace harmonic::detail {

double digamma(double x) {
    if (std::isnan(x)) return x;
    // reflection: psi(x) = psi(1-x) - pi cot(pi x)
    if (x < 0.5) {
        const double pi = 3.14159265358979323846;
        double s = std::sin(pi * x);
        if (s == 0.0) return std::numeric_limits<double>::quiet_NaN();
        return digamma(1.0 - x) - pi * std::cos(pi * x) / s;
    }
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic series; at x >= 10 the dropped term is below 1e-15
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = -1.0 / 12.0 + inv2 * (1.0 / 120.0 + inv2 * (-1.0 / 252.0 + inv2 * (1.0 / 240.0 + inv2 * (-1.0 / 132.0 + inv2 * (691.0 / 32760.0 + inv2 * (-1.0 / 12.0))))));
    return acc + std::log(x) - 0.5 * inv + inv2 * series;
}

namespace {

double gamma_p_series(double a, double x) {
    // P(a,x) by the ascending series
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    // Q(a,x) by the Lentz continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

}  // namespace harmonic::detail
