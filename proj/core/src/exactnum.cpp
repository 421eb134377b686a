#include "harmonic/exactnum.hpp"

#include <cmath>
#include <stdexcept>

namespace harmonic {

Rat gamma_ratio(long long a, long long b) {
    if (a < 1 || b < 1)
        throw std::domain_error("gamma_ratio: arguments must be integers >= 1");
    if (a == b) return Rat(1);
    Int prod(1);
    if (a > b) {
        for (long long j = b; j < a; ++j) prod *= j;
        return Rat(prod);
    }
    for (long long j = a; j < b; ++j) prod *= j;
    return Rat(Int(1), prod);
}

Rat binomial_rat(long long n, long long k) {
    if (n < 0) throw std::domain_error("binomial_rat: n must be >= 0");
    if (k < 0 || k > n) return Rat(0);
    if (k > n - k) k = n - k;
    Int num(1), den(1);
    for (long long j = 1; j <= k; ++j) {
        num *= (n - k + j);
        den *= j;
    }
    return Rat(num, den);
}

Rat phi_rate(SpinLabel s, long long m, long long k) {
    if (k < 1 || k > m)
        throw std::domain_error("phi_rate: need 1 <= k <= m");
    // Gamma(m+1)/Gamma(m-k+1) * Gamma(m-k+2s)/Gamma(m+2s) / k
    Rat r = gamma_ratio(m + 1, m - k + 1) * gamma_ratio(m - k + s.two_s, m + s.two_s);
    return r / k;
}

Rat h_weight(SpinLabel s, long long m) {
    if (m < 0) throw std::domain_error("h_weight: m must be >= 0");
    Rat acc(0);
    for (long long k = 1; k <= m; ++k) acc += Rat(Int(1), Int(s.two_s + k - 1));
    return acc;
}

Rat kappa(SpinLabel s, long long m) {
    if (m < 0) throw std::domain_error("kappa: m must be >= 0");
    return gamma_ratio(s.two_s + m, s.two_s) * gamma_ratio(1, 1 + m);
}

Rat insertion_weight(const Rat& beta, long long k) {
    if (k < 1) throw std::domain_error("insertion_weight: k must be >= 1");
    if (!(beta > 0 && beta < 1))
        throw std::domain_error("insertion_weight: beta must satisfy 0 < beta < 1");
    return pow_rat(beta, k) / k;
}

double total_insertion_rate(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("total_insertion_rate: beta must satisfy 0 < beta < 1");
    return -std::log1p(-beta);
}

}  // namespace harmonic
