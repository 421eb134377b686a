#pragma once

#include "harmonic/rational.hpp"

#include <stdexcept>

namespace harmonic {

// Spin label of the single-site representation, stored as the integer 2s.
// Only integer 2s >= 1 is supported anywhere in this library.
struct SpinLabel {
    int two_s;
    explicit SpinLabel(int t) : two_s(t) {
        if (t < 1) throw std::domain_error("SpinLabel: 2s must be a positive integer");
    }
};

// Gamma(a)/Gamma(b) for integer a,b >= 1, evaluated as a rising product so
// neither factorial is ever materialized.
Rat gamma_ratio(long long a, long long b);

// C(n,k) exactly; 0 for k < 0 or k > n. n >= 0.
Rat binomial_rat(long long n, long long k);

// Jump rate for a packet of k particles out of a pile of m:
//   phi_s(m,k) = (1/k) * Gamma(m+1) Gamma(m-k+2s) / (Gamma(m-k+1) Gamma(m+2s)),
// defined for 1 <= k <= m. At 2s = 1 this collapses to 1/k.
Rat phi_rate(SpinLabel s, long long m, long long k);

// Total escape rate out of a pile of m: h_s(m) = sum_{k=1}^m 1/(2s+k-1).
// h_s(0) = 0.
Rat h_weight(SpinLabel s, long long m);

// Single-site weight kappa(m) = Gamma(2s+m) / (Gamma(2s) Gamma(1+m))
//                             = C(2s+m-1, m).
Rat kappa(SpinLabel s, long long m);

// Reservoir injection weight beta^k / k for a packet of size k >= 1.
// Requires 0 < beta < 1 exactly.
Rat insertion_weight(const Rat& beta, long long k);

// Aggregate injection rate sum_k beta^k/k = -log(1-beta). Float domain.
double total_insertion_rate(double beta);

}  // namespace harmonic
