#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace harmonic {

// Deterministic random source. All transforms are written out here instead of
// using std::*_distribution, whose mappings differ across standard libraries;
// a fixed seed must reproduce the same trajectory on any toolchain.
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    // uniform on [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1], safe under log
    double uniform_pos() { return 1.0 - uniform01(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Gamma(shape, 1) for integer shape >= 1, as a sum of exponentials
    double gamma_int(int shape) {
        double acc = 0;
        for (int i = 0; i < shape; ++i) acc += -std::log(uniform_pos());
        return acc;
    }

    // Count of successes before the first failure, success probability p:
    // P(X = j) = p^j (1-p). Inverse CDF, exact for p in [0, 1).
    long long geometric_successes(double p) {
        if (p <= 0) return 0;
        return static_cast<long long>(std::floor(std::log(uniform_pos()) / std::log(p)));
    }
};

}  // namespace harmonic
