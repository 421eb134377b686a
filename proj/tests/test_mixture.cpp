#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "harmonic/mixture.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace harmonic;

namespace {

const BoundaryParams kDriven(Rat(2, 5), Rat(1, 5));  // rho_l = 2/3, rho_r = 1/4, delta = 5/12

Rat factorial(long long n) {
    Rat f(1);
    for (long long i = 2; i <= n; ++i) f *= i;
    return f;
}

// B(a, b) = (a-1)! (b-1)! / (a+b-1)!
Rat beta_oracle(long long a, long long b) {
    return factorial(a - 1) * factorial(b - 1) / factorial(a + b - 1);
}

double negbin_mean(SpinLabel s, double theta, int m_max) {
    double acc = 0;
    for (int m = 0; m <= m_max; ++m) acc += m * negbin_pmf(s, theta, m);
    return acc;
}

}  // namespace

TEST_CASE("beta_int matches the factorial form") {
    CHECK(beta_int(1, 1) == Rat(1));
    CHECK(beta_int(2, 3) == Rat(1, 12));
    for (long long a = 1; a <= 12; ++a)
        for (long long b = 1; b <= 12; ++b) CHECK(beta_int(a, b) == beta_oracle(a, b));
}

TEST_CASE("first reduction step peels the innermost variable") {
    for (int ts = 1; ts <= 3; ++ts) {
        SpinLabel s(ts);
        for (int last = 0; last <= 5; ++last) {
            ReduceStep step = nu_reduce_first_step(s, {1, 2, last});
            CHECK(step.beta_factor == beta_oracle(last + ts, ts));
            CHECK(step.exponent == last + 2 * ts - 1);
        }
    }
}

TEST_CASE("iterated reduction reproduces the closed form") {
    SpinLabel s1(1);
    CHECK(nu_integral_reduce(s1, kDriven, {0, 0}) == Rat(1));
    CHECK(nu_integral_reduce(s1, kDriven, {1, 0}) == Rat(2) * kDriven.delta / 3);
    CHECK(nu_integral_reduce(SpinLabel(2), kDriven, {2, 0, 1}) ==
          nu_component(SpinLabel(2), kDriven, {2, 0, 1}));

    for (int ts = 1; ts <= 3; ++ts) {
        SpinLabel s(ts);
        for (int sites = 1; sites <= 4; ++sites) {
            Config m(sites, 0);
            while (true) {
                CHECK(nu_integral_reduce(s, kDriven, m) == nu_component(s, kDriven, m));
                int i = sites - 1;
                while (i >= 0 && m[i] == 4) m[i--] = 0;
                if (i < 0) break;
                ++m[i];
            }
        }
    }
}

TEST_CASE("negbin_pmf edge cases and normalization") {
    CHECK(negbin_pmf(SpinLabel(3), 0.0, 0) == 1.0);
    CHECK(negbin_pmf(SpinLabel(3), 0.0, 4) == 0.0);
    for (int m = 0; m <= 10; ++m)
        CHECK(negbin_pmf(SpinLabel(1), 1.0, m) ==
              doctest::Approx(std::pow(0.5, m + 1)).epsilon(1e-14));
    CHECK_THROWS_AS(negbin_pmf(SpinLabel(1), -0.1, 0), std::domain_error);

    for (double theta : {0.3, 0.7, 1.4}) {
        for (int ts : {1, 2, 3}) {
            SpinLabel s(ts);
            double mass = 0;
            for (int m = 0; m <= 400; ++m) mass += negbin_pmf(s, theta, m);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(negbin_mean(s, theta, 400) == doctest::Approx(ts * theta).epsilon(1e-10));
        }
    }
}

TEST_CASE("one-site quadrature has a logarithmic closed form") {
    SpinLabel s(1);
    double expected = std::log((1 + 2.0 / 3.0) / (1 + 0.25)) / (5.0 / 12.0);
    QuadratureResult r = mu_quadrature_report(s, kDriven, {0});
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-10));
    CHECK(r.achieved <= 1e-10);
    CHECK(r.levels_used >= 2);
}

TEST_CASE("quadrature agrees with the rotation evaluation") {
    for (int ts : {1, 2}) {
        SpinLabel s(ts);
        for (int sites = 1; sites <= 2; ++sites) {
            Config m(sites, 0);
            while (true) {
                double quad = mu_quadrature(s, kDriven, m);
                double rot = mu_component(s, kDriven, m, 1e-11);
                CHECK(quad == doctest::Approx(rot).epsilon(1e-8));
                int i = sites - 1;
                while (i >= 0 && m[i] == 2) m[i--] = 0;
                if (i < 0) break;
                ++m[i];
            }
        }
    }
    SpinLabel s(1);
    CHECK(mu_quadrature(s, kDriven, {1, 1, 0}) ==
          doctest::Approx(mu_component(s, kDriven, {1, 1, 0}, 1e-11)).epsilon(1e-8));
}

TEST_CASE("quadrature near equilibrium collapses to the product law") {
    SpinLabel s(1);
    BoundaryParams near_eq(parse_rat("200001/1000000"), Rat(1, 5));
    double rho_mid = to_double(near_eq.rho_l + near_eq.rho_r) / 2;
    for (int m = 0; m <= 3; ++m) {
        double product = negbin_pmf(s, rho_mid, m);
        CHECK(mu_quadrature(s, near_eq, {m}) == doctest::Approx(product).epsilon(1e-4));
    }
}

TEST_CASE("boxed quadrature mass approaches one") {
    SpinLabel s(1);
    double prev = 0;
    for (int cap : {4, 8, 12}) {
        double mass = 0;
        for (int m = 0; m <= cap; ++m) mass += mu_quadrature(s, kDriven, {m});
        CHECK(mass > prev);
        CHECK(mass < 1 + 1e-9);
        prev = mass;
    }
    CHECK(prev > 0.999);
}

TEST_CASE("quadrature guards") {
    SpinLabel s(1);
    CHECK_THROWS_AS(mu_quadrature(s, kDriven, {0, 0, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(mu_quadrature(s, kDriven, {0}, QuadratureConfig{1, 5, 1e-8}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mu_quadrature(s, kDriven, {0}, QuadratureConfig{16, 5, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mu_quadrature(s, kDriven, {0}, QuadratureConfig{4, 1, 1e-12}),
                    truncation_error);
    CHECK_THROWS_AS(mu_quadrature(s, BoundaryParams(Rat(1, 5), Rat(1, 5)), {0}),
                    degenerate_equilibrium);
}

TEST_CASE("theta samples are ordered cuts with linear means") {
    SpinLabel s(1);
    Rng rng(2024);
    const int sites = 3;
    const int draws = 100000;
    const double lo = 0.25, hi = 2.0 / 3.0, span = hi - lo;

    std::vector<double> sum(sites, 0), sumsq(sites, 0);
    for (int d = 0; d < draws; ++d) {
        ThetaVector tv = sample_theta(s, kDriven, sites, rng);
        REQUIRE(tv.sites() == sites);
        double prev = lo;
        for (int i = 0; i < sites; ++i) {
            CHECK(tv.theta[i] >= prev);
            prev = tv.theta[i];
            sum[i] += tv.theta[i];
            sumsq[i] += tv.theta[i] * tv.theta[i];
        }
        CHECK(prev <= hi);
    }
    for (int i = 0; i < sites; ++i) {
        double mean = sum[i] / draws;
        double var = sumsq[i] / draws - mean * mean;
        double se = std::sqrt(var / draws);
        double target = lo + span * (i + 1) / (sites + 1);
        CHECK(std::abs(mean - target) <= 3 * se);
    }
}

TEST_CASE("single cut at spin one half is uniform") {
    SpinLabel s(1);
    Rng rng(99);
    const int draws = 60000;
    const double lo = 0.25, hi = 2.0 / 3.0;
    int below_mid = 0;
    double sum = 0;
    for (int d = 0; d < draws; ++d) {
        double t = sample_theta(s, kDriven, 1, rng).theta[0];
        sum += t;
        if (t < (lo + hi) / 2) ++below_mid;
    }
    double se_mean = (hi - lo) / std::sqrt(12.0 * draws);
    CHECK(std::abs(sum / draws - (lo + hi) / 2) <= 3 * se_mean);
    double frac = static_cast<double>(below_mid) / draws;
    CHECK(std::abs(frac - 0.5) <= 3 * 0.5 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("sampled configurations follow the mixture") {
    SpinLabel s(1);
    Rng rng(31337);
    const int draws = 200000;
    int zero_count = 0;
    for (int d = 0; d < draws; ++d)
        if (sample_config(s, kDriven, 1, rng) == Config{0}) ++zero_count;
    double p0 = mu_quadrature(s, kDriven, {0});
    double freq = static_cast<double>(zero_count) / draws;
    double se = std::sqrt(p0 * (1 - p0) / draws);
    CHECK(std::abs(freq - p0) <= 3.5 * se);
}

TEST_CASE("sampled site means follow the linear profile") {
    SpinLabel s(2);
    Rng rng(4242);
    const int sites = 3;
    const int draws = 100000;
    std::vector<double> sum(sites, 0), sumsq(sites, 0);
    for (int d = 0; d < draws; ++d) {
        Config c = sample_config(s, kDriven, sites, rng);
        for (int i = 0; i < sites; ++i) {
            sum[i] += c[i];
            sumsq[i] += static_cast<double>(c[i]) * c[i];
        }
    }
    const double rl = 2.0 / 3.0, rr = 0.25;
    for (int i = 0; i < sites; ++i) {
        double mean = sum[i] / draws;
        double var = sumsq[i] / draws - mean * mean;
        double se = std::sqrt(var / draws);
        double target = s.two_s * (rl + (rr - rl) * (i + 1) / (sites + 1));
        CHECK(std::abs(mean - target) <= 4 * se);
    }
    // the profile decreases toward the thinner reservoir
    CHECK(sum[0] > sum[sites - 1]);
}

TEST_CASE("swapping reservoirs mirrors the sampled profile") {
    SpinLabel s(1);
    Rng rng(555);
    BoundaryParams swapped = mirrored(kDriven);  // rho_l = 1/4 < rho_r = 2/3
    const int draws = 50000;
    double first = 0, last = 0;
    for (int d = 0; d < draws; ++d) {
        Config c = sample_config(s, swapped, 3, rng);
        first += c[0];
        last += c[2];
    }
    CHECK(first < last);
}

TEST_CASE("equilibrium sampler is a product of negative binomials") {
    SpinLabel s(2);
    BoundaryParams eq(Rat(1, 4), Rat(1, 4));
    Rng rng(808);
    const int draws = 100000;
    int zeros = 0;
    double sum = 0;
    for (int d = 0; d < draws; ++d) {
        Config c = sample_config(s, eq, 2, rng);
        if (c[0] == 0) ++zeros;
        sum += c[1];
    }
    double theta = 1.0 / 3.0;
    double p0 = negbin_pmf(s, theta, 0);  // (3/4)^2
    double freq = static_cast<double>(zeros) / draws;
    CHECK(std::abs(freq - p0) <= 3.5 * std::sqrt(p0 * (1 - p0) / draws));
    double mean_target = s.two_s * theta;
    CHECK(sum / draws == doctest::Approx(mean_target).epsilon(0.02));
}

TEST_CASE("config csv dump") {
    std::ostringstream os;
    write_config_csv(os, {{1, 0, 2}, {0, 0, 0}});
    CHECK(os.str() == "1,0,2\n0,0,0\n");
}
