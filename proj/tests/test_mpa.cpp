#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "harmonic/mixture.hpp"
#include "harmonic/mpa.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace harmonic;

namespace {

const BoundaryParams kDriven(Rat(2, 5), Rat(1, 5));  // rho_l = 2/3, rho_r = 1/4, delta = 5/12

// Companion coefficient straight from the definition
//   Ybar(m) = h(m) Y(m) - sum_{p<m} abar^(m-p)/(m-p) Y(p),
// written out with gamma ratios only.
Rat ybar_oracle(SpinLabel s, int m, int b) {
    Rat acc = h_weight(s, m) * kappa(s, m) * gamma_ratio(m + b + 1, s.two_s + m + b + 1);
    for (int p = 0; p < m; ++p)
        acc -= kappa(s, p) * gamma_ratio(p + b + 1, s.two_s + p + b + 1) / (m - p);
    return acc;
}

}  // namespace

TEST_CASE("y_op frozen coefficients and shifts") {
    ShiftOp y10 = y_op(SpinLabel(1), 0, 8);
    CHECK(y10.shift == 1);
    CHECK(y10.coeffs[0] == Rat(1));
    ShiftOp y11 = y_op(SpinLabel(1), 1, 8);
    CHECK(y11.shift == 2);
    CHECK(y11.coeffs[1] == Rat(1, 3));
    ShiftOp y20 = y_op(SpinLabel(2), 0, 8);
    CHECK(y20.shift == 2);
    CHECK(y20.coeffs[0] == Rat(1, 2));

    CHECK(y_coeff(SpinLabel(1), 1, 0) == Rat(1, 2));
    CHECK(y_coeff(SpinLabel(1), 1, 1) == Rat(1, 3));
    CHECK_THROWS_AS(y_coeff(SpinLabel(1), -1, 0), std::domain_error);
}

TEST_CASE("ybar matches the definitional oracle") {
    ShiftOp zero = ybar_op(SpinLabel(2), 0, 6);
    for (const Rat& c : zero.coeffs) CHECK(c == Rat(0));

    CHECK(ybar_coeff(SpinLabel(1), 1, 0) == Rat(-1, 2));
    for (int ts = 1; ts <= 3; ++ts) {
        SpinLabel s(ts);
        for (int m = 1; m <= 5; ++m) {
            ShiftOp yb = ybar_op(s, m, 10);
            CHECK(yb.shift == ts + m);
            for (int b = 0; b <= 10; ++b) {
                CHECK(ybar_coeff(s, m, b) == ybar_oracle(s, m, b));
                CHECK(yb.coeffs[b] == ybar_oracle(s, m, b));
            }
        }
    }
}

TEST_CASE("shift bookkeeping composes additively") {
    std::mt19937_64 rng(777);
    SpinLabel s(2);
    for (int trial = 0; trial < 30; ++trial) {
        int m1 = static_cast<int>(rng() % 4);
        int m2 = static_cast<int>(rng() % 4);
        int m3 = static_cast<int>(rng() % 4);
        ShiftOp prod = compose(y_op(s, m1, 40), compose(y_op(s, m2, 40), y_op(s, m3, 40)));
        CHECK(prod.shift == 3 * s.two_s + m1 + m2 + m3);
        CHECK(prod.window() > 0);
    }
    ShiftOp a = abar_pow(3, 12);
    CHECK(a.shift == 3);
    for (const Rat& c : a.coeffs) CHECK(c == Rat(1));
    ShiftOp n = num_op(5);
    CHECK(n.shift == 0);
    CHECK(n.coeffs[4] == Rat(4));
    // a narrow outer window cannot absorb the inner shift
    CHECK_THROWS_AS(compose(y_op(s, 0, 2), abar_pow(6, 12)), std::invalid_argument);
    CHECK_THROWS_AS(shift_add(y_op(s, 0, 6), y_op(s, 1, 6)), std::invalid_argument);
}

TEST_CASE("contract_steady frozen values") {
    SpinLabel s(1);
    CHECK(contract_steady(s, kDriven, {1, 0}) == Rat(2) * kDriven.delta / 3);
    CHECK(contract_steady(s, kDriven, {0, 0, 0}) == Rat(1));
    CHECK_THROWS_AS(contract_steady(s, BoundaryParams(Rat(1, 5), Rat(1, 5)), {1, 0}),
                    degenerate_equilibrium);
    CHECK_THROWS_AS(contract_steady(s, kDriven, {}), std::invalid_argument);
}

TEST_CASE("contraction reproduces the closed form everywhere") {
    for (int ts = 1; ts <= 3; ++ts) {
        SpinLabel s(ts);
        for (int sites = 1; sites <= 4; ++sites) {
            Config m(sites, 0);
            while (true) {
                CHECK(contract_steady(s, kDriven, m) == nu_component(s, kDriven, m));
                int i = sites - 1;
                while (i >= 0 && m[i] == 4) m[i--] = 0;
                if (i < 0) break;
                ++m[i];
            }
        }
    }
}

TEST_CASE("bulk relation closes exactly") {
    CHECK(bulk_relation_residual(SpinLabel(1), 0, 0, 10) == Rat(0));
    CHECK(bulk_relation_residual(SpinLabel(1), 1, 0, 10) == Rat(0));
    CHECK(bulk_relation_residual(SpinLabel(3), 4, 3, 30) == Rat(0));
    for (int ts = 1; ts <= 2; ++ts)
        for (int m = 0; m <= 3; ++m)
            for (int mp = 0; mp <= 3; ++mp)
                CHECK(bulk_relation_residual(SpinLabel(ts), m, mp, 20) == Rat(0));
    // the probe window sizes itself, so only malformed indices are rejected
    CHECK_THROWS_AS(bulk_relation_residual(SpinLabel(3), -1, 3, 3), std::domain_error);
}

TEST_CASE("boundary relations close exactly") {
    const BoundaryParams other(Rat(1, 2), Rat(1, 3));
    for (int ts = 1; ts <= 2; ++ts) {
        SpinLabel s(ts);
        for (int m = 0; m <= 4; ++m) {
            CHECK(left_boundary_residual(s, kDriven, m) == Rat(0));
            CHECK(left_boundary_residual(s, other, m) == Rat(0));
        }
    }
    for (int ts = 1; ts <= 3; ++ts)
        for (int m = 0; m <= 7; ++m) CHECK(right_boundary_residual(SpinLabel(ts), m) == Rat(0));
}

TEST_CASE("identity suite") {
    for (int ts = 1; ts <= 3; ++ts)
        for (int m = 1; m <= 30; ++m) CHECK(harmonic_identity_check(SpinLabel(ts), m) == Rat(0));
    CHECK(harmonic_identity_check(SpinLabel(6), 40) == Rat(0));

    CHECK(ab_identity_check(SpinLabel(1), 1, 0, 0) == Rat(0));
    CHECK(ab_identity_check(SpinLabel(2), 3, 2, 5) == Rat(0));
    CHECK(ab_identity_check(SpinLabel(3), 6, 6, 12) == Rat(0));
    for (int m = 1; m <= 5; ++m)
        for (int mp = 0; mp <= 5; ++mp)
            for (int n = 0; n <= 4; ++n) CHECK(ab_identity_check(SpinLabel(2), m, mp, n) == Rat(0));
    CHECK_THROWS_AS(ab_identity_check(SpinLabel(1), 0, 0, 0), std::domain_error);
}

TEST_CASE("terminating hypergeometric sum matches its digamma form") {
    CHECK(hypg_identity_check(0, 3.3, 1.7, 1e-10));
    CHECK(hypg_identity_check(3, 7.5, -4.2, 1e-10));
    CHECK(hypg_identity_check(6, 2.25, 0.5, 1e-10));
    // psi(b - 1) sits on a pole at b = 1
    CHECK_THROWS_AS(hypg_identity_check(3, 7.5, 1.0, 1e-8), std::domain_error);
    CHECK_THROWS_AS(hypg_identity_check(3, 1.0, 0.4, 1e-8), std::domain_error);
}

TEST_CASE("x series at leading order with a drained right reservoir is y") {
    for (int ts : {1, 2}) {
        SpinLabel s(ts);
        for (int m = 0; m <= 3; ++m) {
            DenseAuxOp x = x_op(s, m, Rat(0), 14, m);
            for (int b = 0; b + ts + m <= 13; ++b)
                CHECK(x.at(b + ts + m, b) ==
                      doctest::Approx(to_double(y_coeff(s, m, b))).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(x_op(SpinLabel(1), 2, Rat(0), 10, 1), std::domain_error);
    CHECK_THROWS_AS(x_op(SpinLabel(1), 0, Rat(1), 10, 5), truncation_error);
}

TEST_CASE("x series agrees with the rotation construction") {
    SpinLabel s(1);
    for (int m = 0; m <= 3; ++m) {
        DenseAuxOp xs = x_op(s, m, kDriven, 12, 80);
        DenseAuxOp xr = x_op_rotation(s, m, kDriven, 12);
        CHECK(xs.tail < 1e-8);
        double budget = xs.tail + xr.tail + 1e-10;
        for (int a = 0; a < 13; ++a)
            for (int b = 0; b < 13; ++b) CHECK(std::abs(xs.at(a, b) - xr.at(a, b)) <= budget);
    }
}

TEST_CASE("untransformed algebra residuals stay below tolerance") {
    SpinLabel s(1);
    for (int m = 0; m <= 2; ++m)
        for (int mp = 0; mp <= 2; ++mp) CHECK(full_mpa_residuals(s, kDriven, m, mp, 16, 1e-8) < 1e-8);

    // refinement cannot make the residual worse
    double coarse = full_mpa_residuals(s, kDriven, 1, 1, 12, 1e-8);
    double fine = full_mpa_residuals(s, kDriven, 1, 1, 20, 1e-8);
    CHECK(fine <= coarse * 1.05 + 1e-14);

    BoundaryParams balanced(Rat(1, 5), Rat(1, 5));
    CHECK(full_mpa_residuals(s, balanced, 1, 1, 16, 1e-8) < 1e-8);
}

TEST_CASE("x contraction tracks the steady law") {
    SpinLabel s(1);
    const int window = 30;

    double direct = mu_component(s, kDriven, {0}, 1e-10);
    CHECK(contract_steady_x(s, kDriven, {0}, window, -1) ==
          doctest::Approx(direct).epsilon(1e-6));

    double quad = mu_quadrature(s, kDriven, {1, 1});
    CHECK(contract_steady_x(s, kDriven, {1, 1}, window, -1) ==
          doctest::Approx(quad).epsilon(1e-6));

    // equal densities collapse to the negative-binomial product
    BoundaryParams balanced(Rat(1, 5), Rat(1, 5));
    CHECK(contract_steady_x(s, balanced, {2}, window, -1) ==
          doctest::Approx(0.032).epsilon(1e-9));

    CHECK_THROWS_AS(contract_steady_x(s, kDriven, {0, 0}, 1, -1), std::invalid_argument);
}

TEST_CASE("golden table and residual report") {
    std::ostringstream csv;
    write_y_golden_csv(csv, 2, 3, 4);
    CHECK(csv.str().rfind("two_s,m,b,y_coeff,ybar_coeff", 0) == 0);
    CHECK(csv.str().find("1,1,0,1/2,-1/2") != std::string::npos);
    CHECK(csv.str().find("1,1,1,1/3,") != std::string::npos);

    std::string rep = mpa_residual_report_json(SpinLabel(1), kDriven, 2, 12);
    CHECK(rep.find("\"schema\":\"harmonic.mpa/1\"") != std::string::npos);
    CHECK(rep.find("\"all_zero\":true") != std::string::npos);
}
