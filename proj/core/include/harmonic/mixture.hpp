#pragma once

#include <iosfwd>
#include <vector>

#include "harmonic/rng.hpp"
#include "harmonic/steady_closed.hpp"

namespace harmonic {

// Ordered cut points of the density interval, one per site, ascending.
// The interval is [min(rho_l, rho_r), max(rho_l, rho_r)].
struct ThetaVector {
    std::vector<double> theta;

    int sites() const { return static_cast<int>(theta.size()); }
};

struct QuadratureConfig {
    int points = 16;        // Gauss-Legendre nodes per axis at the coarsest level
    int levels = 5;         // node count doubles per refinement level
    double target_tol = 1e-10;
};

struct QuadratureResult {
    double value = 0;
    double achieved = 0;    // |last - previous| at the accepted level
    int levels_used = 0;
};

// One step of the iterated beta reduction: integrating the innermost variable
// produces a beta factor and bumps the power carried by the next variable.
struct ReduceStep {
    Rat beta_factor;
    long long exponent;     // power of the next-inner variable after the step
};

// Exact Beta(a, b) for positive integer arguments.
Rat beta_int(long long a, long long b);

// State after integrating out the innermost variable only.
ReduceStep nu_reduce_first_step(SpinLabel s, const Config& m_vec);

// Steady weight via the iterated reduction of the nested-integral form,
// innermost variable first. Exact; agrees with nu_component identically.
Rat nu_integral_reduce(SpinLabel s, const BoundaryParams& p, const Config& m_vec);

// P(m | theta) = kappa(m) (theta/(1+theta))^m (1/(1+theta))^{2s}, theta >= 0.
double negbin_pmf(SpinLabel s, double theta, long long m);

// Steady weight as a convex mixture over ordered cut points, evaluated by
// iterated Gauss-Legendre quadrature with refinement. Supports sites <= 4.
QuadratureResult mu_quadrature_report(SpinLabel s, const BoundaryParams& p,
                                      const Config& m_vec,
                                      const QuadratureConfig& cfg = {});
double mu_quadrature(SpinLabel s, const BoundaryParams& p, const Config& m_vec,
                     const QuadratureConfig& cfg = {});

// Cut points with increments jointly Dirichlet(2s, ..., 2s) on the density
// interval; E[theta_i] is linear in i.
ThetaVector sample_theta(SpinLabel s, const BoundaryParams& p, int sites, Rng& rng);

// Draw theta, then an independent negative-binomial occupation per site.
// Site 1 sits at the rho_l end of the interval.
Config sample_config(SpinLabel s, const BoundaryParams& p, int sites, Rng& rng);

// One configuration per row, entries comma-separated.
void write_config_csv(std::ostream& os, const std::vector<Config>& configs);

}  // namespace harmonic
