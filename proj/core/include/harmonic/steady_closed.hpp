#pragma once

#include "harmonic/exactnum.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmonic {

// Occupation configuration (m_1, ..., m_N), all entries >= 0.
using Config = std::vector<int>;

// Thrown when an adaptive series cannot certify the requested tolerance.
// Refusing beats silently under-truncating.
struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by quantities that are undefined at equal reservoir densities.
struct degenerate_equilibrium : std::domain_error {
    using std::domain_error::domain_error;
};

struct BoundaryParams {
    Rat beta_l;
    Rat beta_r;
    Rat rho_l;   // beta_l / (1 - beta_l)
    Rat rho_r;   // beta_r / (1 - beta_r)
    Rat delta;   // rho_l - rho_r
    BoundaryParams(const Rat& bl, const Rat& br);
};

// Reservoirs swapped; the steady state of the mirrored chain is the
// site-reversed steady state of the original.
BoundaryParams mirrored(const BoundaryParams& p);
Config reversed(const Config& m);

long long config_total(const Config& m);

// All configurations of `sites` sites with total occupation <= total_cap,
// ordered by total, then lexicographically.
std::vector<Config> enumerate_configs_total(int sites, int total_cap);

// Stationary weights of the transformed generator, normalized so the empty
// configuration has weight 1. Two printed forms of the same product; they
// agree identically and both are exercised by tests.
Rat nu_component(SpinLabel s, const BoundaryParams& p, const Config& m);
Rat nu_component_shifted(SpinLabel s, const BoundaryParams& p, const Config& m);

// Float evaluation of nu for large windows, arranged as a product of bounded
// factors so it neither overflows nor cancels.
double nu_component_double(SpinLabel s, const BoundaryParams& p, const Config& m);

// <n_out| exp(-S_-) |n_in> = (-1)^(n_in - n_out) C(n_in, n_out), zero above.
Rat rotation_lower(int n_out, int n_in);

// <n_out| exp(rho S_+) |n_in> = rho^(n_out-n_in)/(n_out-n_in)!
//                               * Gamma(n_out+2s)/Gamma(n_in+2s), zero below.
Rat rotation_raise(SpinLabel s, const Rat& rho, int n_out, int n_in);

// One certified value: |true - value| <= tail.
struct KernelTerm {
    Rat value;
    Rat tail;
};

// Single-site kernel <m| exp(-S_-) exp(rho S_+) |n>, summed over the
// intermediate occupation with a rigorous geometric tail bound (the term
// ratio is monotone decreasing toward rho, so once it drops below 1 the
// remainder is dominated by a geometric series). Requires 0 <= rho < 1.
// absolute=true sums magnitudes instead, yielding an upper bound on |kernel|
// used as a majorant by the outer configuration sum.
KernelTerm rotation_kernel(SpinLabel s, const Rat& rho, int m, int n, const Rat& tol,
                           bool absolute = false);

// Inverse normalization Z_N^{-1} = Gamma(2s(N+1)) / Gamma(2s) / delta^(2s(N+1)-1).
// Throws degenerate_equilibrium at delta = 0.
Rat z_norm_inverse(SpinLabel s, const BoundaryParams& p, int sites);

// Steady-state probability of configuration m for the original process,
// evaluated by rotating nu site by site. The result carries a certified error
// <= tail_tol or a truncation_error is thrown. Equal reservoirs collapse to
// the exact product of negative-binomial weights.
double mu_component(SpinLabel s, const BoundaryParams& p, const Config& m, double tail_tol);

// Flat vector of weights on the box [0,cap]^sites, mixed-radix lexicographic
// with site 1 the most significant digit.
template <class T>
struct SteadyVector {
    int sites = 0;
    int cap = 0;
    std::string kind;          // "nu" or "mu"
    double declared_tol = 0;   // mu only: observed refinement error
    std::vector<T> values;

    std::size_t index(const Config& m) const;
    Config config_at(std::size_t idx) const;
    T sum() const;
    void write_csv(std::ostream& os) const;
    void write_json(std::ostream& os) const;
};

SteadyVector<Rat> build_nu_vector(SpinLabel s, const BoundaryParams& p, int sites, int cap);

// Batch mu on a box. Double path: exact kernels and nu factors are converted
// once per entry, then contracted axis by axis; the box is padded and the pad
// grown until the result stops moving by more than tol.
SteadyVector<double> build_mu_vector(SpinLabel s, const BoundaryParams& p, int sites, int cap,
                                     double tol);

struct OccupationEstimate {
    double mean = 0;      // E[m_site] under mu restricted to the box
    double deficit = 0;   // 1 - sum of boxed mu
    bool warning = false; // deficit too large for the boxed mean to be trusted
};

// Mean occupation of `site` (1-based) from boxed mu. warning is set when the
// deficit exceeds 1e-3.
OccupationEstimate expected_occupation(SpinLabel s, const BoundaryParams& p, int sites, int site,
                                       int cap);

}  // namespace harmonic
