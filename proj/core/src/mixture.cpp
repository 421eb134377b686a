#include "harmonic/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "harmonic/exactnum.hpp"

namespace harmonic {

namespace {

void validate_config(const Config& m) {
    if (m.empty()) throw std::invalid_argument("config must have at least one site");
    for (int v : m)
        if (v < 0) throw std::invalid_argument("config entries must be >= 0");
}

double pow_nonneg_int(double x, int e) {
    double acc = 1;
    for (int i = 0; i < e; ++i) acc *= x;
    return acc;
}

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    constexpr double pi = 3.14159265358979323846;
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double deriv = 0;
        for (int it = 0; it < 100; ++it) {
            double pa = 1, pb = 0;
            for (int j = 0; j < n; ++j) {
                double pc = pb;
                pb = pa;
                pa = ((2.0 * j + 1.0) * z * pb - j * pc) / (j + 1.0);
            }
            deriv = n * (z * pa - pb) / (z * z - 1.0);
            double dz = pa / deriv;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * deriv * deriv);
    }
}

struct NestedIntegrand {
    int sites;
    int two_s;
    double hi;
    std::vector<long long> occ;     // occupation coupled to each ascending cut
    std::vector<double> kap;        // kappa(occ) as double
    const std::vector<double>* xg;
    const std::vector<double>* wg;

    double site_factor(int axis, double psi) const {
        const double ps = psi / (1.0 + psi);
        return kap[axis] * std::pow(ps, static_cast<double>(occ[axis])) *
               std::pow(1.0 + psi, -static_cast<double>(two_s));
    }

    double run(int axis, double t_prev) const {
        const double half = 0.5 * (hi - t_prev);
        const double mid = 0.5 * (hi + t_prev);
        double acc = 0;
        for (std::size_t q = 0; q < xg->size(); ++q) {
            const double psi = mid + half * (*xg)[q];
            double f = pow_nonneg_int(psi - t_prev, two_s - 1) * site_factor(axis, psi);
            if (axis == sites - 1)
                f *= pow_nonneg_int(hi - psi, two_s - 1);
            else
                f *= run(axis + 1, psi);
            acc += (*wg)[q] * f;
        }
        return acc * half;
    }
};

}  // namespace

Rat beta_int(long long a, long long b) {
    if (a < 1 || b < 1) throw std::invalid_argument("beta_int: arguments must be >= 1");
    return gamma_ratio(a, a + b) * gamma_ratio(b, 1);
}

ReduceStep nu_reduce_first_step(SpinLabel s, const Config& m_vec) {
    validate_config(m_vec);
    const long long mn = m_vec.back();
    // innermost variable carries power mn + 2s - 1 before integration
    return ReduceStep{beta_int(mn + s.two_s, s.two_s), mn + 2 * s.two_s - 1};
}

Rat nu_integral_reduce(SpinLabel s, const BoundaryParams& p, const Config& m_vec) {
    validate_config(m_vec);
    const int n = static_cast<int>(m_vec.size());
    const int ts = s.two_s;
    const long long total = config_total(m_vec);

    const Rat gam2s = gamma_ratio(ts, 1);
    Rat acc = pow_rat(p.delta, total) *
              gamma_ratio(static_cast<long long>(ts) * (n + 1), ts) / pow_rat(gam2s, n);

    // peel off one variable per step, innermost first; each step leaves a beta
    // factor and adds its integrated power to the next variable out
    long long a_exp = m_vec[n - 1] + ts - 1;
    for (int i = n; i >= 1; --i) {
        acc *= kappa(s, m_vec[i - 1]);
        acc *= beta_int(a_exp + 1, ts);
        if (i > 1) a_exp += ts + m_vec[i - 2];
    }
    return acc;
}

double negbin_pmf(SpinLabel s, double theta, long long m) {
    if (!(theta >= 0)) throw std::domain_error("negbin_pmf: theta must be >= 0");
    if (m < 0) throw std::domain_error("negbin_pmf: m must be >= 0");
    const double ps = theta / (1.0 + theta);
    return to_double(kappa(s, m)) * std::pow(ps, static_cast<double>(m)) *
           std::pow(1.0 + theta, -static_cast<double>(s.two_s));
}

QuadratureResult mu_quadrature_report(SpinLabel s, const BoundaryParams& p,
                                      const Config& m_vec, const QuadratureConfig& cfg) {
    validate_config(m_vec);
    const int n = static_cast<int>(m_vec.size());
    if (n > 4) throw std::invalid_argument("mu_quadrature: supports at most 4 sites");
    if (cfg.points < 2 || cfg.levels < 1)
        throw std::invalid_argument("mu_quadrature: need points >= 2 and levels >= 1");
    if (!(cfg.target_tol > 0))
        throw std::invalid_argument("mu_quadrature: target_tol must be > 0");
    if (p.delta == 0)
        throw degenerate_equilibrium("mu_quadrature: undefined at equal reservoir densities");

    const double rl = to_double(p.rho_l);
    const double rr = to_double(p.rho_r);
    const double lo = std::min(rl, rr);
    const double hi = std::max(rl, rr);

    // the cuts ascend from the smaller density; when rho_l is the larger one,
    // site 1 sits at the top of the interval, so the site order flips
    const Config mm = (rl > rr) ? reversed(m_vec) : m_vec;

    const int ts = s.two_s;
    const Rat gam2s = gamma_ratio(ts, 1);
    const double pref =
        to_double(gamma_ratio(static_cast<long long>(ts) * (n + 1), ts) / pow_rat(gam2s, n)) /
        std::pow(hi - lo, static_cast<double>(ts) * (n + 1) - 1.0);

    NestedIntegrand f;
    f.sites = n;
    f.two_s = ts;
    f.hi = hi;
    f.occ.resize(n);
    f.kap.resize(n);
    for (int i = 0; i < n; ++i) {
        f.occ[i] = mm[i];
        f.kap[i] = to_double(kappa(s, mm[i]));
    }

    std::vector<double> xg, wg;
    double prev = 0;
    for (int level = 0; level < cfg.levels; ++level) {
        const long long nq = static_cast<long long>(cfg.points) << level;
        double work = 1;
        for (int i = 0; i < n; ++i) work *= static_cast<double>(nq);
        if (work > 2e8) {
            std::ostringstream msg;
            msg << "mu_quadrature: tolerance " << cfg.target_tol
                << " not reached within work budget; best estimate " << prev;
            throw truncation_error(msg.str());
        }
        gauss_legendre(static_cast<int>(nq), xg, wg);
        f.xg = &xg;
        f.wg = &wg;
        const double cur = pref * f.run(0, lo);
        if (level > 0) {
            const double diff = std::fabs(cur - prev);
            if (diff < cfg.target_tol) return QuadratureResult{cur, diff, level + 1};
        }
        prev = cur;
    }
    std::ostringstream msg;
    msg << "mu_quadrature: tolerance " << cfg.target_tol
        << " not reached after " << cfg.levels << " levels; best estimate " << prev;
    throw truncation_error(msg.str());
}

double mu_quadrature(SpinLabel s, const BoundaryParams& p, const Config& m_vec,
                     const QuadratureConfig& cfg) {
    return mu_quadrature_report(s, p, m_vec, cfg).value;
}

ThetaVector sample_theta(SpinLabel s, const BoundaryParams& p, int sites, Rng& rng) {
    if (sites < 1) throw std::invalid_argument("sample_theta: sites must be >= 1");
    const double rl = to_double(p.rho_l);
    const double rr = to_double(p.rho_r);
    const double lo = std::min(rl, rr);
    const double span = std::max(rl, rr) - lo;

    // sites + 1 increments, jointly Dirichlet(2s, ..., 2s)
    std::vector<double> g(sites + 1);
    double total = 0;
    for (double& v : g) {
        v = rng.gamma_int(s.two_s);
        total += v;
    }
    ThetaVector tv;
    tv.theta.resize(sites);
    double prefix = 0;
    for (int i = 0; i < sites; ++i) {
        prefix += g[i];
        tv.theta[i] = lo + span * (prefix / total);
    }
    return tv;
}

Config sample_config(SpinLabel s, const BoundaryParams& p, int sites, Rng& rng) {
    const ThetaVector tv = sample_theta(s, p, sites, rng);
    const bool flip = to_double(p.rho_l) > to_double(p.rho_r);
    Config out(sites, 0);
    for (int i = 0; i < sites; ++i) {
        const double th = tv.theta[i];
        const double ps = th / (1.0 + th);
        long long m = 0;
        for (int r = 0; r < s.two_s; ++r) m += rng.geometric_successes(ps);
        out[flip ? sites - 1 - i : i] = static_cast<int>(m);
    }
    return out;
}

void write_config_csv(std::ostream& os, const std::vector<Config>& configs) {
    for (const Config& c : configs) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i) os << ',';
            os << c[i];
        }
        os << '\n';
    }
}

}  // namespace harmonic
