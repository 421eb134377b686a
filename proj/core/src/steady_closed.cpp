#include "harmonic/steady_closed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <utility>

namespace harmonic {

BoundaryParams::BoundaryParams(const Rat& bl, const Rat& br) : beta_l(bl), beta_r(br) {
    if (!(bl > 0 && bl < 1) || !(br > 0 && br < 1))
        throw std::domain_error("BoundaryParams: reservoir parameters must lie in (0,1)");
    rho_l = bl / (Rat(1) - bl);
    rho_r = br / (Rat(1) - br);
    delta = rho_l - rho_r;
}

BoundaryParams mirrored(const BoundaryParams& p) { return BoundaryParams(p.beta_r, p.beta_l); }

Config reversed(const Config& m) { return Config(m.rbegin(), m.rend()); }

long long config_total(const Config& m) {
    long long t = 0;
    for (int v : m) t += v;
    return t;
}

namespace {

void validate_config(const Config& m) {
    if (m.empty()) throw std::invalid_argument("config must have at least one site");
    for (int v : m)
        if (v < 0) throw std::invalid_argument("config entries must be >= 0");
}

void enumerate_rec(int sites, int remaining, Config& cur, std::vector<Config>& out) {
    if (static_cast<int>(cur.size()) == sites - 1) {
        for (int v = 0; v <= remaining; ++v) {
            cur.push_back(v);
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur.push_back(v);
        enumerate_rec(sites, remaining - v, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Config> enumerate_configs_total(int sites, int total_cap) {
    if (sites < 1) throw std::invalid_argument("enumerate_configs_total: sites must be >= 1");
    if (total_cap < 0) throw std::invalid_argument("enumerate_configs_total: total_cap must be >= 0");
    std::vector<Config> out;
    for (int total = 0; total <= total_cap; ++total) {
        std::vector<Config> shell;
        Config cur;
        enumerate_rec(sites, total, cur, shell);
        for (auto& c : shell)
            if (config_total(c) == total) out.push_back(std::move(c));
    }
    return out;
}

Rat nu_component(SpinLabel s, const BoundaryParams& p, const Config& m) {
    validate_config(m);
    const int n_sites = static_cast<int>(m.size());
    const long long total = config_total(m);
    const long long a = static_cast<long long>(s.two_s) * (n_sites + 1);

    Rat acc = pow_rat(p.delta, total) * gamma_ratio(a, a + total);
    long long suffix = total;  // sum of occupations from site i to the right
    for (int i = 1; i <= n_sites; ++i) {
        const long long ai = static_cast<long long>(s.two_s) * (n_sites + 1 - i);
        acc *= kappa(s, m[i - 1]);
        acc *= gamma_ratio(ai + suffix, ai + (suffix - m[i - 1]));
        suffix -= m[i - 1];
    }
    return acc;
}

Rat nu_component_shifted(SpinLabel s, const BoundaryParams& p, const Config& m) {
    validate_config(m);
    const int n_sites = static_cast<int>(m.size());
    const long long total = config_total(m);
    const long long a = static_cast<long long>(s.two_s) * (n_sites + 1);

    Rat acc = pow_rat(p.delta, total) * gamma_ratio(a, s.two_s);
    long long suffix = total;
    for (int i = 1; i <= n_sites; ++i) {
        const long long ai = static_cast<long long>(s.two_s) * (n_sites + 1 - i);
        acc *= kappa(s, m[i - 1]);
        acc *= gamma_ratio(ai + suffix, ai + s.two_s + suffix);
        suffix -= m[i - 1];
    }
    return acc;
}

double nu_component_double(SpinLabel s, const BoundaryParams& p, const Config& m) {
    validate_config(m);
    const int n_sites = static_cast<int>(m.size());
    const long long total = config_total(m);
    const double delta = to_double(p.delta);
    const int ts = s.two_s;

    // shifted form, factor by factor; every partial product stays moderate
    double acc = std::pow(delta, static_cast<double>(total));
    for (long long j = ts; j < static_cast<long long>(ts) * (n_sites + 1); ++j)
        acc *= static_cast<double>(j);  // Gamma(2s(N+1)) / Gamma(2s)
    long long suffix = total;
    for (int i = 1; i <= n_sites; ++i) {
        const long long ai = static_cast<long long>(ts) * (n_sites + 1 - i);
        for (long long j = 1; j <= m[i - 1]; ++j)
            acc *= static_cast<double>(ts + j - 1) / static_cast<double>(j);  // kappa
        for (int j = 0; j < ts; ++j)
            acc /= static_cast<double>(ai + suffix + j);  // Gamma(x)/Gamma(x+2s)
        suffix -= m[i - 1];
    }
    return acc;
}

Rat rotation_lower(int n_out, int n_in) {
    if (n_out < 0 || n_in < 0) throw std::domain_error("rotation_lower: indices must be >= 0");
    if (n_out > n_in) return Rat(0);
    Rat c = binomial_rat(n_in, n_out);
    return ((n_in - n_out) % 2 == 0) ? c : -c;
}

Rat rotation_raise(SpinLabel s, const Rat& rho, int n_out, int n_in) {
    if (n_out < 0 || n_in < 0) throw std::domain_error("rotation_raise: indices must be >= 0");
    if (n_out < n_in) return Rat(0);
    const int d = n_out - n_in;
    return pow_rat(rho, d) * gamma_ratio(1, d + 1) * gamma_ratio(n_out + s.two_s, n_in + s.two_s);
}

KernelTerm rotation_kernel(SpinLabel s, const Rat& rho, int m, int n, const Rat& tol,
                           bool absolute) {
    if (m < 0 || n < 0) throw std::domain_error("rotation_kernel: indices must be >= 0");
    if (!(rho >= 0 && rho < 1))
        throw truncation_error("rotation_kernel: series converges only for 0 <= rho < 1");
    if (!(tol > 0)) throw std::invalid_argument("rotation_kernel: tol must be > 0");

    const int ts = s.two_s;
    const long long j0 = std::max(m, n);
    // term at the intermediate occupation j:
    //   C(j,m) rho^(j-n) Gamma(j+2s) / ((j-n)! Gamma(n+2s)), sign (-1)^(j-m)
    Rat t = binomial_rat(j0, m) * pow_rat(rho, j0 - n) * gamma_ratio(1, j0 - n + 1) *
            gamma_ratio(j0 + ts, n + ts);
    int sign = ((j0 - m) % 2 == 0) ? 1 : -1;
    Rat acc(0);
    for (long long j = j0;; ++j) {
        acc += (absolute || sign > 0) ? t : -t;
        // Magnitude ratio of term j+1 to term j; decreasing in j, limit rho.
        Rat ratio = rho * Rat(Int((j + 1) * (j + ts)), Int((j + 1 - m) * (j + 1 - n)));
        Rat next = t * ratio;
        if (ratio < 1) {
            Rat bound = next / (Rat(1) - ratio);
            if (bound <= tol) return {acc, bound};
        }
        t = next;
        sign = -sign;
        if (j - j0 > 200000)
            throw truncation_error("rotation_kernel: tail bound not reached, rho too close to 1");
    }
}

Rat z_norm_inverse(SpinLabel s, const BoundaryParams& p, int sites) {
    if (sites < 1) throw std::invalid_argument("z_norm_inverse: sites must be >= 1");
    if (p.delta == 0)
        throw degenerate_equilibrium("z_norm_inverse: undefined at equal reservoir densities");
    const long long a = static_cast<long long>(s.two_s) * (sites + 1);
    return gamma_ratio(a, s.two_s) / pow_rat(p.delta, a - 1);
}

namespace {

Rat equilibrium_product(SpinLabel s, const Rat& beta, const Config& m) {
    Rat one_minus = Rat(1) - beta;
    Rat acc(1);
    for (int mi : m) acc *= kappa(s, mi) * pow_rat(beta, mi) * pow_rat(one_minus, s.two_s);
    return acc;
}

// Envelope of the closed kernel form: with u = rho/(1+rho),
//   (1+rho)^{-(2s+n)} sum_k C(n,k) C(2s+n+m-k-1, m-k) u^{m-k}
// dominates the kernel magnitude termwise. Unlike the kernel itself it is
// smooth in n (no cancellation valleys), so shell-ratio extrapolation on it
// cannot certify early.
Rat kernel_envelope(SpinLabel s, const Rat& rho, int m, int n) {
    const Rat u = rho / (Rat(1) + rho);
    const int kmax = std::min(m, n);
    Rat acc(0);
    for (int k = 0; k <= kmax; ++k)
        acc += binomial_rat(n, k) * binomial_rat(s.two_s + n + m - k - 1, m - k) *
               pow_rat(u, m - k);
    return acc * pow_rat(Rat(1) + rho, -(s.two_s + n));
}

struct KernelCache {
    SpinLabel s;
    Rat rho;
    Rat tol;
    std::map<std::pair<int, int>, std::pair<KernelTerm, Rat>> store;

    // returns (signed kernel, envelope of its magnitude)
    const std::pair<KernelTerm, Rat>& get(int m, int n) {
        auto key = std::make_pair(m, n);
        auto it = store.find(key);
        if (it == store.end()) {
            KernelTerm kt = rotation_kernel(s, rho, m, n, tol, false);
            Rat env = kernel_envelope(s, rho, m, n);
            it = store.emplace(key, std::make_pair(std::move(kt), std::move(env))).first;
        }
        return it->second;
    }
};

// The per-site kernels exist only for rho_R < 1, and the shell sums decay
// geometrically at rate |delta|/(1+rho_R). Exact kernel evaluation gets
// quadratically costlier as rho_R grows, so take the cheaper orientation
// unless its decay is thin. Returns the params to evaluate with and whether
// the site order was flipped.
std::pair<BoundaryParams, bool> orient_for_kernels(const BoundaryParams& p) {
    const bool fwd = p.rho_r < 1;
    const bool bwd = p.rho_l < 1;
    if (!fwd && !bwd)
        throw truncation_error(
            "steady kernels: both reservoir densities have rho >= 1; the per-site rotation "
            "series diverges in either orientation");
    if (fwd != bwd) return fwd ? std::make_pair(p, false) : std::make_pair(mirrored(p), true);
    const Rat ad = p.delta < 0 ? -p.delta : p.delta;
    const bool small_is_fwd = p.rho_r <= p.rho_l;
    const Rat& rho_small = small_is_fwd ? p.rho_r : p.rho_l;
    const bool take_small = ad <= Rat(7, 10) * (Rat(1) + rho_small);
    const bool use_fwd = (small_is_fwd == take_small);
    return use_fwd ? std::make_pair(p, false) : std::make_pair(mirrored(p), true);
}

}  // namespace

double mu_component(SpinLabel s, const BoundaryParams& p, const Config& m, double tail_tol) {
    validate_config(m);
    if (!(tail_tol > 0)) throw std::invalid_argument("mu_component: tail_tol must be > 0");

    if (p.delta == 0) return to_double(equilibrium_product(s, p.beta_l, m));

    auto [q, flip] = orient_for_kernels(p);
    const Config mm = flip ? reversed(m) : m;

    const Rat budget_target(tail_tol);
    KernelCache cache{s, q.rho_r, budget_target * Rat(Int(1), Int(1000000000000LL))};

    const int n_sites = static_cast<int>(mm.size());
    Rat total(0);
    Rat inner_err(0);        // accumulated kernel truncation error, rigorous
    std::vector<Rat> majors; // per-shell majorant sums
    const int shell_min = static_cast<int>(config_total(mm)) + 2;
    const int shell_hard_cap = 200;

    for (int shell = 0;; ++shell) {
        Rat shell_major(0);
        std::vector<Config> shell_configs;
        {
            Config cur;
            enumerate_rec(n_sites, shell, cur, shell_configs);
        }
        for (const Config& n : shell_configs) {
            if (config_total(n) != shell) continue;
            Rat nu = nu_component(s, q, n);
            Rat abs_nu = nu < 0 ? -nu : nu;
            Rat signed_prod(1), hat_prod(1), drift_prod(1), env_prod(1);
            for (int i = 0; i < n_sites; ++i) {
                const auto& [kt, env] = cache.get(mm[i], n[i]);
                signed_prod *= kt.value;
                Rat mag = kt.value < 0 ? -kt.value : kt.value;
                hat_prod *= mag;
                drift_prod *= mag + kt.tail;
                env_prod *= env;
            }
            total += signed_prod * nu;
            inner_err += (drift_prod - hat_prod) * abs_nu;
            shell_major += env_prod * abs_nu;
        }
        majors.push_back(shell_major);

        const size_t M = majors.size();
        if (shell >= shell_min && M >= 3) {
            const Rat& g2 = majors[M - 1];
            const Rat& g1 = majors[M - 2];
            const Rat& g0 = majors[M - 3];
            if (g0 > 0 && g1 > 0 && g2 < g1 && g1 < g0) {
                Rat q1 = g2 / g1, q2 = g1 / g0;
                Rat qs = std::max(q1, q2);
                if (qs <= Rat(7, 8)) {
                    Rat tail_est = g2 * qs / (Rat(1) - qs);
                    if (inner_err + tail_est <= budget_target) return to_double(total);
                }
            }
        }
        if (shell > shell_hard_cap)
            throw truncation_error(
                "mu_component: configuration-shell majorants did not certify the requested "
                "tolerance (shell cap reached); increase tail_tol or bring the reservoir "
                "densities closer together");
    }
}

// ---- boxed vectors ----------------------------------------------------

template <class T>
std::size_t SteadyVector<T>::index(const Config& m) const {
    if (static_cast<int>(m.size()) != sites)
        throw std::invalid_argument("SteadyVector::index: wrong number of sites");
    std::size_t idx = 0;
    for (int i = 0; i < sites; ++i) {
        if (m[i] < 0 || m[i] > cap) throw std::out_of_range("SteadyVector::index: entry outside box");
        idx = idx * (cap + 1) + static_cast<std::size_t>(m[i]);
    }
    return idx;
}

template <class T>
Config SteadyVector<T>::config_at(std::size_t idx) const {
    Config m(sites, 0);
    for (int i = sites - 1; i >= 0; --i) {
        m[i] = static_cast<int>(idx % (cap + 1));
        idx /= (cap + 1);
    }
    return m;
}

template <class T>
T SteadyVector<T>::sum() const {
    T acc{};
    for (const T& v : values) acc += v;
    return acc;
}

namespace {

std::string value_text(const Rat& v) { return format_rat(v); }
std::string value_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool json_quoted(const Rat&) { return true; }
bool json_quoted(double) { return false; }

}  // namespace

template <class T>
void SteadyVector<T>::write_csv(std::ostream& os) const {
    for (int i = 1; i <= sites; ++i) os << "m_" << i << ",";
    os << "value\n";
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        Config m = config_at(idx);
        for (int i = 0; i < sites; ++i) os << m[i] << ",";
        os << value_text(values[idx]) << "\n";
    }
}

template <class T>
void SteadyVector<T>::write_json(std::ostream& os) const {
    os << "{\"schema\":\"harmonic.steady/1\",\"kind\":\"" << kind << "\",\"sites\":" << sites
       << ",\"cap\":" << cap << ",\"declared_tol\":" << value_text(declared_tol)
       << ",\"entries\":[";
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        if (idx) os << ",";
        Config m = config_at(idx);
        os << "{\"config\":[";
        for (int i = 0; i < sites; ++i) os << (i ? "," : "") << m[i];
        os << "],\"value\":";
        if (json_quoted(values[idx]))
            os << '"' << value_text(values[idx]) << '"';
        else
            os << value_text(values[idx]);
        os << "}";
    }
    os << "]}";
}

template struct SteadyVector<Rat>;
template struct SteadyVector<double>;

namespace {

std::size_t box_size(int sites, int cap) {
    std::size_t n = 1;
    for (int i = 0; i < sites; ++i) {
        n *= static_cast<std::size_t>(cap + 1);
        if (n > (std::size_t{1} << 27))
            throw std::invalid_argument("box too large: (cap+1)^sites exceeds 2^27 entries");
    }
    return n;
}

}  // namespace

SteadyVector<Rat> build_nu_vector(SpinLabel s, const BoundaryParams& p, int sites, int cap) {
    if (sites < 1 || cap < 0) throw std::invalid_argument("build_nu_vector: bad box");
    SteadyVector<Rat> out;
    out.sites = sites;
    out.cap = cap;
    out.kind = "nu";
    out.values.resize(box_size(sites, cap));
    for (std::size_t idx = 0; idx < out.values.size(); ++idx)
        out.values[idx] = nu_component(s, p, out.config_at(idx));
    return out;
}

namespace {

// mu on [0,cap]^sites for one pad choice; kernels exact, contraction in double
std::vector<double> mu_box_once(SpinLabel s, const BoundaryParams& q, int sites, int cap, int pad) {
    const int nbox = cap + pad;
    const Rat ktol = pow_rat(Rat(1, 10), 30);

    std::vector<std::vector<double>> kernel(static_cast<std::size_t>(cap) + 1,
                                            std::vector<double>(static_cast<std::size_t>(nbox) + 1));
    for (int m = 0; m <= cap; ++m)
        for (int n = 0; n <= nbox; ++n)
            kernel[m][n] = to_double(rotation_kernel(s, q.rho_r, m, n, ktol).value);

    std::size_t in_size = 1;
    for (int i = 0; i < sites; ++i) in_size *= static_cast<std::size_t>(nbox) + 1;
    std::vector<double> cur(in_size);
    {
        Config n(sites, 0);
        for (std::size_t idx = 0; idx < in_size; ++idx) {
            std::size_t rem = idx;
            for (int i = sites - 1; i >= 0; --i) {
                n[i] = static_cast<int>(rem % (nbox + 1));
                rem /= (nbox + 1);
            }
            cur[idx] = nu_component_double(s, q, n);
        }
    }
    // contract the kernel along each axis, most significant first
    for (int axis = 0; axis < sites; ++axis) {
        std::size_t outer = 1;
        for (int i = 0; i < axis; ++i) outer *= static_cast<std::size_t>(cap) + 1;
        std::size_t inner = 1;
        for (int i = axis + 1; i < sites; ++i) inner *= static_cast<std::size_t>(nbox) + 1;
        std::vector<double> next(outer * (static_cast<std::size_t>(cap) + 1) * inner, 0.0);
        for (std::size_t o = 0; o < outer; ++o)
            for (int mo = 0; mo <= cap; ++mo) {
                const auto& krow = kernel[mo];
                for (int ni = 0; ni <= nbox; ++ni) {
                    const double w = krow[ni];
                    if (w == 0.0) continue;
                    const std::size_t src = (o * (nbox + 1) + ni) * inner;
                    const std::size_t dst = (o * (cap + 1) + mo) * inner;
                    for (std::size_t in = 0; in < inner; ++in) next[dst + in] += w * cur[src + in];
                }
            }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

SteadyVector<double> build_mu_vector(SpinLabel s, const BoundaryParams& p, int sites, int cap,
                                     double tol) {
    if (sites < 1 || cap < 0) throw std::invalid_argument("build_mu_vector: bad box");
    if (!(tol > 0)) throw std::invalid_argument("build_mu_vector: tol must be > 0");
    SteadyVector<double> out;
    out.sites = sites;
    out.cap = cap;
    out.kind = "mu";
    out.values.resize(box_size(sites, cap));

    if (p.delta == 0) {
        for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
            Config m = out.config_at(idx);
            out.values[idx] = to_double(equilibrium_product(s, p.beta_l, m));
        }
        out.declared_tol = 0;
        return out;
    }

    auto [q, flip] = orient_for_kernels(p);

    std::vector<double> prev;
    double diff = 0;
    for (int pad = 12;; pad += 8) {
        std::vector<double> curr = mu_box_once(s, q, sites, cap, pad);
        if (!prev.empty()) {
            diff = 0;
            for (std::size_t i = 0; i < curr.size(); ++i)
                diff = std::max(diff, std::abs(curr[i] - prev[i]));
            if (diff <= tol / 2) {
                prev = std::move(curr);
                break;
            }
        }
        prev = std::move(curr);
        if (pad > 80)
            throw truncation_error("build_mu_vector: pad refinement did not settle below tol");
    }

    if (!flip) {
        out.values = std::move(prev);
    } else {
        for (std::size_t idx = 0; idx < out.values.size(); ++idx)
            out.values[idx] = prev[out.index(reversed(out.config_at(idx)))];
    }
    out.declared_tol = std::max(diff, 1e-15);
    return out;
}

OccupationEstimate expected_occupation(SpinLabel s, const BoundaryParams& p, int sites, int site,
                                       int cap) {
    if (site < 1 || site > sites) throw std::invalid_argument("expected_occupation: bad site");
    SteadyVector<double> mu = build_mu_vector(s, p, sites, cap, 1e-10);
    double mass = 0, moment = 0;
    for (std::size_t idx = 0; idx < mu.values.size(); ++idx) {
        Config m = mu.config_at(idx);
        mass += mu.values[idx];
        moment += m[site - 1] * mu.values[idx];
    }
    OccupationEstimate est;
    est.deficit = 1.0 - mass;
    est.mean = mass > 0 ? moment / mass : 0.0;
    est.warning = !(mass > 0) || est.deficit > 1e-3;
    return est;
}

}  // namespace harmonic
