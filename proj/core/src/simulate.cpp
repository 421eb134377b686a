#include "harmonic/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "harmonic/detail/specfun.hpp"
#include "harmonic/exactnum.hpp"

namespace harmonic {

namespace {

// rates converted once; indexed by current occupation
struct RateCache {
    SpinLabel s;
    std::vector<double> h;                 // h[m]
    std::vector<std::vector<double>> phi;  // phi[m][k-1]

    explicit RateCache(SpinLabel s_) : s(s_) { ensure(8); }

    void ensure(int m) {
        for (int v = static_cast<int>(h.size()); v <= m; ++v) {
            std::vector<double> row(v);
            for (int k = 1; k <= v; ++k) row[k - 1] = to_double(phi_rate(s, v, k));
            phi.push_back(std::move(row));
            h.push_back(to_double(h_weight(s, v)));
        }
    }
};

// inverse CDF of the logarithmic size distribution; partial sums are cached
// and extended on demand, so no truncation point is ever chosen
struct LogSampler {
    double beta;
    double norm;
    std::vector<double> cum;

    explicit LogSampler(double b) : beta(b), norm(-std::log1p(-b)) {}

    int draw(Rng& rng) {
        const double u = rng.uniform01();
        std::size_t k = 1;
        for (;;) {
            if (k > cum.size()) {
                const double prev = cum.empty() ? 0.0 : cum.back();
                const double inc = std::pow(beta, static_cast<double>(k)) /
                                   (static_cast<double>(k) * norm);
                const double next = prev + inc;
                if (!(next > prev)) return static_cast<int>(k);  // fp floor of the tail
                cum.push_back(next);
            }
            if (u < cum[k - 1]) return static_cast<int>(k);
            ++k;
        }
    }
};

std::string jnum(double x) {
    if (!std::isfinite(x)) return "null";
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

double chi2_p(double chi2, int dof) {
    if (dof < 1) return 1.0;
    return detail::gamma_q(0.5 * dof, 0.5 * chi2);
}

struct GofResult {
    int cells = 0;
    double chi2 = 0;
    int dof = 0;
    double p = 1;
    bool pass = true;
    bool underpowered = false;
};

void write_gof(std::ostringstream& os, const char* name, const GofResult& g) {
    os << "\"" << name << "\": {\"cells\": " << g.cells << ", \"chi2\": " << jnum(g.chi2)
       << ", \"dof\": " << g.dof << ", \"p_value\": " << jnum(g.p)
       << ", \"pass\": " << (g.pass ? "true" : "false")
       << ", \"underpowered\": " << (g.underpowered ? "true" : "false") << "}";
}

// one-sample chi-square with pooling: cells below min_expected are merged into
// a remainder cell, which is itself merged into the smallest kept cell if
// still too thin
GofResult gof_chi2(const std::vector<double>& expected, const std::vector<double>& observed,
                   double rest_expected, double rest_observed, double min_expected,
                   double significance) {
    GofResult g;
    std::vector<std::pair<double, double>> cells;  // (expected, observed)
    double pooled_e = rest_expected, pooled_o = rest_observed;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i] >= min_expected)
            cells.emplace_back(expected[i], observed[i]);
        else {
            pooled_e += expected[i];
            pooled_o += observed[i];
        }
    }
    if (pooled_e > 0 || pooled_o > 0) {
        if (pooled_e >= min_expected || cells.empty())
            cells.emplace_back(pooled_e, pooled_o);
        else {
            auto it = std::min_element(cells.begin(), cells.end());
            it->first += pooled_e;
            it->second += pooled_o;
        }
    }
    g.cells = static_cast<int>(cells.size());
    if (g.cells < 2) {
        g.underpowered = true;
        return g;
    }
    for (auto& [e, o] : cells)
        if (e > 0) g.chi2 += (o - e) * (o - e) / e;
    g.dof = g.cells - 1;
    g.p = chi2_p(g.chi2, g.dof);
    g.pass = g.p >= significance;
    return g;
}

}  // namespace

EventTable enumerate_rates(SpinLabel s, const BoundaryParams& p, const Config& config) {
    const int n = static_cast<int>(config.size());
    if (n < 1) throw std::invalid_argument("enumerate_rates: config must have at least one site");
    for (int v : config)
        if (v < 0) throw std::invalid_argument("enumerate_rates: config entries must be >= 0");

    EventTable t;
    t.events.push_back({EventKind::InsertLeft, 0, 0, total_insertion_rate(to_double(p.beta_l))});
    t.events.push_back(
        {EventKind::InsertRight, n - 1, 0, total_insertion_rate(to_double(p.beta_r))});
    for (int i = 0; i < n; ++i) {
        for (int k = 1; k <= config[i]; ++k) {
            const double r = to_double(phi_rate(s, config[i], k));
            t.events.push_back({i == 0 ? EventKind::ExtractLeft : EventKind::BulkLeft, i, k, r});
            t.events.push_back(
                {i == n - 1 ? EventKind::ExtractRight : EventKind::BulkRight, i, k, r});
        }
    }
    double acc = 0;
    for (const Event& e : t.events) acc += e.rate;
    t.total_rate = acc;
    return t;
}

double log_size_pmf(double beta, long long k) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("log_size_pmf: beta must satisfy 0 < beta < 1");
    if (k < 1) return 0.0;
    return std::pow(beta, static_cast<double>(k)) /
           (static_cast<double>(k) * -std::log1p(-beta));
}

std::vector<double> StatsAccumulator::site_means() const {
    std::vector<double> out(sites, 0.0);
    if (elapsed > 0)
        for (int i = 0; i < sites; ++i) out[i] = occ_time[i] / elapsed;
    return out;
}

std::vector<double> StatsAccumulator::site_errors() const {
    std::vector<double> out(sites, std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> means(sites);
    for (std::size_t b = 0; b < batch_time.size(); ++b) {
        if (!(batch_time[b] > 0)) continue;
        for (int i = 0; i < sites; ++i) means[i].push_back(batch_occ_time[b][i] / batch_time[b]);
    }
    for (int i = 0; i < sites; ++i) {
        const std::size_t nb = means[i].size();
        if (nb < 2) continue;
        double mm = 0;
        for (double x : means[i]) mm += x;
        mm /= static_cast<double>(nb);
        double var = 0;
        for (double x : means[i]) var += (x - mm) * (x - mm);
        var /= static_cast<double>(nb - 1);
        out[i] = std::sqrt(var / static_cast<double>(nb));
    }
    return out;
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
    if (other.sites == 0) return;
    if (sites == 0) {
        *this = other;
        return;
    }
    if (other.sites != sites) throw std::invalid_argument("merge: site counts differ");
    elapsed += other.elapsed;
    events += other.events;
    for (int i = 0; i < sites; ++i) {
        occ_time[i] += other.occ_time[i];
        occ_sq_time[i] += other.occ_sq_time[i];
    }
    for (const auto& [c, w] : other.config_time) config_time[c] += w;
    snapshots += other.snapshots;
    for (const auto& [c, k] : other.snapshot_counts) snapshot_counts[c] += k;
    for (const auto& [k, c] : other.insert_sizes_l) insert_sizes_l[k] += c;
    for (const auto& [k, c] : other.insert_sizes_r) insert_sizes_r[k] += c;
    batch_time.insert(batch_time.end(), other.batch_time.begin(), other.batch_time.end());
    batch_occ_time.insert(batch_occ_time.end(), other.batch_occ_time.begin(),
                          other.batch_occ_time.end());
}

StatsAccumulator gillespie_run(SpinLabel s, const BoundaryParams& p, int sites, double t_max,
                               std::uint64_t seed, double burn_in, const GillespieOptions& opt) {
    if (sites < 1) throw std::invalid_argument("gillespie_run: sites must be >= 1");
    if (!(burn_in >= 0) || !(t_max > burn_in))
        throw std::invalid_argument("gillespie_run: need t_max > burn_in >= 0");
    if (opt.batches < 1 || !(opt.snapshot_dt > 0) || opt.track_total_cap < 0)
        throw std::invalid_argument("gillespie_run: bad options");

    Rng rng(seed);
    RateCache rc(s);
    LogSampler sampler_l(to_double(p.beta_l));
    LogSampler sampler_r(to_double(p.beta_r));
    const double ins_l = total_insertion_rate(to_double(p.beta_l));
    const double ins_r = total_insertion_rate(to_double(p.beta_r));

    Config m(sites, 0);
    std::vector<double> hs(sites, 0.0);
    double total_out = 0, comp = 0;
    auto add_out = [&](double d) {
        // Kahan update; the running total drifts only through the periodic
        // exact recompute below
        const double y = d - comp;
        const double tt = total_out + y;
        comp = (tt - total_out) - y;
        total_out = tt;
    };
    auto set_site = [&](int i, int newm) {
        rc.ensure(newm);
        add_out(2.0 * (rc.h[newm] - hs[i]));
        hs[i] = rc.h[newm];
        m[i] = newm;
    };

    StatsAccumulator st;
    st.sites = sites;
    st.occ_time.assign(sites, 0.0);
    st.occ_sq_time.assign(sites, 0.0);
    st.batch_time.assign(opt.batches, 0.0);
    st.batch_occ_time.assign(opt.batches, std::vector<double>(sites, 0.0));
    const double batch_len = (t_max - burn_in) / opt.batches;

    double next_snap = burn_in;
    auto accumulate = [&](double t0, double t1) {
        const double lo = std::max(t0, burn_in);
        const double hi = std::min(t1, t_max);
        while (next_snap < hi) {
            st.snapshot_counts[m] += 1;
            st.snapshots += 1;
            next_snap += opt.snapshot_dt;
        }
        if (!(lo < hi)) return;
        st.elapsed += hi - lo;
        for (int i = 0; i < sites; ++i) {
            st.occ_time[i] += m[i] * (hi - lo);
            st.occ_sq_time[i] += static_cast<double>(m[i]) * m[i] * (hi - lo);
        }
        if (config_total(m) <= opt.track_total_cap) st.config_time[m] += hi - lo;
        double a = lo;
        while (a < hi) {
            const int b = std::min(opt.batches - 1,
                                   static_cast<int>((a - burn_in) / batch_len));
            double e = std::min(hi, burn_in + (b + 1) * batch_len);
            if (!(e > a)) e = hi;  // fp guard at batch edges
            st.batch_time[b] += e - a;
            for (int i = 0; i < sites; ++i) st.batch_occ_time[b][i] += m[i] * (e - a);
            a = e;
        }
    };

    double t = 0;
    unsigned long long fired = 0;
    unsigned long long recompute_at = 65536;
    while (t < t_max) {
        if (opt.max_events && fired >= opt.max_events) break;
        const double total = total_out + ins_l + ins_r;
        const double dt = rng.exponential(total);
        accumulate(t, std::min(t + dt, t_max));
        if (t + dt >= t_max) {
            t = t_max;
            break;
        }
        t += dt;

        double r = rng.uniform01() * total;
        const bool counted = t >= burn_in;
        if (r < ins_l) {
            const int k = sampler_l.draw(rng);
            set_site(0, m[0] + k);
            if (counted) st.insert_sizes_l[k] += 1;
        } else if (r < ins_l + ins_r) {
            const int k = sampler_r.draw(rng);
            set_site(sites - 1, m[sites - 1] + k);
            if (counted) st.insert_sizes_r[k] += 1;
        } else {
            r -= ins_l + ins_r;
            int site = -1;
            bool to_right = false;
            for (int i = 0; i < sites; ++i) {
                if (r < 2.0 * hs[i]) {
                    site = i;
                    to_right = r >= hs[i];
                    if (to_right) r -= hs[i];
                    break;
                }
                r -= 2.0 * hs[i];
            }
            if (site < 0) {
                // rounding pushed r past the table; take any enabled move
                for (int i = 0; i < sites; ++i)
                    if (m[i] > 0) {
                        site = i;
                        r = 0;
                        break;
                    }
            }
            if (site < 0) {
                set_site(0, m[0] + sampler_l.draw(rng));
            } else {
                const int mi = m[site];
                int k = 1;
                for (; k < mi; ++k) {
                    const double f = rc.phi[mi][k - 1];
                    if (r < f) break;
                    r -= f;
                }
                set_site(site, mi - k);
                if (to_right && site < sites - 1) set_site(site + 1, m[site + 1] + k);
                if (!to_right && site > 0) set_site(site - 1, m[site - 1] + k);
            }
        }
        ++fired;
        if (counted) st.events += 1;
        if (fired >= recompute_at) {
            recompute_at += 65536;
            total_out = 0;
            comp = 0;
            for (int i = 0; i < sites; ++i) total_out += 2.0 * hs[i];
        }
    }
    return st;
}

StatsAccumulator gillespie_run(SpinLabel s, const BoundaryParams& p, int sites, double t_max,
                               std::uint64_t seed) {
    return gillespie_run(s, p, sites, t_max, seed, 0.1 * t_max, GillespieOptions{});
}

std::string empirical_vs_exact_report(SpinLabel s, const BoundaryParams& p,
                                      const StatsAccumulator& stats,
                                      const std::map<Config, unsigned long long>* sampler_counts,
                                      const ReportOptions& opt) {
    const int n = stats.sites;
    if (n < 1) throw std::invalid_argument("empirical_vs_exact_report: empty accumulator");

    // one boxed evaluation serves every exact reference below
    const SteadyVector<double> box = build_mu_vector(s, p, n, opt.exact_cap, opt.mu_tol);
    double mass = 0;
    std::vector<double> moment(n, 0.0);
    for (std::size_t idx = 0; idx < box.values.size(); ++idx) {
        const Config c = box.config_at(idx);
        mass += box.values[idx];
        for (int i = 0; i < n; ++i) moment[i] += c[i] * box.values[idx];
    }
    const double deficit = 1.0 - mass;

    std::ostringstream os;
    os << "{\n  \"schema\": \"harmonic.sim-report/1\",\n";
    os << "  \"sites\": " << n << ",\n";
    os << "  \"elapsed\": " << jnum(stats.elapsed) << ",\n";
    os << "  \"events\": " << stats.events << ",\n";
    os << "  \"snapshots\": " << stats.snapshots << ",\n";
    os << "  \"significance\": " << jnum(opt.significance) << ",\n";
    os << "  \"reference_deficit\": " << jnum(deficit) << ",\n";

    bool all_pass = true;
    bool any_under = false;

    // per-site means against the boxed exact reference
    const std::vector<double> emp = stats.site_means();
    const std::vector<double> se = stats.site_errors();
    os << "  \"site_means\": [\n";
    for (int i = 0; i < n; ++i) {
        const double exact = mass > 0 ? moment[i] / mass : 0.0;
        const bool powered = std::isfinite(se[i]) && se[i] > 0 && mass > 0 && deficit <= 1e-3;
        double z = 0, pv = 1;
        bool pass = true;
        if (powered) {
            z = (emp[i] - exact) / se[i];
            pv = normal_two_sided_p(z);
            pass = pv >= opt.significance;
        }
        all_pass = all_pass && (pass || !powered);
        any_under = any_under || !powered;
        os << "    {\"site\": " << (i + 1) << ", \"empirical\": " << jnum(emp[i])
           << ", \"exact\": " << jnum(exact) << ", \"se\": " << jnum(se[i])
           << ", \"z\": " << jnum(z) << ", \"p_value\": " << jnum(pv)
           << ", \"pass\": " << (pass ? "true" : "false")
           << ", \"underpowered\": " << (powered ? "false" : "true") << "}"
           << (i + 1 < n ? "," : "") << "\n";
    }
    os << "  ],\n  ";

    // sampled configurations against exact probabilities
    {
        const int cand_cap = std::min(14, box.cap);
        std::vector<Config> cand = enumerate_configs_total(n, cand_cap);
        std::vector<double> ex, ob;
        double kept_prob = 0;
        double kept_obs = 0;
        const double ns = static_cast<double>(stats.snapshots);
        for (const Config& c : cand) {
            const double prob = box.values[box.index(c)];
            auto it = stats.snapshot_counts.find(c);
            const double o = it == stats.snapshot_counts.end()
                                 ? 0.0
                                 : static_cast<double>(it->second);
            ex.push_back(ns * prob);
            ob.push_back(o);
            kept_prob += prob;
            kept_obs += o;
        }
        const double rest_e = ns * std::max(0.0, 1.0 - kept_prob);
        const double rest_o = ns - kept_obs;
        GofResult g = gof_chi2(ex, ob, rest_e, rest_o, opt.min_expected, opt.significance);
        all_pass = all_pass && (g.pass || g.underpowered);
        any_under = any_under || g.underpowered;
        write_gof(os, "config_gof", g);
        os << ",\n  ";
    }

    // insertion packet sizes against the logarithmic law
    for (int side = 0; side < 2; ++side) {
        const auto& counts = side == 0 ? stats.insert_sizes_l : stats.insert_sizes_r;
        const double beta = to_double(side == 0 ? p.beta_l : p.beta_r);
        double total = 0;
        int k_max = 0;
        for (const auto& [k, c] : counts) {
            total += static_cast<double>(c);
            k_max = std::max(k_max, k);
        }
        std::vector<double> ex, ob;
        double cdf = 0;
        for (int k = 1; k <= k_max; ++k) {
            const double prob = log_size_pmf(beta, k);
            cdf += prob;
            auto it = counts.find(k);
            ex.push_back(total * prob);
            ob.push_back(it == counts.end() ? 0.0 : static_cast<double>(it->second));
        }
        GofResult g = gof_chi2(ex, ob, total * std::max(0.0, 1.0 - cdf), 0.0,
                               opt.min_expected, opt.significance);
        all_pass = all_pass && (g.pass || g.underpowered);
        any_under = any_under || g.underpowered;
        write_gof(os, side == 0 ? "insert_sizes_left" : "insert_sizes_right", g);
        os << ",\n  ";
    }

    // two-sample test against direct mixture samples
    if (sampler_counts) {
        double n1 = 0, n2 = 0;
        std::map<Config, std::pair<double, double>> cells;
        for (const auto& [c, k] : stats.snapshot_counts) {
            cells[c].first += static_cast<double>(k);
            n1 += static_cast<double>(k);
        }
        for (const auto& [c, k] : *sampler_counts) {
            cells[c].second += static_cast<double>(k);
            n2 += static_cast<double>(k);
        }
        GofResult g;
        if (n1 > 0 && n2 > 0) {
            const double k1 = std::sqrt(n2 / n1);
            const double k2 = std::sqrt(n1 / n2);
            double pooled1 = 0, pooled2 = 0;
            int kept = 0;
            double chi2 = 0;
            for (const auto& [c, pair] : cells) {
                const auto& [a, b] = pair;
                if (a + b >= 2 * opt.min_expected) {
                    chi2 += (k1 * a - k2 * b) * (k1 * a - k2 * b) / (a + b);
                    ++kept;
                } else {
                    pooled1 += a;
                    pooled2 += b;
                }
            }
            if (pooled1 + pooled2 > 0) {
                chi2 += (k1 * pooled1 - k2 * pooled2) * (k1 * pooled1 - k2 * pooled2) /
                        (pooled1 + pooled2);
                ++kept;
            }
            g.cells = kept;
            g.chi2 = chi2;
            g.dof = kept - 1;
            if (kept < 2)
                g.underpowered = true;
            else {
                g.p = chi2_p(chi2, g.dof);
                g.pass = g.p >= opt.significance;
            }
        } else {
            g.underpowered = true;
        }
        all_pass = all_pass && (g.pass || g.underpowered);
        any_under = any_under || g.underpowered;
        write_gof(os, "sampler_two_sample", g);
        os << ",\n  ";
    } else {
        os << "\"sampler_two_sample\": null,\n  ";
    }

    os << "\"underpowered_any\": " << (any_under ? "true" : "false") << ",\n";
    os << "  \"verdict\": \"" << (all_pass ? "pass" : "fail") << "\"\n}\n";
    return os.str();
}

bool report_passed(const std::string& report_json) {
    return report_json.find("\"verdict\": \"pass\"") != std::string::npos;
}

}  // namespace harmonic
