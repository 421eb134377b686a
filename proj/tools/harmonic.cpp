// command-line front end: verification suites, steady-state tables, simulation
// runs, and cross-representation comparisons, with fraction-exact parameters.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "harmonic/generator.hpp"
#include "harmonic/mixture.hpp"
#include "harmonic/mpa.hpp"
#include "harmonic/simulate.hpp"
#include "harmonic/steady_closed.hpp"

using namespace harmonic;

namespace {

struct RunConfig {
    int two_s = 1;
    int sites = 2;
    std::string beta_left = "2/5";
    std::string beta_right = "1/5";
    int cap = 6;
    int b_max = 16;
    int series_order = -1;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    double t_max = 50000;
    int replicas = 1;
    std::string out;
    std::string format = "csv";
    bool corrupt_rate = false;
};

void add_common(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--two-s", rc.two_s, "spin label 2s, a positive integer")
        ->envname("HARMONIC_TWO_S");
    cmd->add_option("--sites", rc.sites, "number of sites N")->envname("HARMONIC_SITES");
    cmd->add_option("--beta-left", rc.beta_left, "left activity, exact fraction like 2/5")
        ->envname("HARMONIC_BETA_LEFT");
    cmd->add_option("--beta-right", rc.beta_right, "right activity, exact fraction like 1/5")
        ->envname("HARMONIC_BETA_RIGHT");
    cmd->add_option("--cap", rc.cap, "occupation cap / grid limit")->envname("HARMONIC_CAP");
    cmd->add_option("--b-max", rc.b_max, "auxiliary window bound")->envname("HARMONIC_B_MAX");
    cmd->add_option("--series-order", rc.series_order,
                    "series truncation order for rotated operators, -1 = closed kernel")
        ->envname("HARMONIC_SERIES_ORDER");
    cmd->add_option("--tol", rc.tol, "numeric tolerance")->envname("HARMONIC_TOL");
    cmd->add_option("--seed", rc.seed, "simulation seed")->envname("HARMONIC_SEED");
    cmd->add_option("--t-max", rc.t_max, "simulated time horizon")->envname("HARMONIC_T_MAX");
    cmd->add_option("--replicas", rc.replicas, "independent simulation replicas")
        ->envname("HARMONIC_REPLICAS");
    cmd->add_option("--out", rc.out, "output file (default stdout)")->envname("HARMONIC_OUT");
    cmd->add_option("--format", rc.format, "csv or json")->envname("HARMONIC_FORMAT");
}

struct Params {
    SpinLabel s;
    BoundaryParams p;
};

Params check_config(const RunConfig& rc) {
    if (rc.two_s < 1) throw std::invalid_argument("--two-s must be >= 1");
    if (rc.sites < 1) throw std::invalid_argument("--sites must be >= 1");
    if (rc.cap < 0) throw std::invalid_argument("--cap must be >= 0");
    if (!(rc.tol > 0)) throw std::invalid_argument("--tol must be > 0");
    if (!(rc.t_max > 0)) throw std::invalid_argument("--t-max must be > 0");
    if (rc.replicas < 1) throw std::invalid_argument("--replicas must be >= 1");
    if (rc.format != "csv" && rc.format != "json")
        throw std::invalid_argument("--format must be csv or json");
    const Rat bl = parse_rat(rc.beta_left);
    const Rat br = parse_rat(rc.beta_right);
    if (!(bl > 0 && bl < 1)) throw std::invalid_argument("--beta-left must lie in (0,1)");
    if (!(br > 0 && br < 1)) throw std::invalid_argument("--beta-right must lie in (0,1)");
    return {SpinLabel(rc.two_s), BoundaryParams(bl, br)};
}

struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw std::invalid_argument("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& get() { return *os; }
};

std::string jnum(double x) {
    if (!std::isfinite(x)) return "null";
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

// collects one report entry per (check, parameter tuple)
struct Verifier {
    std::ostringstream body;
    int failures = 0;
    bool first = true;

    void entry(const std::string& check, const std::string& params, bool pass) {
        if (!first) body << ",\n";
        first = false;
        body << "    {\"check\": \"" << check << "\", \"params\": " << params
             << ", \"pass\": " << (pass ? "true" : "false") << "}";
        if (!pass) {
            ++failures;
            std::cerr << "FAIL " << check << " " << params << "\n";
        }
    }

    int finish(const RunConfig& rc, const char* schema) {
        Sink sink(rc.out);
        sink.get() << "{\n  \"schema\": \"" << schema << "\",\n  \"entries\": [\n"
                   << body.str() << "\n  ],\n  \"failures\": " << failures
                   << ",\n  \"verdict\": \"" << (failures == 0 ? "pass" : "fail") << "\"\n}\n";
        return failures == 0 ? 0 : 1;
    }
};

std::string kv(std::initializer_list<std::pair<const char*, long long>> items) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [k, v] : items) {
        if (!first) os << ", ";
        first = false;
        os << "\"" << k << "\": " << v;
    }
    os << "}";
    return os.str();
}

int cmd_verify(const RunConfig& rc) {
    const auto [s_unused, p] = check_config(rc);
    (void)s_unused;
    if (p.delta == 0)
        throw std::invalid_argument("verify: reservoir activities must differ");
    Verifier v;

    for (int ts = 1; ts <= rc.two_s; ++ts) {
        const SpinLabel s(ts);
        for (int m = 1; m <= 30; ++m) {
            Rat sum(0);
            for (int k = 1; k <= m; ++k) sum += phi_rate(s, m, k);
            v.entry("phi_sum_rule", kv({{"two_s", ts}, {"m", m}}), sum == h_weight(s, m));
        }
        for (int m = 1; m <= 25; ++m)
            v.entry("harmonic_identity", kv({{"two_s", ts}, {"m", m}}),
                    harmonic_identity_check(s, m) == 0);
        for (int m = 0; m <= 4; ++m)
            for (int mp = 0; mp <= 4; ++mp)
                v.entry("mpa_bulk", kv({{"two_s", ts}, {"m", m}, {"mp", mp}}),
                        bulk_relation_residual(s, m, mp, 12) == 0);
        for (int m = 1; m <= 4; ++m) {
            v.entry("mpa_left", kv({{"two_s", ts}, {"m", m}}),
                    left_boundary_residual(s, p, m, 12) == 0);
            v.entry("mpa_right", kv({{"two_s", ts}, {"m", m}}),
                    right_boundary_residual(s, m) == 0);
        }
    }
    for (int ts = 1; ts <= std::min(rc.two_s, 3); ++ts) {
        const SpinLabel s(ts);
        for (int m = 1; m <= 4; ++m)
            for (int mp = 0; mp <= 4; ++mp)
                for (int na = 0; na <= 6; ++na)
                    v.entry("ab_identity",
                            kv({{"two_s", ts}, {"m", m}, {"mp", mp}, {"n_aux", na}}),
                            ab_identity_check(s, m, mp, na) == 0);
    }

    bool corrupt_pending = rc.corrupt_rate;
    for (int ts = 1; ts <= rc.two_s; ++ts) {
        const SpinLabel s(ts);
        for (int n = 1; n <= rc.sites; ++n) {
            auto residuals = stationarity_residual_exact(s, p, n, rc.cap);
            if (corrupt_pending && !residuals.empty()) {
                // test hook: emulate one wrong rate so the exit-code contract
                // is exercised end to end
                residuals.begin()->second += Rat(1, 997);
                corrupt_pending = false;
            }
            bool all_zero = true;
            for (const auto& [c, r] : residuals) all_zero = all_zero && r == 0;
            v.entry("exact_stationarity", kv({{"two_s", ts}, {"sites", n}}), all_zero);
        }
    }

    for (int ts = 1; ts <= rc.two_s; ++ts) {
        const SpinLabel s(ts);
        for (int n = 1; n <= rc.sites; ++n)
            for (const Config& c : enumerate_configs_total(n, rc.cap)) {
                const Rat a = nu_component(s, p, c);
                const Rat b = nu_integral_reduce(s, p, c);
                const Rat d = contract_steady(s, p, c);
                v.entry("triple_equality",
                        kv({{"two_s", ts}, {"sites", n}, {"total", config_total(c)}}),
                        a == b && b == d);
            }
    }
    return v.finish(rc, "harmonic.verify/1");
}

int cmd_steady(const RunConfig& rc) {
    const auto [s, p] = check_config(rc);
    const double box = std::pow(rc.cap + 1.0, rc.sites);
    if (box > 2e6) throw std::invalid_argument("steady: box too large, lower --cap or --sites");

    const SteadyVector<Rat> nu = build_nu_vector(s, p, rc.sites, rc.cap);
    const SteadyVector<double> mu = build_mu_vector(s, p, rc.sites, rc.cap, rc.tol);
    const Rat zinv = z_norm_inverse(s, p, rc.sites);

    // per-site means from the vector already in hand; the deficit is shared
    std::vector<OccupationEstimate> prof(rc.sites);
    {
        double mass = 0;
        std::vector<double> moment(static_cast<std::size_t>(rc.sites), 0.0);
        for (std::size_t idx = 0; idx < mu.values.size(); ++idx) {
            const Config c = mu.config_at(idx);
            mass += mu.values[idx];
            for (int i = 0; i < rc.sites; ++i) moment[i] += c[i] * mu.values[idx];
        }
        for (int i = 0; i < rc.sites; ++i) {
            prof[i].mean = mass > 0 ? moment[i] / mass : 0.0;
            prof[i].deficit = 1.0 - mass;
            prof[i].warning = !(mass > 0) || prof[i].deficit > 1e-3;
        }
    }

    Sink sink(rc.out);
    std::ostream& os = sink.get();
    os << std::setprecision(12);
    double running = 0;
    if (rc.format == "csv") {
        os << "# harmonic.steady/1\n";
        os << "# two_s=" << s.two_s << " sites=" << rc.sites << " beta_left=" << rc.beta_left
           << " beta_right=" << rc.beta_right << " cap=" << rc.cap
           << " mu_tol=" << mu.declared_tol << "\n";
        os << "# z_inverse=" << format_rat(zinv) << "\n";
        for (int i = 1; i <= rc.sites; ++i) os << "m_" << i << ",";
        os << "nu,mu,deficit\n";
        for (std::size_t idx = 0; idx < nu.values.size(); ++idx) {
            const Config c = nu.config_at(idx);
            running += mu.values[idx];
            for (int e : c) os << e << ",";
            os << format_rat(nu.values[idx]) << "," << mu.values[idx] << "," << (1.0 - running)
               << "\n";
        }
        os << "# profile site,mean,deficit\n";
        for (int i = 0; i < rc.sites; ++i)
            os << "# profile " << (i + 1) << "," << prof[i].mean << "," << prof[i].deficit
               << "\n";
    } else {
        os << "{\n  \"schema\": \"harmonic.steady/1\",\n";
        os << "  \"two_s\": " << s.two_s << ", \"sites\": " << rc.sites << ",\n";
        os << "  \"beta_left\": \"" << format_rat(p.beta_l) << "\", \"beta_right\": \""
           << format_rat(p.beta_r) << "\",\n";
        os << "  \"cap\": " << rc.cap << ", \"mu_tol\": " << jnum(mu.declared_tol) << ",\n";
        os << "  \"z_inverse\": \"" << format_rat(zinv) << "\",\n";
        os << "  \"rows\": [\n";
        for (std::size_t idx = 0; idx < nu.values.size(); ++idx) {
            const Config c = nu.config_at(idx);
            running += mu.values[idx];
            os << "    {\"m\": [";
            for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << c[i];
            os << "], \"nu\": \"" << format_rat(nu.values[idx]) << "\", \"mu\": "
               << jnum(mu.values[idx]) << ", \"deficit\": " << jnum(1.0 - running) << "}"
               << (idx + 1 < nu.values.size() ? "," : "") << "\n";
        }
        os << "  ],\n  \"profile\": [\n";
        for (int i = 0; i < rc.sites; ++i)
            os << "    {\"site\": " << (i + 1) << ", \"mean\": " << jnum(prof[i].mean)
               << ", \"deficit\": " << jnum(prof[i].deficit) << "}"
               << (i + 1 < rc.sites ? "," : "") << "\n";
        os << "  ]\n}\n";
    }
    return 0;
}

int cmd_profile(const RunConfig& rc) {
    const auto [s, p] = check_config(rc);
    const double box = std::pow(rc.cap + 1.0, rc.sites);
    if (box > 2e6) throw std::invalid_argument("profile: box too large, lower --cap or --sites");

    Sink sink(rc.out);
    std::ostream& os = sink.get();
    os << std::setprecision(12);
    const double span = to_double(p.rho_r - p.rho_l);
    const double rl = to_double(p.rho_l);
    // one box build serves every site; the mass deficit is a property of the
    // whole box, so it is the same on each row
    const SteadyVector<double> mu = build_mu_vector(s, p, rc.sites, rc.cap, 1e-10);
    double mass = 0;
    std::vector<double> moment(static_cast<std::size_t>(rc.sites), 0.0);
    for (std::size_t idx = 0; idx < mu.values.size(); ++idx) {
        const Config m = mu.config_at(idx);
        mass += mu.values[idx];
        for (int i = 0; i < rc.sites; ++i) moment[i] += m[i] * mu.values[idx];
    }
    const double deficit = 1.0 - mass;
    auto mean_at = [&](int i) { return mass > 0 ? moment[i - 1] / mass : 0.0; };
    if (rc.format == "csv") {
        os << "# harmonic.profile/1\n";
        os << "site,mean,deficit,linear_reference\n";
        for (int i = 1; i <= rc.sites; ++i) {
            const double ref = s.two_s * (rl + span * i / (rc.sites + 1.0));
            os << i << "," << mean_at(i) << "," << deficit << "," << ref << "\n";
        }
    } else {
        os << "{\n  \"schema\": \"harmonic.profile/1\",\n  \"sites\": [\n";
        for (int i = 1; i <= rc.sites; ++i) {
            const double ref = s.two_s * (rl + span * i / (rc.sites + 1.0));
            os << "    {\"site\": " << i << ", \"mean\": " << jnum(mean_at(i))
               << ", \"deficit\": " << jnum(deficit) << ", \"linear_reference\": " << jnum(ref)
               << "}" << (i < rc.sites ? "," : "") << "\n";
        }
        os << "  ]\n}\n";
    }
    return 0;
}

int cmd_simulate(const RunConfig& rc) {
    const auto [s, p] = check_config(rc);
    StatsAccumulator total;
    for (int r = 0; r < rc.replicas; ++r) {
        const std::uint64_t seed = rc.seed + 1000003ULL * static_cast<std::uint64_t>(r);
        total.merge(gillespie_run(s, p, rc.sites, rc.t_max, seed));
    }

    std::map<Config, unsigned long long> sampler;
    std::string report;
    if (rc.sites <= 3) {
        Rng rng(rc.seed ^ 0x6a09e667f3bcc908ULL);
        const unsigned long long draws = std::min<unsigned long long>(total.snapshots, 300000);
        for (unsigned long long i = 0; i < draws; ++i) sampler[sample_config(s, p, rc.sites, rng)] += 1;
        ReportOptions ropt;
        ropt.exact_cap = std::max(rc.cap, 20);
        report = empirical_vs_exact_report(s, p, total, draws ? &sampler : nullptr, ropt);
    }

    const std::vector<double> mean = total.site_means();
    const std::vector<double> se = total.site_errors();
    Sink sink(rc.out);
    std::ostream& os = sink.get();
    os << std::setprecision(12);
    if (rc.format == "csv") {
        os << "# harmonic.simulate/1\n";
        os << "# seed=" << rc.seed << " replicas=" << rc.replicas << " t_max=" << rc.t_max
           << " events=" << total.events << " elapsed=" << total.elapsed << "\n";
        os << "site,mean,se\n";
        for (int i = 0; i < rc.sites; ++i)
            os << (i + 1) << "," << mean[i] << "," << se[i] << "\n";
        if (!report.empty()) {
            os << "# report\n";
            std::istringstream lines(report);
            std::string line;
            while (std::getline(lines, line)) os << "# " << line << "\n";
        }
    } else {
        os << "{\n  \"schema\": \"harmonic.simulate/1\",\n";
        os << "  \"seed\": " << rc.seed << ", \"replicas\": " << rc.replicas
           << ", \"t_max\": " << jnum(rc.t_max) << ",\n";
        os << "  \"events\": " << total.events << ", \"elapsed\": " << jnum(total.elapsed)
           << ", \"snapshots\": " << total.snapshots << ",\n";
        os << "  \"sites\": [\n";
        for (int i = 0; i < rc.sites; ++i)
            os << "    {\"site\": " << (i + 1) << ", \"mean\": " << jnum(mean[i])
               << ", \"se\": " << jnum(se[i]) << "}" << (i + 1 < rc.sites ? "," : "") << "\n";
        os << "  ],\n  \"report\": " << (report.empty() ? "null" : report) << "\n}\n";
    }
    return (!report.empty() && !report_passed(report)) ? 1 : 0;
}

int cmd_cross_check(const RunConfig& rc) {
    const auto [s, p] = check_config(rc);
    if (p.delta == 0)
        throw std::invalid_argument("cross-check: reservoir activities must differ");
    Verifier v;

    for (const Config& c : enumerate_configs_total(rc.sites, std::min(rc.cap, 4))) {
        const Rat a = nu_component(s, p, c);
        const bool ok = a == nu_integral_reduce(s, p, c) && a == contract_steady(s, p, c);
        v.entry("triple_equality", kv({{"sites", rc.sites}, {"total", config_total(c)}}), ok);
    }

    // the auxiliary contraction truncates a delta-power series at the window
    // edge, so the window must outrun the requested tolerance
    const int b_max = std::max(rc.b_max, s.two_s * (rc.sites + 1) + 24);
    for (const Config& c : enumerate_configs_total(rc.sites, std::min(rc.cap, 4))) {
        const double exact = mu_component(s, p, c, rc.tol / 100);
        bool ok = true;
        try {
            const double mpa = contract_steady_x(s, p, c, b_max, rc.series_order);
            ok = std::fabs(mpa - exact) <= rc.tol;
            if (rc.sites <= 4) {
                QuadratureConfig qc;
                qc.points = 12;
                qc.levels = 6;
                qc.target_tol = rc.tol / 10;
                ok = ok && std::fabs(mu_quadrature(s, p, c, qc) - exact) <= rc.tol;
            }
        } catch (const truncation_error&) {
            ok = false;
        }
        v.entry("mu_three_ways", kv({{"sites", rc.sites}, {"total", config_total(c)}}), ok);
    }

    if (to_double(p.rho_r) < 1.0 && std::fabs(to_double(p.delta)) < 1.0) {
        for (int m = 0; m <= 2; ++m)
            for (int mp = 0; mp <= 2; ++mp) {
                bool ok = true;
                try {
                    ok = full_mpa_residuals(s, p, m, mp, rc.b_max, rc.tol) < rc.tol;
                } catch (const truncation_error&) {
                    ok = false;
                }
                v.entry("full_mpa_residuals", kv({{"m", m}, {"mp", mp}, {"b_max", rc.b_max}}),
                        ok);
            }
    }
    return v.finish(rc, "harmonic.crosscheck/1");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"open harmonic process: exact steady states, MPA checks, simulation"};
    app.require_subcommand(1);

    RunConfig rc_verify;
    rc_verify.two_s = 3;
    rc_verify.sites = 3;
    rc_verify.cap = 4;
    RunConfig rc_steady;
    rc_steady.cap = 8;
    RunConfig rc_profile;
    rc_profile.cap = 20;
    RunConfig rc_simulate;
    rc_simulate.cap = 12;
    RunConfig rc_cross;

    CLI::App* cv = app.add_subcommand("verify", "exact identity and stationarity suite");
    add_common(cv, rc_verify);
    cv->add_flag("--corrupt-rate", rc_verify.corrupt_rate)->group("");  // test hook
    CLI::App* cs = app.add_subcommand("steady", "emit nu and mu tables with normalization");
    add_common(cs, rc_steady);
    CLI::App* cp = app.add_subcommand("profile", "per-site mean occupations");
    add_common(cp, rc_profile);
    CLI::App* cm = app.add_subcommand("simulate", "Gillespie run with comparison report");
    add_common(cm, rc_simulate);
    CLI::App* cc = app.add_subcommand("cross-check", "compare independent representations");
    add_common(cc, rc_cross);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cv->parsed()) return cmd_verify(rc_verify);
        if (cs->parsed()) return cmd_steady(rc_steady);
        if (cp->parsed()) return cmd_profile(rc_profile);
        if (cm->parsed()) return cmd_simulate(rc_simulate);
        if (cc->parsed()) return cmd_cross_check(rc_cross);
    } catch (const truncation_error& e) {
        std::cerr << "accuracy failure: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
