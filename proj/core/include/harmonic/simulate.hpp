#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "harmonic/rng.hpp"
#include "harmonic/steady_closed.hpp"

namespace harmonic {

enum class EventKind {
    BulkRight,      // packet hops from site to site+1
    BulkLeft,       // packet hops from site to site-1
    ExtractLeft,    // packet leaves site 1 into the left reservoir
    ExtractRight,   // packet leaves site N into the right reservoir
    InsertLeft,     // aggregate: reservoir pushes a packet onto site 1
    InsertRight     // aggregate: reservoir pushes a packet onto site N
};

struct Event {
    EventKind kind;
    int site;       // 0-based
    int size;       // packet size; 0 for insertions (drawn when the event fires)
    double rate;
};

struct EventTable {
    std::vector<Event> events;
    double total_rate = 0;
};

// Every enabled move of one configuration with its rate. Insertion appears as
// one aggregate event per reservoir; all other kinds are listed per size.
EventTable enumerate_rates(SpinLabel s, const BoundaryParams& p, const Config& config);

// Packet-size distribution of an insertion event, P(k) = beta^k / (k L) with
// L = -log(1-beta).
double log_size_pmf(double beta, long long k);

struct GillespieOptions {
    long long track_total_cap = 12;  // configs with total <= cap get time weights
    double snapshot_dt = 1.0;        // state sampled on this time grid after burn-in
    int batches = 64;                // time batches for standard errors
    unsigned long long max_events = 0;  // 0 = no event cap
};

// Time-weighted observations collected after burn-in. merge() combines runs
// (independent replicas or shards); it is associative and order-insensitive
// up to floating-point rounding.
struct StatsAccumulator {
    int sites = 0;
    double elapsed = 0;
    unsigned long long events = 0;
    std::vector<double> occ_time;     // integral of m_i dt
    std::vector<double> occ_sq_time;  // integral of m_i^2 dt
    std::map<Config, double> config_time;
    unsigned long long snapshots = 0;
    std::map<Config, unsigned long long> snapshot_counts;
    std::map<int, unsigned long long> insert_sizes_l;
    std::map<int, unsigned long long> insert_sizes_r;
    std::vector<double> batch_time;
    std::vector<std::vector<double>> batch_occ_time;  // [batch][site]

    std::vector<double> site_means() const;
    std::vector<double> site_errors() const;  // batch-means standard errors
    void merge(const StatsAccumulator& other);
};

// Continuous-time simulation from the empty configuration. Statistics start
// at burn_in; the trajectory is a pure function of the seed.
StatsAccumulator gillespie_run(SpinLabel s, const BoundaryParams& p, int sites, double t_max,
                               std::uint64_t seed, double burn_in,
                               const GillespieOptions& opt = {});

// burn_in defaults to t_max / 10
StatsAccumulator gillespie_run(SpinLabel s, const BoundaryParams& p, int sites, double t_max,
                               std::uint64_t seed);

struct ReportOptions {
    double significance = 1e-3;
    double min_expected = 25;  // smallest expected count for an unpooled cell
    int exact_cap = 20;        // box holding all exact references
    double mu_tol = 1e-10;     // refinement tolerance of that box
};

// JSON comparison of a run against the exact steady state: per-site mean
// z-tests, a chi-square test of sampled configurations, chi-square tests of
// the insertion packet sizes, and (when sampler counts are supplied) a
// two-sample test against direct mixture samples. verdict is "pass" only if
// every adequately powered test clears the significance level; tests without
// enough data are marked underpowered and excluded from the verdict.
std::string empirical_vs_exact_report(SpinLabel s, const BoundaryParams& p,
                                      const StatsAccumulator& stats,
                                      const std::map<Config, unsigned long long>* sampler_counts,
                                      const ReportOptions& opt = {});

bool report_passed(const std::string& report_json);

}  // namespace harmonic
