#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "harmonic/mixture.hpp"
#include "harmonic/simulate.hpp"

#include <cmath>
#include <map>

using namespace harmonic;

namespace {

const BoundaryParams kDriven(Rat(2, 5), Rat(1, 5));

double outflow_of_site(const EventTable& t, int site) {
    double acc = 0;
    for (const Event& e : t.events)
        if (e.site == site && e.kind != EventKind::InsertLeft && e.kind != EventKind::InsertRight)
            acc += e.rate;
    return acc;
}

bool close_vectors(const std::vector<double>& a, const std::vector<double>& b, double rel) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1.0});
        if (std::abs(a[i] - b[i]) > rel * scale) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("enumerate_rates on the empty configuration") {
    SpinLabel s(1);
    EventTable t = enumerate_rates(s, kDriven, {0, 0});
    REQUIRE(t.events.size() == 2);
    double ins_l = total_insertion_rate(0.4);
    double ins_r = total_insertion_rate(0.2);
    CHECK(t.events[0].kind == EventKind::InsertLeft);
    CHECK(t.events[0].rate == doctest::Approx(ins_l).epsilon(1e-14));
    CHECK(t.events[1].kind == EventKind::InsertRight);
    CHECK(t.events[1].rate == doctest::Approx(ins_r).epsilon(1e-14));
    CHECK(t.total_rate == doctest::Approx(ins_l + ins_r).epsilon(1e-14));
}

TEST_CASE("enumerate_rates lists every unit move of a small configuration") {
    SpinLabel s(1);
    EventTable t = enumerate_rates(s, kDriven, {1, 0});
    bool saw_bulk_right = false, saw_extract_left = false;
    for (const Event& e : t.events) {
        if (e.kind == EventKind::BulkRight && e.site == 0 && e.size == 1)
            saw_bulk_right = e.rate == 1.0;
        if (e.kind == EventKind::ExtractLeft && e.site == 0 && e.size == 1)
            saw_extract_left = e.rate == 1.0;
    }
    CHECK(saw_bulk_right);
    CHECK(saw_extract_left);
    CHECK(t.events.size() == 4);  // two moves plus two insertion aggregates

    CHECK_THROWS_AS(enumerate_rates(s, kDriven, {}), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_rates(s, kDriven, {-1}), std::invalid_argument);
}

TEST_CASE("per-site outflow is twice the escape weight") {
    std::mt19937_64 rng(2468);
    for (int trial = 0; trial < 40; ++trial) {
        SpinLabel s(1 + static_cast<int>(rng() % 3));
        int sites = 1 + static_cast<int>(rng() % 4);
        Config c(sites);
        for (int& v : c) v = static_cast<int>(rng() % 7);
        EventTable t = enumerate_rates(s, kDriven, c);

        double expected_total = total_insertion_rate(0.4) + total_insertion_rate(0.2);
        for (int i = 0; i < sites; ++i) {
            double h = to_double(h_weight(s, c[i]));
            CHECK(outflow_of_site(t, i) == doctest::Approx(2 * h).epsilon(1e-12));
            expected_total += 2 * h;
        }
        CHECK(t.total_rate == doctest::Approx(expected_total).epsilon(1e-12));
    }
}

TEST_CASE("logarithmic size distribution") {
    double l = -std::log(0.6);
    CHECK(log_size_pmf(0.4, 1) == doctest::Approx(0.4 / l).epsilon(1e-14));
    double mass = 0;
    for (int k = 1; k <= 300; ++k) mass += log_size_pmf(0.4, k);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(log_size_pmf(0.0, 1), std::domain_error);
    CHECK_THROWS_AS(log_size_pmf(1.0, 1), std::domain_error);
}

TEST_CASE("insertion sizes drawn during a run follow the logarithmic law") {
    SpinLabel s(1);
    StatsAccumulator st = gillespie_run(s, kDriven, 2, 30000, 7, 1000);
    unsigned long long n = 0;
    for (const auto& [k, c] : st.insert_sizes_l) n += c;
    REQUIRE(n > 5000);
    for (int k = 1; k <= 4; ++k) {
        double p = log_size_pmf(0.4, k);
        auto it = st.insert_sizes_l.find(k);
        double freq = it == st.insert_sizes_l.end() ? 0.0
                                                    : static_cast<double>(it->second) / n;
        double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
        CHECK(std::abs(freq - p) <= 4 * se);
    }
}

TEST_CASE("fixed seed reproduces the trajectory bit for bit") {
    SpinLabel s(1);
    StatsAccumulator a = gillespie_run(s, kDriven, 2, 2000, 42, 100);
    StatsAccumulator b = gillespie_run(s, kDriven, 2, 2000, 42, 100);
    CHECK(a.events == b.events);
    CHECK(a.elapsed == b.elapsed);
    CHECK(a.occ_time == b.occ_time);
    CHECK(a.occ_sq_time == b.occ_sq_time);
    CHECK(a.config_time == b.config_time);
    CHECK(a.snapshot_counts == b.snapshot_counts);
    CHECK(a.insert_sizes_l == b.insert_sizes_l);
    CHECK(a.batch_time == b.batch_time);
    CHECK(a.batch_occ_time == b.batch_occ_time);

    StatsAccumulator c = gillespie_run(s, kDriven, 2, 2000, 43, 100);
    CHECK(a.config_time != c.config_time);
}

TEST_CASE("equilibrium run reproduces the product-law mean") {
    SpinLabel s(1);
    BoundaryParams eq(Rat(3, 10), Rat(3, 10));
    StatsAccumulator st = gillespie_run(s, eq, 2, 60000, 11, 2000);
    REQUIRE(st.events > 100000);
    auto means = st.site_means();
    auto errs = st.site_errors();
    for (int i = 0; i < 2; ++i) {
        CHECK(errs[i] > 0);
        CHECK(std::abs(means[i] - 3.0 / 7.0) <= 3.5 * errs[i]);
    }
}

TEST_CASE("driven run matches the boxed occupation profile") {
    SpinLabel s(1);
    StatsAccumulator st = gillespie_run(s, kDriven, 2, 60000, 12, 2000);
    auto means = st.site_means();
    auto errs = st.site_errors();
    for (int i = 0; i < 2; ++i) {
        OccupationEstimate ref = expected_occupation(s, kDriven, 2, i + 1, 20);
        CHECK_FALSE(ref.warning);
        CHECK(std::abs(means[i] - ref.mean) <= 3.5 * errs[i]);
    }
}

TEST_CASE("replica merge is associative") {
    SpinLabel s(1);
    StatsAccumulator a = gillespie_run(s, kDriven, 2, 3000, 1, 100);
    StatsAccumulator b = gillespie_run(s, kDriven, 2, 3000, 2, 100);
    StatsAccumulator c = gillespie_run(s, kDriven, 2, 3000, 3, 100);

    StatsAccumulator left = a;
    left.merge(b);
    left.merge(c);
    StatsAccumulator right_tail = b;
    right_tail.merge(c);
    StatsAccumulator right = a;
    right.merge(right_tail);

    CHECK(left.events == right.events);
    CHECK(left.snapshots == right.snapshots);
    CHECK(left.elapsed == doctest::Approx(right.elapsed).epsilon(1e-13));
    CHECK(close_vectors(left.occ_time, right.occ_time, 1e-12));
    CHECK(left.snapshot_counts == right.snapshot_counts);
    CHECK(left.batch_time == right.batch_time);  // concatenation keeps order

    StatsAccumulator wrong = gillespie_run(s, kDriven, 3, 1000, 4, 100);
    CHECK_THROWS_AS(left.merge(wrong), std::invalid_argument);
}

TEST_CASE("run guards") {
    SpinLabel s(1);
    CHECK_THROWS_AS(gillespie_run(s, kDriven, 0, 100, 1, 10), std::invalid_argument);
    CHECK_THROWS_AS(gillespie_run(s, kDriven, 2, 100, 1, 100), std::invalid_argument);
    CHECK_THROWS_AS(gillespie_run(s, kDriven, 2, 100, 1, -5), std::invalid_argument);
    GillespieOptions bad;
    bad.batches = 0;
    CHECK_THROWS_AS(gillespie_run(s, kDriven, 2, 100, 1, 10, bad), std::invalid_argument);
}

TEST_CASE("report validates a faithful run and flags a mismatched reference") {
    SpinLabel s(1);
    StatsAccumulator st = gillespie_run(s, kDriven, 2, 60000, 5, 2000);

    Rng sampler_rng(0xABCDEF);
    std::map<Config, unsigned long long> sampler;
    for (int d = 0; d < 200000; ++d) ++sampler[sample_config(s, kDriven, 2, sampler_rng)];

    std::string good = empirical_vs_exact_report(s, kDriven, st, &sampler);
    CHECK(good.find("\"schema\": \"harmonic.sim-report/1\"") != std::string::npos);
    CHECK(good.find("\"verdict\"") != std::string::npos);
    CHECK(report_passed(good));

    // the same trajectory cannot match the reservoir-swapped steady state
    std::string bad = empirical_vs_exact_report(s, mirrored(kDriven), st, nullptr);
    CHECK_FALSE(report_passed(bad));
}
