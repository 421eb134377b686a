#include <benchmark/benchmark.h>

#include "harmonic/mixture.hpp"
#include "harmonic/mpa.hpp"
#include "harmonic/simulate.hpp"
#include "harmonic/steady_closed.hpp"

using namespace harmonic;

namespace {

BoundaryParams params() { return BoundaryParams(Rat(2, 5), Rat(1, 5)); }

void bm_nu_component(benchmark::State& state) {
    const SpinLabel s(2);
    const BoundaryParams p = params();
    const Config c{3, 1, 4, 2};
    for (auto _ : state) benchmark::DoNotOptimize(nu_component(s, p, c));
}
BENCHMARK(bm_nu_component);

void bm_nu_integral_reduce(benchmark::State& state) {
    const SpinLabel s(2);
    const BoundaryParams p = params();
    const Config c{3, 1, 4, 2};
    for (auto _ : state) benchmark::DoNotOptimize(nu_integral_reduce(s, p, c));
}
BENCHMARK(bm_nu_integral_reduce);

void bm_contract_steady(benchmark::State& state) {
    const SpinLabel s(2);
    const BoundaryParams p = params();
    const Config c{3, 1, 4, 2};
    for (auto _ : state) benchmark::DoNotOptimize(contract_steady(s, p, c));
}
BENCHMARK(bm_contract_steady);

void bm_mu_component(benchmark::State& state) {
    const SpinLabel s(1);
    const BoundaryParams p = params();
    const Config c{2, 1, 3};
    for (auto _ : state) benchmark::DoNotOptimize(mu_component(s, p, c, 1e-12));
}
BENCHMARK(bm_mu_component);

void bm_mu_quadrature(benchmark::State& state) {
    const SpinLabel s(1);
    const BoundaryParams p = params();
    const Config c{2, 1};
    QuadratureConfig qc;
    qc.points = 16;
    qc.levels = 4;
    qc.target_tol = 1e-9;
    for (auto _ : state) benchmark::DoNotOptimize(mu_quadrature(s, p, c, qc));
}
BENCHMARK(bm_mu_quadrature);

void bm_rate_table(benchmark::State& state) {
    const SpinLabel s(2);
    const BoundaryParams p = params();
    const Config c{5, 0, 7, 2, 1};
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_rates(s, p, c));
}
BENCHMARK(bm_rate_table);

void bm_gillespie_events(benchmark::State& state) {
    const SpinLabel s(1);
    const BoundaryParams p = params();
    unsigned long long events = 0;
    std::uint64_t seed = 7;
    for (auto _ : state) {
        StatsAccumulator st = gillespie_run(s, p, 3, 2000.0, seed++, 0.0);
        events += st.events;
        benchmark::DoNotOptimize(st.elapsed);
    }
    state.counters["events_per_s"] =
        benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(bm_gillespie_events);

void bm_full_mpa_residuals(benchmark::State& state) {
    const SpinLabel s(1);
    const BoundaryParams p = params();
    for (auto _ : state)
        benchmark::DoNotOptimize(full_mpa_residuals(s, p, 1, 1, 12, 1e-8));
}
BENCHMARK(bm_full_mpa_residuals);

}  // namespace

BENCHMARK_MAIN();
