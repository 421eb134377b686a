#pragma once

#include "harmonic/steady_closed.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

namespace harmonic {

// Full occupation box [0,cap]^sites, mixed-radix lexicographic with site 1
// the most significant digit. Total states (cap+1)^sites.
struct TruncatedBasis {
    int sites;
    int cap;
    TruncatedBasis(int sites_, int cap_);
    std::size_t size() const;
    std::size_t index(const Config& m) const;
    Config config_at(std::size_t idx) const;
};

enum class GeneratorKind {
    stochastic,   // physical process: extraction plus reservoir injection
    transformed,  // similarity-transformed generator: injection carries delta weights
};

// Column-compressed sparse matrix over a TruncatedBasis. cols[c] lists
// (row, coefficient) with the diagonal first, then ascending rows.
template <class T>
struct SparseGenerator {
    GeneratorKind kind;
    TruncatedBasis basis;
    int insertion_cutoff;  // largest injected packet represented per column
    std::vector<std::vector<std::pair<std::uint32_t, T>>> cols;

    SparseGenerator(GeneratorKind k, TruncatedBasis b, int cutoff)
        : kind(k), basis(std::move(b)), insertion_cutoff(cutoff), cols(basis.size()) {}

    void add(std::size_t row, std::size_t col, const T& v) {
        if (v == T{}) return;
        cols[col].emplace_back(static_cast<std::uint32_t>(row), v);
    }

    T column_sum(std::size_t c) const {
        T acc{};
        for (const auto& [r, v] : cols[c]) acc += v;
        return acc;
    }

    // y = A x over the box
    std::vector<T> apply(const std::vector<T>& x) const {
        std::vector<T> y(basis.size(), T{});
        for (std::size_t c = 0; c < cols.size(); ++c)
            for (const auto& [r, v] : cols[c]) y[r] += v * x[c];
        return y;
    }

    T diagonal(std::size_t c) const {
        for (const auto& [r, v] : cols[c])
            if (r == c) return v;
        return T{};
    }

    std::vector<std::vector<double>> to_dense_double() const;
    void write_coordinate(std::ostream& os) const;
};

// Column entries of the two-site jump generator on |m, mp>: the diagonal
// h(m) + h(mp), then every packet move with its rate, total conserved.
std::vector<std::pair<std::pair<int, int>, Rat>> bulk_density_action(SpinLabel s, int m, int mp);

// Physical-process generator on the box. Float entries; the two reservoir
// columns carry the aggregate injection rate -log(1-beta) on the diagonal.
// Requires insertion_cutoff >= cap so no in-window injection is dropped.
SparseGenerator<double> build_stochastic_generator(SpinLabel s, const BoundaryParams& p,
                                                   const TruncatedBasis& basis,
                                                   int insertion_cutoff);

// Transformed generator, exact entries. Left boundary injects with weight
// delta^k/k, right boundary is diagonal.
SparseGenerator<Rat> build_transformed_generator(SpinLabel s, const BoundaryParams& p,
                                                 const TruncatedBasis& basis);

using NuFn = std::function<Rat(const Config&)>;

// Row sums of (transformed generator) * nu over every configuration with
// total occupation <= total_cap. No window enters: bulk moves conserve the
// total and the transformed left boundary only feeds rows from below.
// Expected identically zero when nu_fn is the closed form.
std::map<Config, Rat> stationarity_residual_exact(SpinLabel s, const BoundaryParams& p, int sites,
                                                  int total_cap, const NuFn& nu_fn);
std::map<Config, Rat> stationarity_residual_exact(SpinLabel s, const BoundaryParams& p, int sites,
                                                  int total_cap);

// max |(H mu)(m)| / max interior |diagonal| over interior configurations
// (every entry <= cap - margin), so boundary-of-window flux is excluded.
double stationarity_residual_numeric(const SteadyVector<double>& mu,
                                     const SparseGenerator<double>& gen, int margin);

void write_residual_json(std::ostream& os, const std::map<Config, Rat>& residuals);

}  // namespace harmonic
