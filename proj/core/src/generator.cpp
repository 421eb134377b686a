#include "harmonic/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace harmonic {

TruncatedBasis::TruncatedBasis(int sites_, int cap_) : sites(sites_), cap(cap_) {
    if (sites < 1) throw std::invalid_argument("TruncatedBasis: sites must be >= 1");
    if (cap < 0) throw std::invalid_argument("TruncatedBasis: cap must be >= 0");
    std::size_t n = 1;
    for (int i = 0; i < sites; ++i) {
        n *= static_cast<std::size_t>(cap) + 1;
        if (n > (std::size_t{1} << 27))
            throw std::invalid_argument("TruncatedBasis: (cap+1)^sites exceeds 2^27 states");
    }
}

std::size_t TruncatedBasis::size() const {
    std::size_t n = 1;
    for (int i = 0; i < sites; ++i) n *= static_cast<std::size_t>(cap) + 1;
    return n;
}

std::size_t TruncatedBasis::index(const Config& m) const {
    if (static_cast<int>(m.size()) != sites)
        throw std::invalid_argument("TruncatedBasis::index: wrong number of sites");
    std::size_t idx = 0;
    for (int i = 0; i < sites; ++i) {
        if (m[i] < 0 || m[i] > cap)
            throw std::out_of_range("TruncatedBasis::index: entry outside box");
        idx = idx * (cap + 1) + static_cast<std::size_t>(m[i]);
    }
    return idx;
}

Config TruncatedBasis::config_at(std::size_t idx) const {
    Config m(sites, 0);
    for (int i = sites - 1; i >= 0; --i) {
        m[i] = static_cast<int>(idx % (cap + 1));
        idx /= (cap + 1);
    }
    return m;
}

std::vector<std::pair<std::pair<int, int>, Rat>> bulk_density_action(SpinLabel s, int m, int mp) {
    if (m < 0 || mp < 0) throw std::invalid_argument("bulk_density_action: occupations >= 0");
    std::vector<std::pair<std::pair<int, int>, Rat>> out;
    out.push_back({{m, mp}, h_weight(s, m) + h_weight(s, mp)});
    for (int k = 1; k <= m; ++k) out.push_back({{m - k, mp + k}, -phi_rate(s, m, k)});
    for (int k = 1; k <= mp; ++k) out.push_back({{m + k, mp - k}, -phi_rate(s, mp, k)});
    return out;
}

namespace {

template <class T>
void sort_columns(SparseGenerator<T>& g) {
    for (std::size_t c = 0; c < g.cols.size(); ++c) {
        auto& col = g.cols[c];
        std::stable_sort(col.begin(), col.end(), [c](const auto& a, const auto& b) {
            // diagonal first, then ascending row
            bool ad = a.first == c, bd = b.first == c;
            if (ad != bd) return ad;
            return a.first < b.first;
        });
        // merge duplicate rows (a bond can revisit the same target)
        std::size_t w = 0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (w > 0 && col[w - 1].first == col[r].first)
                col[w - 1].second += col[r].second;
            else
                col[w++] = col[r];
        }
        col.resize(w);
    }
}

}  // namespace

SparseGenerator<double> build_stochastic_generator(SpinLabel s, const BoundaryParams& p,
                                                   const TruncatedBasis& basis,
                                                   int insertion_cutoff) {
    if (insertion_cutoff < basis.cap)
        throw std::invalid_argument(
            "build_stochastic_generator: insertion_cutoff must be >= cap so every in-window "
            "injection is represented");
    SparseGenerator<double> g(GeneratorKind::stochastic, basis, insertion_cutoff);
    const int last = basis.sites - 1;
    const double ins_l = total_insertion_rate(to_double(p.beta_l));
    const double ins_r = total_insertion_rate(to_double(p.beta_r));

    for (std::size_t c = 0; c < basis.size(); ++c) {
        Config n = basis.config_at(c);
        double diag = to_double(h_weight(s, n[0])) + to_double(h_weight(s, n[last])) + ins_l + ins_r;
        for (int i = 0; i + 1 < basis.sites; ++i)
            diag += to_double(h_weight(s, n[i])) + to_double(h_weight(s, n[i + 1]));
        g.add(c, c, diag);

        // bulk packet moves
        for (int i = 0; i + 1 < basis.sites; ++i) {
            for (int k = 1; k <= n[i]; ++k) {
                if (n[i + 1] + k > basis.cap) continue;  // escapes the window
                Config t = n;
                t[i] -= k;
                t[i + 1] += k;
                g.add(basis.index(t), c, -to_double(phi_rate(s, n[i], k)));
            }
            for (int k = 1; k <= n[i + 1]; ++k) {
                if (n[i] + k > basis.cap) continue;
                Config t = n;
                t[i + 1] -= k;
                t[i] += k;
                g.add(basis.index(t), c, -to_double(phi_rate(s, n[i + 1], k)));
            }
        }
        // boundary extraction and injection at both ends
        for (int end = 0; end < 2; ++end) {
            const int site = end == 0 ? 0 : last;
            const Rat& beta = end == 0 ? p.beta_l : p.beta_r;
            for (int k = 1; k <= n[site]; ++k) {
                Config t = n;
                t[site] -= k;
                g.add(basis.index(t), c, -to_double(phi_rate(s, n[site], k)));
            }
            const int kmax = std::min(insertion_cutoff, basis.cap - n[site]);
            for (int k = 1; k <= kmax; ++k) {
                Config t = n;
                t[site] += k;
                g.add(basis.index(t), c, -to_double(insertion_weight(beta, k)));
            }
        }
        // for sites == 1 both passes act on site 0: the single site touches
        // both reservoirs
    }
    sort_columns(g);
    return g;
}

SparseGenerator<Rat> build_transformed_generator(SpinLabel s, const BoundaryParams& p,
                                                 const TruncatedBasis& basis) {
    SparseGenerator<Rat> g(GeneratorKind::transformed, basis, basis.cap);
    const int last = basis.sites - 1;
    for (std::size_t c = 0; c < basis.size(); ++c) {
        Config n = basis.config_at(c);
        Rat diag = h_weight(s, n[0]) + h_weight(s, n[last]);
        for (int i = 0; i + 1 < basis.sites; ++i) diag += h_weight(s, n[i]) + h_weight(s, n[i + 1]);
        g.add(c, c, diag);

        for (int i = 0; i + 1 < basis.sites; ++i) {
            for (int k = 1; k <= n[i]; ++k) {
                if (n[i + 1] + k > basis.cap) continue;
                Config t = n;
                t[i] -= k;
                t[i + 1] += k;
                g.add(basis.index(t), c, -phi_rate(s, n[i], k));
            }
            for (int k = 1; k <= n[i + 1]; ++k) {
                if (n[i] + k > basis.cap) continue;
                Config t = n;
                t[i + 1] -= k;
                t[i] += k;
                g.add(basis.index(t), c, -phi_rate(s, n[i + 1], k));
            }
        }
        // transformed left boundary: pure injection with delta^k/k weights
        for (int k = 1; k <= basis.cap - n[0]; ++k) {
            Config t = n;
            t[0] += k;
            g.add(basis.index(t), c, -pow_rat(p.delta, k) / k);
        }
    }
    sort_columns(g);
    return g;
}

std::map<Config, Rat> stationarity_residual_exact(SpinLabel s, const BoundaryParams& p, int sites,
                                                  int total_cap, const NuFn& nu_fn) {
    std::map<Config, Rat> out;
    for (const Config& m : enumerate_configs_total(sites, total_cap)) {
        const int last = sites - 1;
        Rat diag = h_weight(s, m[0]) + h_weight(s, m[last]);
        for (int i = 0; i + 1 < sites; ++i) diag += h_weight(s, m[i]) + h_weight(s, m[i + 1]);
        Rat r = diag * nu_fn(m);

        // bulk inflow: a packet of k that left site i (or i+1) lands on m
        for (int i = 0; i + 1 < sites; ++i) {
            for (int k = 1; k <= m[i + 1]; ++k) {
                Config src = m;
                src[i] += k;
                src[i + 1] -= k;
                r -= phi_rate(s, src[i], k) * nu_fn(src);
            }
            for (int k = 1; k <= m[i]; ++k) {
                Config src = m;
                src[i] -= k;
                src[i + 1] += k;
                r -= phi_rate(s, src[i + 1], k) * nu_fn(src);
            }
        }
        // transformed-boundary inflow: injections from strictly smaller piles
        for (int k = 1; k <= m[0]; ++k) {
            Config src = m;
            src[0] -= k;
            r -= (pow_rat(p.delta, k) / k) * nu_fn(src);
        }
        out.emplace(m, std::move(r));
    }
    return out;
}

std::map<Config, Rat> stationarity_residual_exact(SpinLabel s, const BoundaryParams& p, int sites,
                                                  int total_cap) {
    return stationarity_residual_exact(
        s, p, sites, total_cap, [&](const Config& m) { return nu_component(s, p, m); });
}

double stationarity_residual_numeric(const SteadyVector<double>& mu,
                                     const SparseGenerator<double>& gen, int margin) {
    if (gen.kind != GeneratorKind::stochastic)
        throw std::invalid_argument("stationarity_residual_numeric: needs the physical generator");
    if (mu.sites != gen.basis.sites || mu.cap != gen.basis.cap)
        throw std::invalid_argument("stationarity_residual_numeric: box mismatch");
    if (margin < 0 || 2 * margin > gen.basis.cap)
        throw std::invalid_argument("stationarity_residual_numeric: bad margin");

    std::vector<double> y = gen.apply(mu.values);
    const int interior_cap = gen.basis.cap - margin;
    double worst = 0, scale = 0;
    for (std::size_t c = 0; c < y.size(); ++c) {
        Config m = gen.basis.config_at(c);
        bool interior = true;
        for (int v : m) interior = interior && v <= interior_cap;
        if (!interior) continue;
        worst = std::max(worst, std::abs(y[c]));
        scale = std::max(scale, std::abs(gen.diagonal(c)));
    }
    if (scale == 0) return 0;
    return worst / scale;
}

template <class T>
std::vector<std::vector<double>> SparseGenerator<T>::to_dense_double() const {
    std::vector<std::vector<double>> d(basis.size(), std::vector<double>(basis.size(), 0.0));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (const auto& [r, v] : cols[c]) {
            if constexpr (std::is_same_v<T, Rat>)
                d[r][c] += to_double(v);
            else
                d[r][c] += v;
        }
    return d;
}

namespace {

std::string coord_text(const Rat& v) { return format_rat(v); }
std::string coord_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

template <class T>
void SparseGenerator<T>::write_coordinate(std::ostream& os) const {
    os << "# rows " << basis.size() << " cols " << basis.size() << "\n";
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (const auto& [r, v] : cols[c]) os << r << " " << c << " " << coord_text(v) << "\n";
}

template struct SparseGenerator<Rat>;
template struct SparseGenerator<double>;

void write_residual_json(std::ostream& os, const std::map<Config, Rat>& residuals) {
    Rat max_abs(0);
    for (const auto& [m, r] : residuals) {
        Rat a = r < 0 ? -r : r;
        if (a > max_abs) max_abs = a;
    }
    os << "{\"schema\":\"harmonic.residual/1\",\"max_abs\":\"" << format_rat(max_abs)
       << "\",\"entries\":[";
    bool first = true;
    for (const auto& [m, r] : residuals) {
        if (!first) os << ",";
        first = false;
        os << "{\"config\":[";
        for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
        os << "],\"residual\":\"" << format_rat(r) << "\"}";
    }
    os << "]}";
}

}  // namespace harmonic
