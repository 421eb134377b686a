#include "harmonic/mpa.hpp"

#include "harmonic/detail/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace harmonic {

namespace {

Rat rabs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

double maxabs_entry(const DenseAuxOp& op) {
    double m = 0;
    for (double v : op.a) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace

ShiftOp compose(const ShiftOp& outer, const ShiftOp& inner) {
    ShiftOp r;
    r.shift = outer.shift + inner.shift;
    const int w = std::min(inner.window(), outer.window() - inner.shift);
    if (w <= 0) throw std::invalid_argument("compose: outer window cannot absorb the inner shift");
    r.coeffs.resize(static_cast<std::size_t>(w));
    for (int b = 0; b < w; ++b) r.coeffs[b] = inner.coeffs[b] * outer.coeffs[b + inner.shift];
    return r;
}

ShiftOp shift_add(const ShiftOp& a, const ShiftOp& b) {
    if (a.shift != b.shift) throw std::invalid_argument("shift_add: mismatched shifts");
    ShiftOp r;
    r.shift = a.shift;
    const int w = std::min(a.window(), b.window());
    r.coeffs.resize(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) r.coeffs[i] = a.coeffs[i] + b.coeffs[i];
    return r;
}

ShiftOp shift_sub(const ShiftOp& a, const ShiftOp& b) {
    if (a.shift != b.shift) throw std::invalid_argument("shift_sub: mismatched shifts");
    ShiftOp r;
    r.shift = a.shift;
    const int w = std::min(a.window(), b.window());
    r.coeffs.resize(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) r.coeffs[i] = a.coeffs[i] - b.coeffs[i];
    return r;
}

ShiftOp shift_scale(const Rat& c, const ShiftOp& a) {
    ShiftOp r = a;
    for (auto& x : r.coeffs) x *= c;
    return r;
}

ShiftOp abar_pow(int k, int window) {
    if (k < 0 || window < 1) throw std::invalid_argument("abar_pow: bad arguments");
    ShiftOp r;
    r.shift = k;
    r.coeffs.assign(static_cast<std::size_t>(window), Rat(1));
    return r;
}

ShiftOp num_op(int window) {
    if (window < 1) throw std::invalid_argument("num_op: bad window");
    ShiftOp r;
    r.shift = 0;
    r.coeffs.resize(static_cast<std::size_t>(window));
    for (int b = 0; b < window; ++b) r.coeffs[b] = Rat(b);
    return r;
}

Rat y_coeff(SpinLabel s, int m, int b) {
    if (m < 0 || b < 0) throw std::domain_error("y_coeff: negative index");
    return kappa(s, m) * gamma_ratio(m + b + 1, s.two_s + m + b + 1);
}

Rat ybar_coeff(SpinLabel s, int m, int b) {
    if (m < 0 || b < 0) throw std::domain_error("ybar_coeff: negative index");
    Rat r = h_weight(s, m) * y_coeff(s, m, b);
    for (int p = 0; p < m; ++p) r -= y_coeff(s, p, b) / Rat(m - p);
    return r;
}

ShiftOp y_op(SpinLabel s, int m, int b_max) {
    if (m < 0 || b_max < 0) throw std::domain_error("y_op: negative index");
    ShiftOp r;
    r.shift = s.two_s + m;
    r.coeffs.resize(static_cast<std::size_t>(b_max) + 1);
    for (int b = 0; b <= b_max; ++b) r.coeffs[b] = y_coeff(s, m, b);
    return r;
}

ShiftOp ybar_op(SpinLabel s, int m, int b_max) {
    if (m < 0 || b_max < 0) throw std::domain_error("ybar_op: negative index");
    if (m == 0) {
        ShiftOp z;
        z.shift = s.two_s;
        z.coeffs.assign(static_cast<std::size_t>(b_max) + 1, Rat(0));
        return z;
    }
    ShiftOp r = shift_scale(h_weight(s, m), y_op(s, m, b_max));
    for (int p = 0; p < m; ++p) {
        // abar^(m-p) Y(p) carries the same total shift 2s+m
        ShiftOp t = compose(abar_pow(m - p, b_max + 1 + s.two_s + p), y_op(s, p, b_max));
        r = shift_sub(r, shift_scale(Rat(1, m - p), t));
    }
    return r;
}

Rat contract_steady(SpinLabel s, const BoundaryParams& p, const Config& m_vec) {
    if (m_vec.empty()) throw std::invalid_argument("contract_steady: empty configuration");
    for (int v : m_vec)
        if (v < 0) throw std::domain_error("contract_steady: negative occupation");
    const int n = static_cast<int>(m_vec.size());
    const Rat zinv = z_norm_inverse(s, p, n);  // refuses at delta = 0
    int b = s.two_s - 1;
    Rat acc(1);
    for (int i = n - 1; i >= 0; --i) {
        acc *= y_coeff(s, m_vec[i], b);
        b += s.two_s + m_vec[i];
    }
    return acc * pow_rat(p.delta, b) * zinv;
}

Rat bulk_relation_residual(SpinLabel s, int m, int m_prime, int b_max) {
    if (m < 0 || m_prime < 0 || b_max < 0)
        throw std::domain_error("bulk_relation_residual: negative index");
    const int w = b_max + 2 * s.two_s + m + m_prime + 2;
    auto yy = [&](int q1, int q2) { return compose(y_op(s, q1, w), y_op(s, q2, w)); };

    ShiftOp lhs = shift_scale(h_weight(s, m) + h_weight(s, m_prime), yy(m, m_prime));
    for (int k = 1; k <= m_prime; ++k)
        lhs = shift_sub(lhs, shift_scale(phi_rate(s, m + k, k), yy(m + k, m_prime - k)));
    for (int k = 1; k <= m; ++k)
        lhs = shift_sub(lhs, shift_scale(phi_rate(s, m_prime + k, k), yy(m - k, m_prime + k)));

    ShiftOp rhs = shift_sub(compose(y_op(s, m, w), ybar_op(s, m_prime, w)),
                            compose(ybar_op(s, m, w), y_op(s, m_prime, w)));
    ShiftOp d = shift_sub(lhs, rhs);
    if (d.window() <= b_max)
        throw std::invalid_argument("bulk_relation_residual: window overflow");
    Rat worst(0);
    for (int b = 0; b <= b_max; ++b) worst = std::max(worst, rabs(d.coeffs[b]));
    return worst;
}

Rat left_boundary_residual(SpinLabel s, const BoundaryParams& p, int m, int b_max) {
    if (m < 0 || b_max < 0) throw std::domain_error("left_boundary_residual: negative index");
    const Rat h = h_weight(s, m);
    Rat worst(0);
    for (int b = 0; b <= b_max; ++b) {
        // every term lands on <<V| delta^(b+2s+m); the injection weight
        // delta^k/k meets delta^(b+2s+m-k) from the shorter shift of Y(m-k)
        Rat r = (h * y_coeff(s, m, b) - ybar_coeff(s, m, b)) * pow_rat(p.delta, b + s.two_s + m);
        for (int k = 1; k <= m; ++k)
            r -= pow_rat(p.delta, k) / Rat(k) * y_coeff(s, m - k, b) *
                 pow_rat(p.delta, b + s.two_s + m - k);
        worst = std::max(worst, rabs(r));
    }
    return worst;
}

Rat right_boundary_residual(SpinLabel s, int m) {
    if (m < 0) throw std::domain_error("right_boundary_residual: negative index");
    const int b = s.two_s - 1;
    return h_weight(s, m) * y_coeff(s, m, b) + ybar_coeff(s, m, b);
}

Rat harmonic_identity_check(SpinLabel s, int m) {
    if (m < 1) throw std::domain_error("harmonic_identity_check: m must be positive");
    const int two_s = s.two_s;
    Rat rhs(0);
    for (int k = 1; k <= m; ++k)
        rhs += phi_rate(s, m, k) * gamma_ratio(2 * two_s + m, 2 * two_s + m - k) *
               gamma_ratio(two_s + m - k, two_s + m);
    return 2 * h_weight(s, m) - rhs;
}

Rat ab_identity_check(SpinLabel s, int m, int m_prime, int n_aux) {
    if (m < 1) throw std::domain_error("ab_identity_check: m must be positive");
    if (m_prime < 0 || n_aux < 0) throw std::domain_error("ab_identity_check: negative index");
    const long long ts = s.two_s;
    const long long n = n_aux, mp = m_prime;

    Rat a_sum(0);
    for (long long k = 1; k <= m; ++k)
        a_sum += kappa(s, m - k) / (Rat(k) * kappa(s, m)) *
                 gamma_ratio(n + ts + m - k + mp + 1, n + 2 * ts + m - k + mp + 1);
    const Rat A = gamma_ratio(n + 2 * ts + m + mp + 1, n + ts + m + mp + 1) * a_sum;

    Rat b_sum(0);
    for (long long k = 1; k <= m; ++k)
        b_sum += kappa(s, m - k) * kappa(s, mp + k) / (kappa(s, m) * kappa(s, mp)) *
                 gamma_ratio(n + mp + k + 1, n + ts + mp + k + 1) * phi_rate(s, mp + k, k);
    const Rat B = gamma_ratio(n + ts + mp + 1, n + mp + 1) * b_sum;

    return A + B - 2 * h_weight(s, m);
}

bool hypg_identity_check(int n, double a, double b, double tol) {
    if (n < 0) throw std::domain_error("hypg_identity_check: n must be nonnegative");
    if (!(tol > 0)) throw std::domain_error("hypg_identity_check: tol must be positive");
    auto pole_margin = [](double x) {
        if (x >= 0.5) return std::numeric_limits<double>::infinity();
        return std::fabs(x - std::round(x));
    };
    const double psi_args[4] = {n + b, 1.0 + a - b, b - 1.0, a - b - n};
    for (double x : psi_args)
        if (pole_margin(x) < tol)
            throw std::domain_error("hypg_identity_check: digamma argument too close to a pole");
    if (std::fabs(a - 1.0) < tol)
        throw std::domain_error("hypg_identity_check: closed form degenerate at a = 1");
    for (int j = 0; j < n; ++j) {
        if (std::fabs(b + j) < tol || std::fabs(1.0 + a - b - n + j) < tol)
            throw std::domain_error("hypg_identity_check: vanishing series denominator");
    }

    double lhs = 1.0, term = 1.0;
    for (int j = 0; j < n; ++j) {
        term *= (static_cast<double>(-n + j) * (a + j) * (j + 1)) /
                ((j + 2.0) * (b + j) * (1.0 + a - b - n + j));
        lhs += term;
    }
    using detail::digamma;
    const double rhs = (b - 1.0) * (a - b - n) / ((n + 1.0) * (a - 1.0)) *
                       (digamma(n + b) + digamma(1.0 + a - b) - digamma(b - 1.0) -
                        digamma(a - b - n));
    return std::fabs(lhs - rhs) <= tol;
}

namespace {

DenseAuxOp dense_zero(int dim, double rho, int order) {
    DenseAuxOp op;
    op.dim = dim;
    op.rho_r = rho;
    op.series_order = order;
    op.a.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    return op;
}

// dst += c * src, tracking the entrywise error bound
void dense_acc(DenseAuxOp& dst, double c, const DenseAuxOp& src) {
    if (dst.dim != src.dim) throw std::invalid_argument("dense_acc: window mismatch");
    for (std::size_t i = 0; i < dst.a.size(); ++i) dst.a[i] += c * src.a[i];
    dst.tail += std::fabs(c) * src.tail;
}

DenseAuxOp dense_mul(const DenseAuxOp& A, const DenseAuxOp& B) {
    if (A.dim != B.dim) throw std::invalid_argument("dense_mul: window mismatch");
    const int n = A.dim;
    DenseAuxOp C = dense_zero(n, A.rho_r, -1);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k) {
            const double arv = A.at(r, k);
            if (arv == 0.0) continue;
            for (int c = 0; c < n; ++c) C.at(r, c) += arv * B.at(k, c);
        }
    const double ma = maxabs_entry(A), mb = maxabs_entry(B);
    C.tail = n * (ma * B.tail + A.tail * mb + A.tail * B.tail);
    return C;
}

void check_rho(const Rat& rho) {
    if (rho < 0 || rho >= 1)
        throw truncation_error("x operator: construction needs 0 <= rho_R < 1");
}

}  // namespace

DenseAuxOp x_op(SpinLabel s, int m, const Rat& rho_r, int b_max, int series_order) {
    if (m < 0 || b_max < 0) throw std::domain_error("x_op: negative index");
    if (series_order < m) throw std::domain_error("x_op: series order below the leading term");
    check_rho(rho_r);
    const int two_s = s.two_s;
    const int dim = b_max + 1;
    DenseAuxOp X = dense_zero(dim, to_double(rho_r), series_order);
    const double rho = X.rho_r;

    std::vector<double> kap(static_cast<std::size_t>(series_order) + 2);
    for (int k = 0; k <= series_order + 1; ++k) kap[k] = to_double(kappa(s, k));

    for (int col = 0; col < dim; ++col) {
        for (int row = two_s + col; row < dim; ++row) {
            const int j = row - two_s - col;
            const double g = to_double(gamma_ratio(row - two_s + 1, row + 1));
            double sum = 0.0;
            for (int k = std::max(m, j); k <= series_order; ++k) {
                const double t = to_double(binomial_rat(k, m)) * kap[k] *
                                 to_double(binomial_rat(k, j)) * std::pow(rho, k - j);
                sum += ((k - m) % 2 == 0) ? t : -t;
            }
            X.at(row, col) = g * sum;

            // first dropped term; the magnitude ratio decreases toward rho,
            // so below 1 the remainder is geometric
            const int K = std::max(series_order + 1, std::max(m, j));
            const double kap_k = K < static_cast<int>(kap.size()) ? kap[K] : to_double(kappa(s, K));
            const double t1 = to_double(binomial_rat(K, m)) * kap_k *
                              to_double(binomial_rat(K, j)) * std::pow(rho, K - j);
            const double r = rho * ((K + 1.0) / (K + 1.0 - m)) * ((two_s + K) / (K + 1.0)) *
                             ((K + 1.0) / (K + 1.0 - j));
            const double entry_tail =
                (r < 1.0) ? g * t1 / (1.0 - r) : std::numeric_limits<double>::infinity();
            X.tail = std::max(X.tail, entry_tail);
        }
    }
    return X;
}

DenseAuxOp x_op(SpinLabel s, int m, const BoundaryParams& p, int b_max, int series_order) {
    return x_op(s, m, p.rho_r, b_max, series_order);
}

namespace {

DenseAuxOp rotated_family(SpinLabel s, int m, const Rat& rho_r, int b_max, bool companion) {
    if (m < 0 || b_max < 0) throw std::domain_error("x_op_rotation: negative index");
    check_rho(rho_r);
    const int two_s = s.two_s;
    const int dim = b_max + 1;
    DenseAuxOp X = dense_zero(dim, to_double(rho_r), -1);
    const Rat ktol = pow_rat(Rat(1, 10), 24);
    for (int k = 0; k + two_s < dim; ++k) {
        if (companion && k == 0) continue;  // Ybar(0) = 0
        const KernelTerm kt = rotation_kernel(s, rho_r, m, k, ktol, false);
        for (int col = 0; col + two_s + k < dim; ++col) {
            const Rat c = companion ? ybar_coeff(s, k, col) : y_coeff(s, k, col);
            X.at(col + two_s + k, col) = to_double(kt.value * c);
            X.tail = std::max(X.tail, to_double(kt.tail * rabs(c)));
        }
    }
    return X;
}

}  // namespace

DenseAuxOp x_op_rotation(SpinLabel s, int m, const Rat& rho_r, int b_max) {
    return rotated_family(s, m, rho_r, b_max, false);
}

DenseAuxOp x_op_rotation(SpinLabel s, int m, const BoundaryParams& p, int b_max) {
    return rotated_family(s, m, p.rho_r, b_max, false);
}

DenseAuxOp xbar_op_rotation(SpinLabel s, int m, const Rat& rho_r, int b_max) {
    return rotated_family(s, m, rho_r, b_max, true);
}

DenseAuxOp xbar_op_rotation(SpinLabel s, int m, const BoundaryParams& p, int b_max) {
    return rotated_family(s, m, p.rho_r, b_max, true);
}

namespace {

struct OpCache {
    SpinLabel s;
    Rat rho;
    int b_max;
    std::map<int, DenseAuxOp> ops;
    const DenseAuxOp& get(int q) {
        auto it = ops.find(q);
        if (it == ops.end()) it = ops.emplace(q, x_op_rotation(s, q, rho, b_max)).first;
        return it->second;
    }
};

// combo = (h(p) + sum_k beta^k/k) X(p) +- Xbar(p)
//         - sum_j phi(j+p, j) X(j+p) - sum_{k<=p} beta^k/k X(p-k)
// The packet-inflow series is cut once three consecutive term weights decay
// geometrically and the certified remainder fits the budget.
DenseAuxOp boundary_combo(SpinLabel s, OpCache& cache, int p_idx, double beta, int xbar_sign,
                          const DenseAuxOp& xbar, double term_budget, double& tail_out) {
    const DenseAuxOp& xp = cache.get(p_idx);
    DenseAuxOp out = dense_zero(xp.dim, xp.rho_r, -1);
    dense_acc(out, to_double(h_weight(s, p_idx)) + total_insertion_rate(beta), xp);
    dense_acc(out, xbar_sign, xbar);
    for (int k = 1; k <= p_idx; ++k)
        dense_acc(out, -std::pow(beta, k) / k, cache.get(p_idx - k));

    std::vector<double> hist;
    tail_out = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 400; ++j) {
        const DenseAuxOp& xj = cache.get(j + p_idx);
        const double w = to_double(phi_rate(s, j + p_idx, j));
        dense_acc(out, -w, xj);
        hist.push_back(w * maxabs_entry(xj));
        const std::size_t h = hist.size();
        if (h >= 4) {
            double rmax = 0;
            for (std::size_t i = h - 3; i < h; ++i) {
                if (hist[i - 1] == 0) { rmax = 0; break; }
                rmax = std::max(rmax, hist[i] / hist[i - 1]);
            }
            if (rmax < 0.85 && hist.back() <= term_budget) {
                tail_out = rmax == 0 ? 0.0 : hist.back() * rmax / (1.0 - rmax);
                break;
            }
        }
    }
    if (!(tail_out < std::numeric_limits<double>::infinity()))
        throw truncation_error("full_mpa_residuals: packet-inflow series did not settle");
    return out;
}

}  // namespace

double full_mpa_residuals(SpinLabel s, const BoundaryParams& p, int m, int m_prime, int b_max,
                          double tol) {
    if (m < 0 || m_prime < 0) throw std::domain_error("full_mpa_residuals: negative index");
    if (!(tol > 0)) throw std::domain_error("full_mpa_residuals: tol must be positive");
    if (b_max < s.two_s - 1)
        throw std::invalid_argument("full_mpa_residuals: window below the right boundary vector");
    check_rho(p.rho_r);
    const double delta = to_double(p.delta);
    if (std::fabs(delta) >= 1)
        throw truncation_error("full_mpa_residuals: <<V| contraction needs |delta| < 1");

    int B = std::max(2 * b_max + 4 * s.two_s + 2 * (m + m_prime) + 8, 48);
    for (;; B += B / 2) {
        if (B > 1024)
            throw truncation_error("full_mpa_residuals: window cap reached before tails settled");
        OpCache cache{s, p.rho_r, B, {}};
        const DenseAuxOp xbar_m = xbar_op_rotation(s, m, p.rho_r, B);
        const DenseAuxOp xbar_mp = xbar_op_rotation(s, m_prime, p.rho_r, B);

        // bulk: finite combination, no series beyond the kernels
        DenseAuxOp bulk = dense_mul(cache.get(m), xbar_mp);
        dense_acc(bulk, -1.0, dense_mul(xbar_m, cache.get(m_prime)));
        {
            DenseAuxOp t = dense_mul(cache.get(m), cache.get(m_prime));
            dense_acc(bulk, -to_double(h_weight(s, m) + h_weight(s, m_prime)), t);
        }
        for (int k = 1; k <= m_prime; ++k) {
            DenseAuxOp t = dense_mul(cache.get(m + k), cache.get(m_prime - k));
            dense_acc(bulk, to_double(phi_rate(s, m + k, k)), t);
        }
        for (int k = 1; k <= m; ++k) {
            DenseAuxOp t = dense_mul(cache.get(m - k), cache.get(m_prime + k));
            dense_acc(bulk, to_double(phi_rate(s, m_prime + k, k)), t);
        }
        double bulk_res = 0;
        for (int r = 0; r <= b_max; ++r)
            for (int c = 0; c <= b_max; ++c) bulk_res = std::max(bulk_res, std::fabs(bulk.at(r, c)));

        const double term_budget = tol * 1e-4;
        double phi_tail_l = 0, phi_tail_r = 0;
        const DenseAuxOp left =
            boundary_combo(s, cache, m, to_double(p.beta_l), -1, xbar_m, term_budget, phi_tail_l);
        const DenseAuxOp right =
            boundary_combo(s, cache, m_prime, to_double(p.beta_r), +1, xbar_mp, term_budget,
                           phi_tail_r);

        // left relation: rows are contracted with <<V|, components delta^a
        double left_res = 0;
        std::vector<double> shell(static_cast<std::size_t>(B) + 1, 0.0);
        for (int c = 0; c <= b_max; ++c) {
            double acc = 0, pw = 1;
            for (int r = 0; r <= B; ++r) {
                acc += pw * left.at(r, c);
                shell[r] = std::max(shell[r], std::fabs(pw * left.at(r, c)));
                pw *= delta;
            }
            left_res = std::max(left_res, std::fabs(acc));
        }
        // certified geometric majorant for the dropped rows
        double v_tail = std::numeric_limits<double>::infinity();
        {
            double rmax = 0;
            bool allzero = true;
            for (int r = B - 4; r <= B; ++r) {
                if (shell[r] != 0) allzero = false;
                if (shell[r - 1] == 0) continue;
                rmax = std::max(rmax, shell[r] / shell[r - 1]);
            }
            if (allzero)
                v_tail = 0;
            else if (rmax < 0.92 && rmax > 0)
                v_tail = shell[B] * rmax / (1.0 - rmax);
        }

        // right relation: probe the single column of |W>>
        double right_res = 0;
        for (int r = 0; r <= b_max; ++r) right_res = std::max(right_res, std::fabs(right.at(r, s.two_s - 1)));

        const double kern = std::max({bulk.tail, left.tail / (1.0 - std::fabs(delta)), right.tail});
        const double cert = kern + phi_tail_l + phi_tail_r + v_tail;
        if (cert <= tol / 10.0) return std::max({bulk_res, left_res, right_res});
    }
}

double contract_steady_x(SpinLabel s, const BoundaryParams& p, const Config& m_vec, int b_max,
                         int series_order) {
    if (m_vec.empty()) throw std::invalid_argument("contract_steady_x: empty configuration");
    const int n = static_cast<int>(m_vec.size());
    const int a_min = s.two_s * (n + 1) - 1;
    if (a_min > b_max)
        throw std::invalid_argument("contract_steady_x: window below the minimal contraction index");
    const int dim = b_max + 1;

    std::map<int, DenseAuxOp> ops;
    for (int v : m_vec) {
        if (v < 0) throw std::domain_error("contract_steady_x: negative occupation");
        if (!ops.count(v))
            ops.emplace(v, series_order < 0 ? x_op_rotation(s, v, p, b_max)
                                            : x_op(s, v, p, b_max, series_order));
    }

    std::vector<double> v(static_cast<std::size_t>(dim), 0.0), w(static_cast<std::size_t>(dim));
    v[s.two_s - 1] = 1.0;
    for (int i = n - 1; i >= 0; --i) {
        const DenseAuxOp& X = ops.at(m_vec[i]);
        std::fill(w.begin(), w.end(), 0.0);
        for (int r = 0; r < dim; ++r) {
            double acc = 0;
            for (int c = 0; c < dim; ++c) acc += X.at(r, c) * v[c];
            w[r] = acc;
        }
        v.swap(w);
    }

    const double gr = to_double(gamma_ratio(s.two_s * (n + 1), s.two_s));
    if (p.delta == 0) return gr * v[a_min];  // negative-binomial limit
    const double d = to_double(p.delta);
    double sum = 0, pw = 1;
    for (int a = a_min; a < dim; ++a) {
        sum += v[a] * pw;
        pw *= d;
    }
    return gr * sum;
}

void write_y_golden_csv(std::ostream& os, int two_s_max, int m_max, int b_max) {
    os << "two_s,m,b,y_coeff,ybar_coeff\n";
    for (int ts = 1; ts <= two_s_max; ++ts) {
        const SpinLabel s(ts);
        for (int m = 0; m <= m_max; ++m)
            for (int b = 0; b <= b_max; ++b)
                os << ts << ',' << m << ',' << b << ',' << format_rat(y_coeff(s, m, b)) << ','
                   << format_rat(ybar_coeff(s, m, b)) << '\n';
    }
}

std::string mpa_residual_report_json(SpinLabel s, const BoundaryParams& p, int m_max, int b_max) {
    Rat bulk(0), left(0), right(0), harm(0), ab(0);
    for (int m = 0; m <= m_max; ++m) {
        left = std::max(left, rabs(left_boundary_residual(s, p, m, b_max)));
        right = std::max(right, rabs(right_boundary_residual(s, m)));
        if (m >= 1) {
            harm = std::max(harm, rabs(harmonic_identity_check(s, m)));
            ab = std::max(ab, rabs(ab_identity_check(s, m, m_max, b_max)));
        }
        for (int mp = 0; mp <= m_max; ++mp)
            bulk = std::max(bulk, rabs(bulk_relation_residual(s, m, mp, b_max)));
    }
    const bool zero = bulk == 0 && left == 0 && right == 0 && harm == 0 && ab == 0;
    std::ostringstream os;
    os << "{\"schema\":\"harmonic.mpa/1\",\"two_s\":" << s.two_s << ",\"m_max\":" << m_max
       << ",\"b_max\":" << b_max << ",\"bulk_max\":\"" << format_rat(bulk) << "\",\"left_max\":\""
       << format_rat(left) << "\",\"right_max\":\"" << format_rat(right)
       << "\",\"harmonic_max\":\"" << format_rat(harm) << "\",\"ab_max\":\"" << format_rat(ab)
       << "\",\"all_zero\":" << (zero ? "true" : "false") << "}";
    return os.str();
}

}  // namespace harmonic
