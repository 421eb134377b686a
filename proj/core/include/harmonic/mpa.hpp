#pragma once

#include "harmonic/steady_closed.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace harmonic {

// Single-band operator on the auxiliary oscillator space:
//   O |b>> = coeffs[b] |b + shift>>  for 0 <= b < coeffs.size().
// Every operator appearing in the exact algebra (Y, Ybar, the creation
// operator, and any product of them) has this form, which turns operator
// identities into per-index scalar identities on a finite window.
struct ShiftOp {
    int shift = 0;
    std::vector<Rat> coeffs;

    int window() const { return static_cast<int>(coeffs.size()); }
};

// outer * inner, inner applied first; windows trim to the largest range on
// which the product is fully determined.
ShiftOp compose(const ShiftOp& outer, const ShiftOp& inner);

// Linear combination helpers; both sides must carry the same shift.
ShiftOp shift_add(const ShiftOp& a, const ShiftOp& b);
ShiftOp shift_sub(const ShiftOp& a, const ShiftOp& b);
ShiftOp shift_scale(const Rat& c, const ShiftOp& a);

// Creation operator to the k-th power: |b>> -> |b+k>>, unit coefficients.
ShiftOp abar_pow(int k, int window);

// Number operator: diagonal, coeffs(b) = b.
ShiftOp num_op(int window);

// Site operator Y(m): shift 2s+m, coeffs(b) = kappa(m) G(m+b+1)/G(2s+m+b+1).
ShiftOp y_op(SpinLabel s, int m, int b_max);

// Companion operator Ybar(m) = h_s(m) Y(m) - sum_{p<m} abar^(m-p)/(m-p) Y(p);
// same shift as Y(m). Ybar(0) is the zero operator.
ShiftOp ybar_op(SpinLabel s, int m, int b_max);

// Scalar coefficients of the two families, exact.
Rat y_coeff(SpinLabel s, int m, int b);
Rat ybar_coeff(SpinLabel s, int m, int b);

// Steady weight by auxiliary contraction: z_norm * <<V| Y(m_1)...Y(m_N) |W>>,
// walked as a single index starting from 2s-1. Agrees with nu_component
// exactly. Throws degenerate_equilibrium when the reservoir densities match.
Rat contract_steady(SpinLabel s, const BoundaryParams& p, const Config& m_vec);

// Max-abs coefficient of the bulk algebra defect
//   (h(m)+h(m')) Y(m)Y(m') - sum_k Y(m+k)Y(m'-k) phi(m+k,k)
//                          - sum_k Y(m-k)Y(m'+k) phi(m'+k,k)
//   - [ Y(m)Ybar(m') - Ybar(m)Y(m') ]
// probed at 0 <= b <= b_max. Identically zero.
Rat bulk_relation_residual(SpinLabel s, int m, int m_prime, int b_max);

// Left reservoir defect contracted with <<V|, probed at 0 <= b <= b_max.
// The injection weights delta^k/k recombine with <<V| abar^k = delta^k <<V|,
// so the result is zero for every b. Exact in the reservoir parameters.
Rat left_boundary_residual(SpinLabel s, const BoundaryParams& p, int m, int b_max = 16);

// Right reservoir defect on |W>> = |2s-1>>, component m:
//   h_s(m) y_m(2s-1) + ybar_m(2s-1).
// Zero; equivalent to the harmonic identity below.
Rat right_boundary_residual(SpinLabel s, int m);

// 2 h_s(m) - sum_{k=1}^m phi_s(m,k) G(4s+m)G(2s+m-k) / (G(4s+m-k)G(2s+m)).
Rat harmonic_identity_check(SpinLabel s, int m);

// A + B - 2 h_s(m) with the auxiliary number operator frozen at n_aux:
//   A = G(n+4s+m+m'+1)/G(n+2s+m+m'+1)
//       * sum_k kappa(m-k)/(k kappa(m)) G(n+2s+m-k+m'+1)/G(n+4s+m-k+m'+1)
//   B = G(n+2s+m'+1)/G(n+m'+1)
//       * sum_k kappa(m-k)kappa(m'+k)/(kappa(m)kappa(m'))
//             * G(n+m'+k+1)/G(n+2s+m'+k+1) phi_s(m'+k,k).
// Certifies the same cancellation the digamma route proves, in exact
// arithmetic.
Rat ab_identity_check(SpinLabel s, int m, int m_prime, int n_aux);

// Terminating 4F3(1,1,-n,a; 2,b,1+a-b-n; 1) against its digamma closed form
//   (b-1)(a-b-n)/((n+1)(a-1)) [psi(n+b)+psi(1+a-b)-psi(b-1)-psi(a-b-n)].
// tol is both the comparison tolerance and the required margin from digamma
// poles and vanishing denominators; violating the margin is a domain error.
bool hypg_identity_check(int n, double a, double b, double tol);

// Dense float operator on the window [0, dim) squared, row-major.
// tail bounds the worst entrywise truncation error of the construction.
struct DenseAuxOp {
    int dim = 0;
    double rho_r = 0;
    int series_order = -1;  // -1 marks the rotation path
    double tail = 0;
    std::vector<double> a;

    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }
};

// X(m) for the untransformed process, by the creation-operator power series
//   X(m) = abar^(2s) G(N+1)/G(N+2s+1)
//          * sum_{k=m}^{order} (-1)^(k-m) C(k,m) kappa(k) (abar + rho_R)^k.
// Entries live on the band a >= 2s + b. The recorded tail is the certified
// bound on the dropped k-tail (infinite when the cutoff is too early for the
// geometric regime). Requires 0 <= rho_R < 1. The Rat overload admits the
// rho_R = 0 edge that BoundaryParams cannot represent.
DenseAuxOp x_op(SpinLabel s, int m, const Rat& rho_r, int b_max, int series_order);
DenseAuxOp x_op(SpinLabel s, int m, const BoundaryParams& p, int b_max, int series_order);

// Same operator through the physical-index rotation X(m) = sum_k R(m,k) Y(k),
// one certified kernel evaluation per band offset. Oracle for x_op.
DenseAuxOp x_op_rotation(SpinLabel s, int m, const Rat& rho_r, int b_max);
DenseAuxOp x_op_rotation(SpinLabel s, int m, const BoundaryParams& p, int b_max);

// Rotation of the companion family, Xbar(m) = sum_k R(m,k) Ybar(k).
DenseAuxOp xbar_op_rotation(SpinLabel s, int m, const Rat& rho_r, int b_max);
DenseAuxOp xbar_op_rotation(SpinLabel s, int m, const BoundaryParams& p, int b_max);

// Max-entry residual of the three relations of the untransformed algebra
// (bulk with X/Xbar, left with <<V|, right with |W>>), probed on the window
// [0, b_max]. Internal windows and the two infinite series (packet inflow,
// <<V| contraction) are truncated with certified tails kept below tol/10;
// if that cannot be achieved the call refuses with truncation_error.
// The bulk pair is (m, m_prime); the boundary relations use component m on
// the left and m_prime on the right.
double full_mpa_residuals(SpinLabel s, const BoundaryParams& p, int m, int m_prime, int b_max,
                          double tol);

// z-normalized <<V| X(m_1)...X(m_N) |W>> on a finite window, series-path
// operators of the given order. Matches mu_component up to window and series
// tails. Equal reservoir densities are handled by the analytic limit, which
// collapses to the product of negative-binomial weights.
double contract_steady_x(SpinLabel s, const BoundaryParams& p, const Config& m_vec, int b_max,
                         int series_order);

// Golden table of Y / Ybar coefficients, exact rationals:
// two_s,m,b,y_coeff,ybar_coeff
void write_y_golden_csv(std::ostream& os, int two_s_max, int m_max, int b_max);

// Exact residual sweep over the algebra relations, reported as JSON.
std::string mpa_residual_report_json(SpinLabel s, const BoundaryParams& p, int m_max, int b_max);

}  // namespace harmonic
