#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qqlax/opalgebra.hpp"
#include "qqlax/report.hpp"

namespace qqlax {

// Classical fractional qq-character: vartheta(x - p_w) * B_w, with B_w the truncated
// product prod_{l>=1} 1 / (1 - x_w / x_{w-l}).
cplx chi_classical(int omega, cplx x, const PhaseSpacePoint& pt);

// The alternating sum for arbitrary characters chi(w, x); fugacities and mass from `pt`.
Matrix d_from_characters(cplx x, cplx z, const PhaseSpacePoint& pt, const std::function<cplx(int, cplx)>& chi);

enum class DForm { RhsSum, Product };

// Classical D(x, z). RhsSum is the alternating sum over shifted characters (window grown until
// the tail is below 1e-16 of the running sum). Product assembles the x-independent pieces
// (D0 + x D1 in 4d, D1 - e^{-beta x} Dinf in 5d) from their bilateral-product expressions and
// is not available for the 6d kernel.
Matrix build_d_classical(cplx x, cplx z, const PhaseSpacePoint& pt, DForm form = DForm::RhsSum);

struct DComponents {
    Matrix d0;        // 4d: D(0, z)
    Matrix d1;        // bilateral product, x-independent
    Matrix d1_diff;   // 4d: D(1, z) - D(0, z); 5d: large-x limit of the sum
    Matrix dinf;      // 5d: minus the e^{-beta x} coefficient
};

DComponents extract_components(const PhaseSpacePoint& pt, cplx z);

// The products entering D1 at spectral parameter z, each truncated once its factors are
// within 1e-18 of the identity.
struct BilateralFactors {
    std::vector<Matrix> left;    // 1 - Q^n C_z^{-1}, n = 1..
    std::vector<Matrix> right;   // 1 - (Q C_z^{-1})^n C_z^{n+1}, n = 0..
    std::vector<Matrix> right_core;  // (Q C_z^{-1})^n C_z^{n+1}
    std::vector<Matrix> right_qc;    // (Q C_z^{-1})^n
    std::vector<Matrix> right_cpow;  // C_z^{n+1}
    std::vector<Matrix> left_tail;   // left_tail[k] = prod_{n>k} (1 - Q^n C_z^{-1}), larger n to the left
    std::vector<Matrix> right_head;  // right_head[k] = prod_{n<k} (1 - ...), increasing to the right
    std::vector<Matrix> right_tail;  // right_tail[k] = prod_{n>k} (1 - ...)
    Matrix qhat;
    Matrix c_inv;
};

BilateralFactors bilateral_factors(const PhaseSpacePoint& pt, cplx z);

// Diagonal gauge U: prod_{n>=1}(1 - Q^n C_1^{-1}) e = U e. `nested` evaluates the alternating
// sum over strictly increasing strings instead of the product.
std::vector<cplx> u_diagonal(const PhaseSpacePoint& pt, bool nested = false);

// e^t prod_{n>=1}(1 - Q^n C_1^{-1})^{-1}
std::vector<cplx> v_row(const PhaseSpacePoint& pt);

// prod_{n>=1}(1 - Q^n C_1^{-1}) e^{beta P} e
std::vector<cplx> u_rs(const PhaseSpacePoint& pt);

// Canonical momenta of the Krichever form: p_i + m (N - i - sum_{k != i} E1(x_i / x_k)).
std::vector<cplx> cm_momenta(const PhaseSpacePoint& pt);

// Row weights c_i of the explicit RS matrix, L_ij = c_i theta'(1) theta(z r) / (theta(z) theta(r)) with
// r = e^{-beta m} x_i / x_j:
// c_i = theta(e^{beta m}) / prod(1 - q^n)^3 * e^{beta (p_i + m (N - 1 - i))} prod_{k != i} theta(r_ik) / theta(x_i / x_k).
std::vector<cplx> rs_weights(const PhaseSpacePoint& pt);

// Residue of the ungauged RS matrix at z = 1 is (1 - e^{beta m}) a (x) v_row with
// a_i = c_i / ((1 - e^{beta m}) v_i).
std::vector<cplx> rs_residue_left(const PhaseSpacePoint& pt);

enum class LaxSource { FromD, ProductFormula, Explicit };
enum class RsSource { FromDOrientA, FromDOrientB, ProductFormula, Explicit };

// Elliptic Calogero-Moser Lax matrix in the standard gauge, V Ltilde V^{-1} with V = diag(v_row).
// The Explicit source is the Krichever form in the momenta cm_momenta().
Matrix lax_cm(const PhaseSpacePoint& pt, cplx z, LaxSource source);
// Ungauged: -D0 D1^{-1} (FromD) or its bilateral-product expansion.
Matrix lax_cm_tilde(const PhaseSpacePoint& pt, cplx z, LaxSource source);

// Elliptic Ruijsenaars-Schneider Lax matrix in the same gauge.
// Orientation A is D1 Dinf^{-1}, orientation B is Dinf D1^{-1} (before gauging), both with Dinf
// read off the alternating sum. ProductFormula is orientation B with
// Dinf(z) = e^{beta P} S D1(e^{-beta m N} z) S^{-1}, S = diag(e^{-beta m w}).
Matrix lax_rs(const PhaseSpacePoint& pt, cplx z, RsSource source);
Matrix lax_rs_tilde(const PhaseSpacePoint& pt, cplx z, RsSource source);

// Which FromD orientation reproduces the explicit theta-function form at a few probe points.
struct RsOrientation {
    RsSource matching = RsSource::FromDOrientB;
    double error_a = 0.0;
    double error_b = 0.0;
};
RsOrientation resolve_rs_orientation(const PhaseSpacePoint& pt);

// Average of (z - 1) f(z) over `points` nodes on the circle |z - 1| = radius.
template <class F>
Matrix residue_at_one(F&& f, int dim, double radius = 1e-3, int points = 32);

// Fourier modes f_n(x) of det D(x, z) on |z| = radius compared with
// (-1)^n q^{(n^2+n)/2} f_0(x + n m) for |n| <= n_range.
CheckResult spectral_fourier_check(const PhaseSpacePoint& pt, cplx x, double radius, int n_range,
                                   double tol = 1e-6);

// theta(1/z) det(x - L(z)) / prod(1 - q^n) against det D(x, z) (4d), or
// theta(1/z) det(1 - e^{-beta x} L_RS(z)) / prod(1 - q^n) (5d).
CheckResult spectral_closure(const PhaseSpacePoint& pt, cplx x, cplx z, double tol = 1e-7);

// 6d: D(x + log(p6d)/beta, e^{beta m N} z) = -p6d^{-1} S^{-1} e^{-beta(x - P)} D(x, z) S,
// S = diag(e^{beta m w}).
CheckResult check_sixd_transformation(const PhaseSpacePoint& pt, cplx x, cplx z, double tol = 1e-8);

// X D(x + m, q z) = -D(x, z) X C_{q z}, and det D(x + m, q z) / det D(x, z) = (-1)^N det C_{q z}.
CheckResult check_d_quasiperiodicity(const PhaseSpacePoint& pt, cplx x, cplx z, double tol = 1e-9);

// Dell generating function O(u) = sum over n in Z^N, truncated to |n_i| <= window.
cplx dell_generating(const PhaseSpacePoint& pt, cplx u, int window = 12);

// N = 2 trigonometric data: D(x) = chi_0 chi_1 - (x_1/x_0) chi_0(x - m) chi_1(x + m) with the
// q -> 0 characters, the double-sum form of that function and its two-term 5d reduction.
cplx trig_pair_function(cplx x, const PhaseSpacePoint& pt);
// The double sum with the kernel sign as printed: the mass enters as e^{beta m (n_1 - n_0)}.
cplx trig_pair_series(cplx x, const PhaseSpacePoint& pt, int window = 12);
cplx trig_pair_5d(cplx x, const PhaseSpacePoint& pt);
// The q -> 0 limit of diag(1, -1) D(x, z) diag(1, -1) for N = 2, written entrywise.
Matrix trig_matrix_n2(cplx x, cplx z, const PhaseSpacePoint& pt);
// The N = 2 matrix with theta-series entries (independent of the general alternating sum).
Matrix d_matrix_n2(cplx x, cplx z, const PhaseSpacePoint& pt, int window = 40);

struct TrigPairReport {
    CheckResult determinant;     // det D_trig(x, z) = D(x) - z^{-1} D(x - m)
    CheckResult matrix;          // general sum at q -> 0 vs the entrywise trig matrix
    CheckResult series_vs_chars; // double sum vs D(x) with m -> -m
    CheckResult five_d;          // two-term 5d form vs the double sum at p6d = 0
    CheckResult dell;            // double sum vs O(u) with shifted momenta
};
TrigPairReport trig_pair_checks(const PhaseSpacePoint& pt, cplx x, cplx z, double tol = 1e-9);

struct FlowReport {
    CheckResult drift;        // eigenvalues of L(z1) along the flow
    double drift_half = 0.0;  // same with dt / 2
    double step_ratio = 0.0;  // |endpoint(dt) - endpoint(dt/2)| / |endpoint(dt/2) - endpoint(dt/4)|
    int steps = 0;
};

// RK4 integration of the flow of H = tr L(z0)^2 / 2 in the canonical pair (log x_w, cm_momenta),
// exact in the momentum direction and five-point differences in log x; reports the eigenvalue
// drift of L(z1).
FlowReport flow_conservation(const PhaseSpacePoint& pt, cplx z0, cplx z1, double t_end, double dt,
                             double tol = 1e-6);

// ---------------------------------------------------------------- implementation

template <class F>
Matrix residue_at_one(F&& f, int dim, double radius, int points) {
    Matrix acc = Matrix::Zero(dim, dim);
    for (int k = 0; k < points; ++k) {
        const cplx dz = std::polar(radius, 2.0 * 3.14159265358979323846 * (k + 0.5) / points);
        acc += dz * f(cplx(1.0) + dz);
    }
    return acc / double(points);
}

}  // namespace qqlax
