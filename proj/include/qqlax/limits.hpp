#pragma once

#include <functional>
#include <vector>

#include "qqlax/opalgebra.hpp"
#include "qqlax/report.hpp"

namespace qqlax {

// Explicit Y functions: Y_w(x) = prod_r vartheta(x - roots[w mod N][r]).
struct YModel {
    std::vector<std::vector<cplx>> roots;
    EllipticParams ep;

    int n() const { return int(roots.size()); }
    cplx y(int omega, cplx x) const;
    cplx total(cplx x) const;  // prod_w Y_w(x)
};

// Classical qq-character built from Y. Column j of a diagram telescopes to a function of its
// length alone, so the sum over diagrams is a transfer recursion over non-increasing column
// lengths (at most `max_len` boxes per column, `max_len` columns).
cplx chi_from_model(int omega, cplx x, const YModel& model, const std::vector<cplx>& fugacities, cplx m,
                    int max_len = 64);

using CharacterFn = std::function<cplx(int, cplx)>;

struct TrigData {
    Matrix d;                  // lim_{z -> inf} D(x, z) at nome = 0
    std::vector<cplx> minors;  // Q_0 = 1, Q_1, ..., Q_N (leading principal minors)
    double spread = 0.0;       // z-independence residual
};

// The z^0 Fourier mode of D(x, z) on |z| = R for each R in `radii`. The spread is the larger of
// the relative spread between radii and the size of the positive-power modes scaled by R^k; it
// must stay below `tol` or NotZIndependent is thrown. Needs pt.nome = 0.
TrigData d_trig(cplx x, const PhaseSpacePoint& pt, const CharacterFn& chi,
                const std::vector<double>& radii = {1e2, 1e3, 1e4}, double tol = 1e-8);

struct TrigReport {
    CheckResult z_independence;
    CheckResult y_recovery;     // Q_w / Q_{w-1} = Y_{w mod N}
    CheckResult determinant;    // det D(x, z) = Y(x) - Y(x - m) / z
};

// Free-Y model in the q -> 0 limit (pt.nome is forced to 0).
TrigReport trig_model_checks(const PhaseSpacePoint& pt, const YModel& model, cplx x, cplx z, double tol = 1e-9);

// Phase-space characters at q -> 0: Q_N(x) against det(x - L) (4d) or det(1 - e^{-beta x} L) (5d),
// L the z -> infinity limit of the Lax matrix.
CheckResult trig_spectrum_check(const PhaseSpacePoint& pt, cplx x, double tol = 1e-9);

struct BetheResidual {
    cplx substituted;    // q_w Q_{w+1}(x+m) Q_w(x-m) Q_{w-1}(x) / (Q_w(x+m) Q_{w-1}(x-m) Q_{w+1}(x))
    cplx limit_shape;    // q_w Y_{w+1}(x+m) Y_w(x-m) / (Y_{w+1}(x) Y_w(x)), Y_w = Q_w / Q_{w-1}; NaN at zeros of Q_w
    cplx as_displayed;   // Q_{w-1}(x - m) replaced by Q_w(x - m) in the denominator
};

// Q(k, x) for k = 0..N; twists[w] multiplies the residual for 1 <= w <= N - 1.
// PoleError when a denominator is within 1e-300.
BetheResidual bethe_residual(const std::function<cplx(int, cplx)>& q_fn, int omega, cplx x,
                             const std::vector<cplx>& twists, cplx m);

// L_w = sum_n q_w^{-n} Y_w(x + (n-1)m) / Y_{w+1}(x + n m) (E_nn + E_{n,n+1}), n in [-M, M], colors
// 1..N taken mod N. SingularWindow if a diagonal entry vanishes.
struct SpinLaxWindow {
    int window = 0;
    std::vector<Matrix> ops;  // ops[w - 1] = L_w
};
SpinLaxWindow spin_lax(cplx x, int window, const PhaseSpacePoint& pt, const YModel& model);

// det over the window of (1 - z T_N), T_N^{-1} = L_1 ... L_N, by LU.
cplx spin_chain_det(cplx x, cplx z, int window, const PhaseSpacePoint& pt, const YModel& model);

struct DualityReport {
    CheckResult structure;     // upper bidiagonal, det = product of the diagonal
    CheckResult product;       // det(1 - z T_N) = prod_n (1 - z q^n Y(x + n m) / Y(x + (n-1) m))
    CheckResult ratio;         // det D ratio at the large window
    CheckResult decay;         // err(small) / err(large) >= 1e3
    double error_small = 0.0;
    double error_large = 0.0;
    double literal_small = 0.0;  // ratio without the edge factor
    double literal_large = 0.0;
};

// det D(x + m, z) / det D(x, z) against the window ratio of det(1 - z T_N), times the ratio of
// z^{-n} q^{(n^2 - n)/2} Y(x - n m) at n = M + 1 between x + m and x. That edge factor tends
// to 1 in 4d (only like 1/M) and to e^{-beta m N} in 5d, so it is kept rather than dropped.
DualityReport duality_ratio_check(const PhaseSpacePoint& pt, const YModel& model, cplx x, cplx z,
                                  int small_window = 10, int large_window = 20, double tol = 1e-7);

}  // namespace qqlax
