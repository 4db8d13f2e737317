#pragma once

#include <cstdint>
#include <vector>

#include "qqlax/characters.hpp"
#include "qqlax/factorization.hpp"
#include "qqlax/laxphase.hpp"
#include "qqlax/report.hpp"

namespace qqlax {

// ------------------------------------------------------------ diagonal prefactors

// Matrix with one nonzero entry per row: row i holds the monomial q^deg[i] in column col[i].
struct MonomialMatrix {
    std::vector<int> col;
    std::vector<Multidegree> deg;

    static MonomialMatrix identity(int n);
    static MonomialMatrix cyclic(int n, int power);  // C^power, C = sum_w e_w e_{w+1}^t
    static MonomialMatrix fugacities(int n);         // diag(q_w)
    MonomialMatrix operator*(const MonomialMatrix& o) const;
    bool is_diagonal() const;
};

// D_n as the ordered matrix product (cyclic shifts and fugacity diagonals).
MonomialMatrix dn_product_form(int shift, int n_colors);
// Product form is diagonal and agrees with the closed-form exponents, exactly.
CheckResult dn_check(int shift, int n_colors);
// Numerical D_n at the fugacities of a phase-space point.
Matrix dn_matrix(int shift, const PhaseSpacePoint& pt);

// ------------------------------------------------------------ empty-diagram model

// Generic nonvanishing stand-ins for Q~_w(x0 + j m + k eps2); w is taken mod N.
class QTildeOracle {
public:
    QTildeOracle(int n, std::uint64_t seed) : values_(n, seed) {}

    int n() const { return values_.n(); }
    cplx q(int omega, int j, int k) const { return values_(omega, j, k); }
    // Y_w = Q~_w(x) / Q~_w(x + N eps2)
    cplx y(int omega, int j, int k) const { return q(omega, j, k) / q(omega, j, k + n()); }
    // Y_{24,w} = Q~_w(x) / Q~_w(x + m)
    cplx y24(int omega, int j, int k) const { return q(omega, j, k) / q(omega, j + 1, k); }
    void perturb(int omega, int j, int k, cplx factor) { values_.perturb(omega, j, k, factor); }

private:
    YOracle values_;
};

// prod_c Y_{24,c}(x + s_c eps2) with s_c in 1..N, s_c = c - w mod N (N when c = w).
cplx chi24_empty(int omega, int j, int k, const QTildeOracle& q);

// chi_w(x + eps2) = Y_w(x + m + eps2) / Y_w(x + eps2) chi_{w-1}(x) at every key.
CheckResult chi24_shift_check(const QTildeOracle& q, const std::vector<std::pair<int, int>>& keys, double tol = 1e-11);
// Yhat(x + eps2) chi(x - m) - Yhat(x + eps2 - m) C chi(x - m + eps2) = 0, Yhat = diag(Y_{w+1}).
CheckResult chi24_matrix_check(const QTildeOracle& q, int j, int k, double tol = 1e-10);

// ------------------------------------------------------------ N = 2 first order

// First-order correction to the second component (q_0 = 0):
// Y_1(x - m) / Y_1(x) * chi^{empty}_{24,0}(x + eps2).
cplx chi24_box(int j, int k, const QTildeOracle& q);
// Same product with Q~_1(x + 3 eps2 + m) in the last denominator factor in place of Q~_0.
cplx chi24_box_misprint(int j, int k, const QTildeOracle& q);

struct Sl2Report {
    CheckResult order0;           // both rows of the eigen-relation at q_1^0
    CheckResult box_shift;        // Y_1(x+e) B(x+e) = Y_1(x+e-m) chi_0(x+2e)
    CheckResult box_definition;   // Y_0(x+e+m) Y_1(x-m)/Y_1(x) chi_0(x+e) = Y_0(x+e+m) B(x)
    CheckResult second_row;       // Y_0(x+e+2m) Y_1(x)/Y_1(x+m) chi_1(x) = Y_0(x+2m+e) chi_0(x-e)
    CheckResult order1;           // both rows at q_1^1
};

// The two-component relation through first order in q_1 at x = x0 + j m + k eps2.
// `box_factor` rescales the box term (negative control); `misprint` swaps in chi24_box_misprint.
Sl2Report sl2_eigen_check(const QTildeOracle& q, int j, int k, cplx box_factor = 1.0, bool misprint = false,
                          double tol = 1e-10);

// ------------------------------------------------------------ recursion step

struct FoldedTriple {
    Partition mu;  // 24-plane
    Partition nu;  // 34-plane
    int shift = 0;
    bool operator==(const FoldedTriple&) const = default;
};

bool map_applicable(const FoldedTriple& t);        // mu_1 - n >= nu_1
bool in_map_image(const FoldedTriple& t);          // mu_1 - n < nu_1
// (mu, nu, n) -> (mu without its first row, (mu_1 - n, nu), n + 1). MapNotApplicable outside the domain.
FoldedTriple folded_map(const FoldedTriple& t);
// Inverse on the image. MapNotApplicable outside it.
FoldedTriple folded_map_inverse(const FoldedTriple& t);

// Characters with S*_{12,c} kept as formal symbols: entry c is the coefficient of S*_{12,c}.
using FormalCharacter = std::vector<VirtualCharacter>;

// P3 sum_{w', a=1..N} q2^{a+n} q3^{-1} S*_{12, c+a+w'} S_{24,w'}|_mu
FormalCharacter ch24_part(const Partition& mu, int color, int shift, int n_colors);
// q2 (1 - q2^N) sum_{w'} q3^{-n} S*_{12, w+w'+1} S_{34,w'}|_nu
FormalCharacter ch34_part(const Partition& nu, int omega, int shift, int n_colors);

// Multidegrees of the fugacity weights.
Multidegree fug24_grading(const Partition& mu, int color, int n_colors);  // prod_{(i,j)} q_{c+i-j}

struct RecursionReport {
    CheckResult character;  // exact, q1 = 1
    CheckResult prefactor;  // exact multidegrees, D at row w on both sides
    CheckResult bijection;  // inverse(map(t)) = t and map(t) lands in the image
};

RecursionReport recursion_step_check(const FoldedTriple& t, int omega, int n_colors);
// Every applicable triple with |mu| + |nu| <= max_size, |n| <= max_shift, every w; and the inverse
// direction on image triples of the same size.
RecursionReport recursion_sweep(int n_colors, int max_size, int max_shift);

// ------------------------------------------------------------ singular split

struct SplitReport {
    CheckResult regrouping;  // graded sum = q2^{-w} [S~*S~ - (1-q2^N) mid - (1-q2^{2N}) low]
    CheckResult tilde_sums;  // S~_12 and S~_24 totals carry (1 - q2^N)
    CheckResult singular;    // remainder after the S~*_12 N~_24 term divides by (1 - q2^N)
};

SplitReport folded_split_check(int omega, const Tuple& lam, const Partition& mu);

}  // namespace qqlax
