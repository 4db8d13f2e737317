#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qqlax/opalgebra.hpp"
#include "qqlax/partitions.hpp"
#include "qqlax/report.hpp"

namespace qqlax {

// Generic nonvanishing values standing in for Y_w(x0 + j m + k eps). Each value is a pure
// hash of (seed, w mod N, j, k), so lookups never depend on evaluation order. A classical
// oracle ignores k (eps = 0).
class YOracle {
public:
    YOracle(int n, std::uint64_t seed, bool classical = false);

    int n() const { return n_; }
    bool classical() const { return classical_; }
    cplx operator()(int omega, int j, int k) const;
    // Multiply a single stored value by `factor` (negative controls).
    void perturb(int omega, int j, int k, cplx factor);

private:
    int n_;
    std::uint64_t seed_;
    bool classical_;
    std::map<std::tuple<int, int, int>, cplx> overrides_;
};

int mod_n(int a, int n);

// chi_w(x0 + j m + k eps) as a series in q_0..q_{N-1}. The orbifold form uses the telescoped
// column product; `scalar` switches to the box-by-box single-fugacity form (requires N = 1).
FugacitySeries chi_from_y(int omega, int j, int k, int degree, const YOracle& y, bool scalar = false);

// Fugacity grading of a 34-plane diagram: prod_j q_{w+1-j}^{lambda^t_j}.
Multidegree diagram_grading(const Partition& lam, int omega, int n);

// Multidegree of the diagonal prefactor D_n at row omega.
Multidegree shift_prefactor_grading(int shift, int omega, int n);

// Both sides of the factorization identity in the C_z e^{eps d} normal form, anchored at
// x0 + j0 m. Operators are functions of the lattice offset k.
GradedOperator build_lhs(int j0, cplx z, int degree, const YOracle& y);
GradedOperator build_rhs(int j0, cplx z, int degree, const YOracle& y);
// The scalar (N = 1) identity with an explicit z: same grading, single fugacity.
GradedOperator build_scalar_lhs(int j0, cplx z, int degree, const YOracle& y);
GradedOperator build_scalar_rhs(int j0, cplx z, int degree, const YOracle& y);

enum class FactorizationVariant { Matrix, Scalar, Classical };

struct FactorizationOptions {
    cplx z{0.83, 0.41};
    double tolerance = 1e-9;
    // Applied to the LHS oracle only.
    bool mutate = false;
};

// Compares LHS and RHS per (multidegree, shift, entry) at k = 0 and k = 1. The classical
// variant collapses shifts before comparing.
CheckResult check_factorization(int n, int degree, std::uint64_t seed, FactorizationVariant variant,
                                const FactorizationOptions& opt = {});

// Same per-cell comparison for two graded operators (optionally collapsing shifts).
CheckResult compare_graded(const GradedOperator& a, const GradedOperator& b, double tol, bool collapse_shifts,
                           const std::vector<int>& ks = {0, 1});

// Entrywise rel_error of two equally sized matrices into `res`.
void compare_matrices(CheckResult& res, const Matrix& a, const Matrix& b, const std::string& where);

// Numeric value of a graded operator at fugacities q and lattice offset k: shift -> matrix.
std::map<int, Matrix> evaluate_graded(const GradedOperator& op, const std::vector<cplx>& q, int k);

// X D(x+m, nome z) = -D(x, z) X C_{nome z} e^{eps d}. The matrix relation
// X C_{nome z}^{-1} X^{-1} = Q C_z^{-1} is checked at the point; the operator identity is then
// compared per Laurent multidegree (total degree <= `degree`) in the free-oracle model.
CheckResult check_xshift(const PhaseSpacePoint& pt, cplx z, int degree, std::uint64_t seed, double tol = 1e-9);

// Pairs (n_j) and (k_i) of the fermionic dictionary for a diagram and a charge p.
struct BijectionData {
    int r = 0;
    int s = 0;
    std::vector<int> n_list;  // strictly decreasing, >= 1
    std::vector<int> k_list;  // strictly increasing, >= 0
};

BijectionData lemma_bijection(const Partition& lam, int p);
// Inverse map; DomainError when the lists are not strictly monotone in the required range.
std::pair<Partition, int> lemma_bijection_inverse(const std::vector<int>& n_list, const std::vector<int>& k_list);

// Open-bracket product and qq-character term for a diagram shifted by p.
cplx lemma_lhs(const Partition& lam, int p, int omega, const YOracle& y);
cplx lemma_rhs(const Partition& lam, int p, int omega, const YOracle& y);
CheckResult lemma_lhs_rhs(const Partition& lam, int p, int omega, const YOracle& y, double tol = 1e-10);

Multidegree lemma_fugacity_lhs(const Partition& lam, int p, int omega, int n);
Multidegree lemma_fugacity_rhs(const Partition& lam, int p, int omega, int n);
CheckResult lemma_fugacity(const Partition& lam, int p, int omega, int n);

// Matrix Jacobi identity for D_1(z): product form vs weighted sum, its determinant against
// theta(1/z) / prod(1 - q^n), and the scalar triple product when N = 1.
struct JacobiReport {
    CheckResult product_vs_sum;
    CheckResult determinant;
    CheckResult triple_product;  // only populated for N = 1
};

Matrix jacobi_product(const PhaseSpacePoint& pt, cplx z, int n_terms);
Matrix jacobi_sum(const PhaseSpacePoint& pt, cplx z, int n_terms);
// B_w = prod_{l>=1} 1 / (1 - x_w / x_{w-l})
std::vector<cplx> b_weights(const PhaseSpacePoint& pt, int n_terms);
JacobiReport jacobi_identity(const PhaseSpacePoint& pt, cplx z, int n_terms, double tol = 1e-9);

}  // namespace qqlax
