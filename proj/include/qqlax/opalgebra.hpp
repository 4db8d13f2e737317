#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "qqlax/elliptic.hpp"

namespace qqlax {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Multidegree = std::vector<int>;

int total_degree(const Multidegree& d);

// Truncated power series in n_vars commuting fugacities.
class FugacitySeries {
public:
    FugacitySeries(int n_vars, int max_degree);
    static FugacitySeries constant(int n_vars, int max_degree, cplx c);
    static FugacitySeries monomial(int max_degree, const Multidegree& d, cplx c = 1.0);

    int n_vars() const { return n_vars_; }
    int max_degree() const { return max_degree_; }
    const std::map<Multidegree, cplx>& coeffs() const { return coeffs_; }
    cplx coeff(const Multidegree& d) const;
    void add(const Multidegree& d, cplx c);

    FugacitySeries operator+(const FugacitySeries& o) const;
    FugacitySeries operator-(const FugacitySeries& o) const;
    FugacitySeries operator*(cplx s) const;
    FugacitySeries inverse() const;                          // needs nonzero constant term
    cplx evaluate(const std::vector<cplx>& values) const;    // numeric substitution
    // coefficient sums by total degree (for single-variable use)
    std::vector<cplx> by_total_degree() const;

private:
    int n_vars_;
    int max_degree_;
    std::map<Multidegree, cplx> coeffs_;
};

FugacitySeries series_mul(const FugacitySeries& a, const FugacitySeries& b);

// A finite sum of matrix-valued coefficients times shifts e^{s eps d/dx}.
// Coefficients are functions of the lattice offset k, meaning x = x0 + k eps,
// so that composition A(x) e^{s eps d} B(x) e^{t eps d} = A(x) B(x + s eps) e^{(s+t) eps d}
// stays on the lattice. Coefficient functions are memoized.
class ShiftOperator {
public:
    using Coeff = std::function<Matrix(int)>;

    explicit ShiftOperator(int n = 1) : n_(n) {}
    static ShiftOperator identity(int n);
    static ShiftOperator constant(const Matrix& m, int shift = 0);
    static ShiftOperator function(int n, Coeff f, int shift = 0);

    int dim() const { return n_; }
    const std::map<int, Coeff>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    Matrix at(int shift, int k) const;  // zero if absent
    void add(int shift, Coeff f);

    ShiftOperator operator+(const ShiftOperator& o) const;
    ShiftOperator operator-(const ShiftOperator& o) const;
    ShiftOperator operator*(cplx s) const;

private:
    int n_;
    std::map<int, Coeff> terms_;
};

struct ClipReport {
    int events = 0;
    double max_clipped_norm = 0.0;
};

// Composition; shifts beyond |window| are dropped and recorded in `clip` (window < 0 disables).
ShiftOperator shiftop_compose(const ShiftOperator& a, const ShiftOperator& b, int window = -1,
                              ClipReport* clip = nullptr);

ShiftOperator::Coeff memoize(ShiftOperator::Coeff f);

// Fugacity-graded operator: multidegree -> ShiftOperator, truncated at max total degree.
class GradedOperator {
public:
    GradedOperator(int n_vars, int max_degree, int dim);
    static GradedOperator identity(int n_vars, int max_degree, int dim);

    int n_vars() const { return n_vars_; }
    int max_degree() const { return max_degree_; }
    int dim() const { return dim_; }
    const std::map<Multidegree, ShiftOperator>& terms() const { return terms_; }
    void add(const Multidegree& d, const ShiftOperator& op);

    GradedOperator operator+(const GradedOperator& o) const;
    GradedOperator operator-(const GradedOperator& o) const;
    GradedOperator operator*(cplx s) const;
    GradedOperator compose(const GradedOperator& o) const;
    GradedOperator truncated(int max_degree) const;

private:
    int n_vars_;
    int max_degree_;
    int dim_;
    std::map<Multidegree, ShiftOperator> terms_;
};

// Classical phase-space data. Positions are multiplicative, extended by x_{w+N} = nome * x_w.
struct PhaseSpacePoint {
    std::vector<cplx> x;
    std::vector<cplx> p;
    cplx m{0.0};
    cplx nome{0.0};
    cplx beta{1.0};
    cplx nome6d{0.0};
    Kernel kernel = Kernel::FourD;

    int n() const { return int(x.size()); }
    cplx x_ext(int index) const;                // any integer index
    std::vector<cplx> fugacities() const;       // q_w = x_w / x_{w-1}, q_0 = nome x_0 / x_{N-1}
    bool in_chamber() const;
    void validate() const;                      // ConfigError / DegeneratePoint
    EllipticParams elliptic() const { return {nome, nome6d, beta, kernel}; }
};

enum class Structural { X, P, Qhat, C, Cz, Sz, CzHat };

Matrix cyclic(int n);                                   // sum_w e_w e_{w+1}^t
Matrix cyclic_z(int n, cplx z);                         // last row carries z^{-1}
Matrix sz_matrix(int n, cplx z);                        // diag(z^{w/N}), principal branch
Matrix diag_matrix(const std::vector<cplx>& d);
Matrix structural_matrix(Structural kind, const PhaseSpacePoint& pt, cplx z);
ShiftOperator cz_hat(int n, cplx z);                    // C_z e^{eps d}
ShiftOperator cz_hat_inverse(int n, cplx z);            // C_z^{-1} e^{-eps d}

}  // namespace qqlax
