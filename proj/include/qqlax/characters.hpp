#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "qqlax/elliptic.hpp"
#include "qqlax/partitions.hpp"

namespace qqlax {

// Integer point on the lattice spanned by x, a_1..a_N, eps1, eps2, m.
// eps3 = m and eps4 = -eps1 - eps2 - m are expressed through these.
struct Weight {
    int x = 0;
    std::vector<int> a;
    int e1 = 0;
    int e2 = 0;
    int m = 0;

    explicit Weight(int n_colors = 0) : a(n_colors, 0) {}

    static Weight zero(int n) { return Weight(n); }
    static Weight var_x(int n);
    static Weight color(int n, int alpha);  // a_alpha, alpha = 1..N
    static Weight eps(int n, int i);        // eps_i, i = 1..4
    static Weight mass(int n) { return eps(n, 3); }

    int n_colors() const { return int(a.size()); }
    bool is_zero() const;
    Weight operator+(const Weight& o) const;
    Weight operator-(const Weight& o) const;
    Weight operator-() const;
    Weight operator*(int k) const;
    Weight& operator+=(const Weight& o);

    // Z_N charge: e2 + sum_alpha alpha * a[alpha]  (mod N)
    int charge(int modulus) const;

    std::string str() const;
    auto operator<=>(const Weight&) const = default;
};

Weight operator*(int k, const Weight& w);

struct ParamAssignment {
    cplx x{0.0};
    std::vector<cplx> a;
    cplx eps1{0.0};
    cplx eps2{0.0};
    cplx m{0.0};
    EllipticParams ell;

    cplx eval(const Weight& w) const;
    int n_colors() const { return int(a.size()); }
};

class VirtualCharacter {
public:
    using Terms = std::map<Weight, long long>;

    VirtualCharacter() = default;
    explicit VirtualCharacter(int n_colors) : n_(n_colors) {}
    static VirtualCharacter monomial(const Weight& w, long long mult = 1);
    static VirtualCharacter one(int n) { return monomial(Weight(n)); }

    int n_colors() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t support() const { return terms_.size(); }
    long long coeff(const Weight& w) const;
    void add_term(const Weight& w, long long mult);

    VirtualCharacter operator+(const VirtualCharacter& o) const;
    VirtualCharacter operator-(const VirtualCharacter& o) const;
    VirtualCharacter operator-() const;
    VirtualCharacter operator*(const VirtualCharacter& o) const;
    VirtualCharacter operator*(long long k) const;
    VirtualCharacter& operator+=(const VirtualCharacter& o);
    VirtualCharacter& operator-=(const VirtualCharacter& o);

    VirtualCharacter dual() const;
    VirtualCharacter shifted(const Weight& w) const;  // multiply by e^{w}
    VirtualCharacter eps1_dropped() const;            // specialise q1 = 1
    long long rank() const;                           // sum of multiplicities

    bool operator==(const VirtualCharacter& o) const { return terms_ == o.terms_; }

private:
    int n_ = 0;
    Terms terms_;
};

enum class CharOp { Add, Multiply, Dual, ScaleByMonomial };

VirtualCharacter char_algebra(CharOp op, const VirtualCharacter& lhs, const VirtualCharacter& rhs);
VirtualCharacter char_algebra(CharOp op, const VirtualCharacter& lhs, const Weight& rhs);

// q_i = e^{eps_i}, P_i = 1 - q_i
VirtualCharacter q_char(int n, int i);
VirtualCharacter p_char(int n, int i);

// E[V] = prod_{w: mult<0} vartheta(w)^{|mult|} / prod_{w: mult>0} vartheta(w)^{mult}
cplx pleth_exp(const VirtualCharacter& v, const ParamAssignment& params);

VirtualCharacter zn_component(const VirtualCharacter& v, int omega, int modulus);

// Exact division by (1 - q2^k). Throws DomainError if not divisible.
VirtualCharacter divide_one_minus_q2_power(const VirtualCharacter& v, int k);

// Fixed-point characters.
VirtualCharacter v12(const Tuple& lam);
VirtualCharacter w12(int n_colors);
VirtualCharacter v_omega(const Tuple& lam, int omega);
VirtualCharacter w_omega(int n_colors, int omega);
VirtualCharacter tangent_plain(const Tuple& lam);
VirtualCharacter tangent_orbifold(const Tuple& lam);
VirtualCharacter s12(const Tuple& lam);  // e^{-x}(W - P1 P2 V)
VirtualCharacter k24(int n_colors, const Partition& mu);
VirtualCharacter s24(int n_colors, const Partition& mu);
VirtualCharacter s34(int n_colors, const Partition& nu);
// Boundary-box forms of the graded 24 and 34 characters.
VirtualCharacter s24_boundary(int n_colors, const Partition& mu, int omega, int modulus);
VirtualCharacter s34_boundary(int n_colors, const Partition& nu, int omega, int modulus);

int d_omega(const Tuple& lam, int omega);

enum class CharKind { V12, W12, TangentPlain, TangentOrbifold, S12, S24, S34, N24, K24 };

struct FixedPointData {
    Tuple lam;
    Partition mu;
    int n_colors = 1;
};

VirtualCharacter localization_characters(CharKind kind, const FixedPointData& data);

}  // namespace qqlax
