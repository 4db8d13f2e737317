#include "qqlax/characters.hpp"

#include <cmath>
#include <sstream>

#include "qqlax/errors.hpp"

namespace qqlax {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

constexpr double kPoleThreshold = 1e-12;

}  // namespace

Weight Weight::var_x(int n) {
    Weight w(n);
    w.x = 1;
    return w;
}

Weight Weight::color(int n, int alpha) {
    if (alpha < 1 || alpha > n) throw DomainError("color index out of range");
    Weight w(n);
    w.a[alpha - 1] = 1;
    return w;
}

Weight Weight::eps(int n, int i) {
    Weight w(n);
    switch (i) {
        case 1: w.e1 = 1; break;
        case 2: w.e2 = 1; break;
        case 3: w.m = 1; break;
        case 4: w.e1 = -1; w.e2 = -1; w.m = -1; break;
        default: throw DomainError("eps index must be 1..4");
    }
    return w;
}

bool Weight::is_zero() const {
    if (x || e1 || e2 || m) return false;
    for (int c : a)
        if (c) return false;
    return true;
}

Weight Weight::operator+(const Weight& o) const {
    Weight r = *this;
    r += o;
    return r;
}

Weight& Weight::operator+=(const Weight& o) {
    if (a.size() != o.a.size()) throw DomainError("weight color count mismatch");
    x += o.x;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    e1 += o.e1;
    e2 += o.e2;
    m += o.m;
    return *this;
}

Weight Weight::operator-() const { return (*this) * -1; }
Weight Weight::operator-(const Weight& o) const { return *this + (-o); }

Weight Weight::operator*(int k) const {
    Weight r = *this;
    r.x *= k;
    for (int& c : r.a) c *= k;
    r.e1 *= k;
    r.e2 *= k;
    r.m *= k;
    return r;
}

Weight operator*(int k, const Weight& w) { return w * k; }

int Weight::charge(int modulus) const {
    int c = e2;
    for (std::size_t i = 0; i < a.size(); ++i) c += int(i + 1) * a[i];
    return mod(c, modulus);
}

std::string Weight::str() const {
    std::ostringstream os;
    os << "(x:" << x << " a:[";
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << "] e1:" << e1 << " e2:" << e2 << " m:" << m << ")";
    return os.str();
}

cplx ParamAssignment::eval(const Weight& w) const {
    if (w.n_colors() != n_colors()) throw DomainError("weight/parameter color count mismatch");
    cplx v = double(w.x) * x + double(w.e1) * eps1 + double(w.e2) * eps2 + double(w.m) * m;
    for (std::size_t i = 0; i < a.size(); ++i) v += double(w.a[i]) * a[i];
    return v;
}

VirtualCharacter VirtualCharacter::monomial(const Weight& w, long long mult) {
    VirtualCharacter v(w.n_colors());
    v.add_term(w, mult);
    return v;
}

long long VirtualCharacter::coeff(const Weight& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? 0 : it->second;
}

void VirtualCharacter::add_term(const Weight& w, long long mult) {
    if (mult == 0) return;
    if (w.n_colors() != n_) {
        if (terms_.empty() && n_ == 0)
            n_ = w.n_colors();
        else
            throw DomainError("character color count mismatch");
    }
    auto [it, inserted] = terms_.emplace(w, mult);
    if (!inserted) {
        it->second += mult;
        if (it->second == 0) terms_.erase(it);
    }
}

VirtualCharacter& VirtualCharacter::operator+=(const VirtualCharacter& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    if (n_ == 0) n_ = o.n_;
    return *this;
}

VirtualCharacter& VirtualCharacter::operator-=(const VirtualCharacter& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    if (n_ == 0) n_ = o.n_;
    return *this;
}

VirtualCharacter VirtualCharacter::operator+(const VirtualCharacter& o) const {
    VirtualCharacter r = *this;
    r += o;
    return r;
}

VirtualCharacter VirtualCharacter::operator-(const VirtualCharacter& o) const {
    VirtualCharacter r = *this;
    r -= o;
    return r;
}

VirtualCharacter VirtualCharacter::operator-() const { return (*this) * -1; }

VirtualCharacter VirtualCharacter::operator*(long long k) const {
    VirtualCharacter r(n_);
    if (k == 0) return r;
    for (const auto& [w, c] : terms_) r.terms_.emplace(w, c * k);
    return r;
}

VirtualCharacter VirtualCharacter::operator*(const VirtualCharacter& o) const {
    VirtualCharacter r(std::max(n_, o.n_));
    for (const auto& [w1, c1] : terms_)
        for (const auto& [w2, c2] : o.terms_) r.add_term(w1 + w2, c1 * c2);
    return r;
}

VirtualCharacter VirtualCharacter::dual() const {
    VirtualCharacter r(n_);
    for (const auto& [w, c] : terms_) r.terms_.emplace(-w, c);
    return r;
}

VirtualCharacter VirtualCharacter::shifted(const Weight& s) const {
    VirtualCharacter r(n_);
    for (const auto& [w, c] : terms_) r.terms_.emplace(w + s, c);
    return r;
}

VirtualCharacter VirtualCharacter::eps1_dropped() const {
    VirtualCharacter r(n_);
    for (const auto& [w, c] : terms_) {
        Weight u = w;
        u.e1 = 0;
        r.add_term(u, c);
    }
    return r;
}

long long VirtualCharacter::rank() const {
    long long s = 0;
    for (const auto& [w, c] : terms_) s += c;
    return s;
}

VirtualCharacter char_algebra(CharOp op, const VirtualCharacter& lhs, const VirtualCharacter& rhs) {
    switch (op) {
        case CharOp::Add: return lhs + rhs;
        case CharOp::Multiply: return lhs * rhs;
        case CharOp::Dual: return lhs.dual();
        case CharOp::ScaleByMonomial:
            if (rhs.support() != 1 || rhs.terms().begin()->second != 1)
                throw DomainError("ScaleByMonomial needs a single unit monomial");
            return lhs.shifted(rhs.terms().begin()->first);
    }
    return lhs;
}

VirtualCharacter char_algebra(CharOp op, const VirtualCharacter& lhs, const Weight& rhs) {
    return char_algebra(op, lhs, VirtualCharacter::monomial(rhs));
}

VirtualCharacter q_char(int n, int i) { return VirtualCharacter::monomial(Weight::eps(n, i)); }

VirtualCharacter p_char(int n, int i) { return VirtualCharacter::one(n) - q_char(n, i); }

cplx pleth_exp(const VirtualCharacter& v, const ParamAssignment& params) {
    // group by evaluated kernel argument so that numerically identical weights cancel exactly
    std::map<std::pair<double, double>, long long> net;
    for (const auto& [w, c] : v.terms()) {
        const cplx arg = params.eval(w);
        net[{arg.real(), arg.imag()}] += c;
    }
    cplx num = 1.0;
    cplx den = 1.0;
    for (const auto& [arg, c] : net) {
        if (c == 0) continue;
        const cplx t = vartheta(cplx(arg.first, arg.second), params.ell);
        if (std::abs(t) < kPoleThreshold)
            throw PoleError("pleth_exp: vartheta vanishes at argument (" + std::to_string(arg.first) + ", " +
                            std::to_string(arg.second) + ")");
        const long long k = c < 0 ? -c : c;
        cplx p = 1.0;
        for (long long i = 0; i < k; ++i) p *= t;
        if (c < 0)
            num *= p;
        else
            den *= p;
    }
    return num / den;
}

VirtualCharacter zn_component(const VirtualCharacter& v, int omega, int modulus) {
    VirtualCharacter r(v.n_colors());
    const int target = mod(omega, modulus);
    for (const auto& [w, c] : v.terms())
        if (w.charge(modulus) == target) r.add_term(w, c);
    return r;
}

VirtualCharacter divide_one_minus_q2_power(const VirtualCharacter& v, int k) {
    if (k <= 0) throw DomainError("divide_one_minus_q2_power: k must be positive");
    VirtualCharacter rem = v;
    VirtualCharacter quot(v.n_colors());
    int max_e2 = 0;
    for (const auto& [w, c] : v.terms()) max_e2 = std::max(max_e2, w.e2);
    while (!rem.empty()) {
        auto best = rem.terms().begin();
        for (auto it = rem.terms().begin(); it != rem.terms().end(); ++it)
            if (it->first.e2 < best->first.e2) best = it;
        const Weight w = best->first;
        const long long c = best->second;
        if (w.e2 > max_e2) throw DomainError("character is not divisible by (1 - q2^k)");
        quot.add_term(w, c);
        rem.add_term(w, -c);
        Weight up = w;
        up.e2 += k;
        rem.add_term(up, c);
    }
    return quot;
}

VirtualCharacter v12(const Tuple& lam) {
    const int n = int(lam.size());
    VirtualCharacter v(n);
    for (int alpha = 1; alpha <= n; ++alpha)
        for (const Cell& c : lam[alpha - 1].cells())
            v.add_term(Weight::color(n, alpha) + Weight::eps(n, 1) * (c.row - 1) + Weight::eps(n, 2) * (c.col - 1), 1);
    return v;
}

VirtualCharacter w12(int n) {
    VirtualCharacter v(n);
    for (int alpha = 1; alpha <= n; ++alpha) v.add_term(Weight::color(n, alpha), 1);
    return v;
}

VirtualCharacter v_omega(const Tuple& lam, int omega) {
    const int n = int(lam.size());
    VirtualCharacter v(n);
    for (int alpha = 1; alpha <= n; ++alpha)
        for (const Cell& c : lam[alpha - 1].cells())
            if (mod(alpha + c.col - 1 - omega, n) == 0)
                v.add_term(Weight::color(n, alpha) + Weight::eps(n, 1) * (c.row - 1) + Weight::eps(n, 2) * (c.col - 1), 1);
    return v;
}

VirtualCharacter w_omega(int n, int omega) {
    const int alpha = mod(omega, n) == 0 ? n : mod(omega, n);
    return VirtualCharacter::monomial(Weight::color(n, alpha));
}

VirtualCharacter tangent_plain(const Tuple& lam) {
    const int n = int(lam.size());
    const VirtualCharacter v = v12(lam);
    const VirtualCharacter w = w12(n);
    const VirtualCharacter q12 = q_char(n, 1) * q_char(n, 2);
    return w * v.dual() + q12 * v * w.dual() - p_char(n, 1) * p_char(n, 2) * v * v.dual();
}

VirtualCharacter tangent_orbifold(const Tuple& lam) {
    const int n = int(lam.size());
    const VirtualCharacter q1 = q_char(n, 1);
    const VirtualCharacter q2 = q_char(n, 2);
    const VirtualCharacter p1 = p_char(n, 1);
    VirtualCharacter t(n);
    for (int omega = 0; omega < n; ++omega) {
        const VirtualCharacter vw = v_omega(lam, omega);
        const VirtualCharacter vprev = v_omega(lam, omega - 1);
        const VirtualCharacter ww = w_omega(n, omega);
        t += ww * vw.dual() + q1 * q2 * vprev * ww.dual() - p1 * vw * vw.dual() + q2 * p1 * vprev * vw.dual();
    }
    return t;
}

VirtualCharacter s12(const Tuple& lam) {
    const int n = int(lam.size());
    const VirtualCharacter ex = VirtualCharacter::monomial(-Weight::var_x(n));
    return ex * (w12(n) - p_char(n, 1) * p_char(n, 2) * v12(lam));
}

VirtualCharacter k24(int n, const Partition& mu) {
    VirtualCharacter k(n);
    for (const Cell& c : mu.cells()) k.add_term(Weight::eps(n, 2) * (c.row - 1) + Weight::eps(n, 4) * (c.col - 1), 1);
    return k;
}

VirtualCharacter s24(int n, const Partition& mu) {
    return VirtualCharacter::one(n) - p_char(n, 2) * p_char(n, 4) * k24(n, mu);
}

VirtualCharacter s34(int n, const Partition& nu) {
    VirtualCharacter k(n);
    for (const Cell& c : nu.cells()) k.add_term(Weight::eps(n, 3) * (c.row - 1) + Weight::eps(n, 4) * (c.col - 1), 1);
    return VirtualCharacter::one(n) - p_char(n, 3) * p_char(n, 4) * k;
}

VirtualCharacter s24_boundary(int n, const Partition& mu, int omega, int modulus) {
    VirtualCharacter s(n);
    for (const Cell& c : mu.addable())
        if (mod(c.row - c.col - omega, modulus) == 0)
            s.add_term(Weight::eps(n, 2) * (c.row - 1) + Weight::eps(n, 4) * (c.col - 1), 1);
    for (const Cell& c : mu.removable())
        if (mod(c.row - c.col - omega, modulus) == 0)
            s.add_term(Weight::eps(n, 2) * c.row + Weight::eps(n, 4) * c.col, -1);
    return s;
}

VirtualCharacter s34_boundary(int n, const Partition& nu, int omega, int modulus) {
    VirtualCharacter s(n);
    for (const Cell& c : nu.addable())
        if (mod(1 - c.col - omega, modulus) == 0)
            s.add_term(Weight::eps(n, 3) * (c.row - 1) + Weight::eps(n, 4) * (c.col - 1), 1);
    for (const Cell& c : nu.removable())
        if (mod(-c.col - omega, modulus) == 0)
            s.add_term(Weight::eps(n, 3) * c.row + Weight::eps(n, 4) * c.col, -1);
    return s;
}

int d_omega(const Tuple& lam, int omega) {
    const int n = int(lam.size());
    int d = 0;
    for (int alpha = 1; alpha <= n; ++alpha)
        for (const Cell& c : lam[alpha - 1].cells())
            if (mod(alpha + c.col - 1 - omega, n) == 0) ++d;
    return d;
}

VirtualCharacter localization_characters(CharKind kind, const FixedPointData& data) {
    const int n = data.n_colors;
    switch (kind) {
        case CharKind::V12: return v12(data.lam);
        case CharKind::W12: return w12(n);
        case CharKind::TangentPlain: return tangent_plain(data.lam);
        case CharKind::TangentOrbifold: return tangent_orbifold(data.lam);
        case CharKind::S12: return s12(data.lam);
        case CharKind::S24: return s24(n, data.mu);
        case CharKind::S34: return s34(n, data.mu);
        case CharKind::N24: return VirtualCharacter::one(n);
        case CharKind::K24: return k24(n, data.mu);
    }
    return VirtualCharacter(n);
}

}  // namespace qqlax
