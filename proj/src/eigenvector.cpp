#include "qqlax/eigenvector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qqlax/errors.hpp"

namespace qqlax {

namespace {

std::string key_str(int j, int k) { return "j=" + std::to_string(j) + " k=" + std::to_string(k); }

// |sum| / max |term|
double cancellation(std::initializer_list<cplx> terms) {
    cplx s = 0.0;
    double scale = 0.0;
    for (cplx t : terms) {
        s += t;
        scale = std::max(scale, std::abs(t));
    }
    return scale > 0.0 ? std::abs(s) / scale : 0.0;
}

double pair_error(cplx a, cplx b) { return rel_error(std::abs(a - b), std::abs(a), std::abs(b)); }

CheckResult exact_check(const std::string& name, const std::string& anchor) {
    CheckResult r;
    r.name = name;
    r.anchor = anchor;
    r.tolerance = 0.0;
    return r;
}

VirtualCharacter q2_power(int n, int k) { return VirtualCharacter::monomial(Weight::eps(n, 2) * k); }
VirtualCharacter q3_power(int n, int k) { return VirtualCharacter::monomial(Weight::eps(n, 3) * k); }

Multidegree add(Multidegree a, const Multidegree& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

Partition drop_first_row(const Partition& p) {
    if (p.empty()) return p;
    return Partition(std::vector<int>(p.rows().begin() + 1, p.rows().end()));
}

Partition prepend_row(int first, const Partition& p) {
    if (first == 0) return p;
    std::vector<int> rows{first};
    rows.insert(rows.end(), p.rows().begin(), p.rows().end());
    return Partition(rows);
}

std::string triple_str(const FoldedTriple& t, int omega) {
    auto rows = [](const Partition& p) {
        std::string s = "(";
        for (std::size_t i = 0; i < p.rows().size(); ++i) s += (i ? "," : "") + std::to_string(p.rows()[i]);
        return s + ")";
    };
    return "mu=" + rows(t.mu) + " nu=" + rows(t.nu) + " n=" + std::to_string(t.shift) + " w=" + std::to_string(omega);
}

bool formal_equal(const FormalCharacter& a, const FormalCharacter& b) {
    for (std::size_t c = 0; c < a.size(); ++c)
        if (!(a[c] - b[c]).eps1_dropped().empty()) return false;
    return true;
}

FormalCharacter formal_sum(const FormalCharacter& a, const FormalCharacter& b) {
    FormalCharacter r = a;
    for (std::size_t c = 0; c < r.size(); ++c) r[c] += b[c];
    return r;
}

}  // namespace

// ---------------------------------------------------------------- D_n

MonomialMatrix MonomialMatrix::identity(int n) { return cyclic(n, 0); }

MonomialMatrix MonomialMatrix::cyclic(int n, int power) {
    MonomialMatrix m;
    for (int i = 0; i < n; ++i) {
        m.col.push_back(mod_n(i + power, n));
        m.deg.emplace_back(n, 0);
    }
    return m;
}

MonomialMatrix MonomialMatrix::fugacities(int n) {
    MonomialMatrix m = identity(n);
    for (int i = 0; i < n; ++i) m.deg[i][i] = 1;
    return m;
}

MonomialMatrix MonomialMatrix::operator*(const MonomialMatrix& o) const {
    MonomialMatrix r;
    for (std::size_t i = 0; i < col.size(); ++i) {
        const int p = col[i];
        r.col.push_back(o.col[p]);
        r.deg.push_back(add(deg[i], o.deg[p]));
    }
    return r;
}

bool MonomialMatrix::is_diagonal() const {
    for (std::size_t i = 0; i < col.size(); ++i)
        if (col[i] != int(i)) return false;
    return true;
}

MonomialMatrix dn_product_form(int shift, int n) {
    const MonomialMatrix q = MonomialMatrix::fugacities(n);
    const MonomialMatrix cinv = MonomialMatrix::cyclic(n, -1);
    MonomialMatrix out = MonomialMatrix::identity(n);
    auto qpow = [&](int e) {
        MonomialMatrix r = MonomialMatrix::identity(n);
        for (int i = 0; i < e; ++i) r = r * q;
        return r;
    };
    if (shift >= 0) {
        for (int k = 0; k < shift; ++k) out = out * qpow(shift - k) * cinv;
        out = out * MonomialMatrix::cyclic(n, shift);
    } else {
        for (int k = 1; k < -shift; ++k) {
            out = out * MonomialMatrix::cyclic(n, k);
            for (int i = 0; i < k; ++i) out = out * q * cinv;
        }
    }
    return out;
}

CheckResult dn_check(int shift, int n) {
    CheckResult r = exact_check("dn_product_vs_diagonal", "diagonal prefactor D_n");
    const MonomialMatrix m = dn_product_form(shift, n);
    const std::string where = "n=" + std::to_string(shift);
    r.record(m.is_diagonal() ? 0.0 : 1.0, where + " not diagonal");
    for (int w = 0; w < n; ++w)
        r.record(m.deg[w] == shift_prefactor_grading(shift, w, n) ? 0.0 : 1.0, where + " w=" + std::to_string(w));
    r.finalize();
    return r;
}

Matrix dn_matrix(int shift, const PhaseSpacePoint& pt) {
    const int n = pt.n();
    const std::vector<cplx> q = pt.fugacities();
    Matrix d = Matrix::Zero(n, n);
    for (int w = 0; w < n; ++w) {
        const Multidegree e = shift_prefactor_grading(shift, w, n);
        cplx v = 1.0;
        for (int i = 0; i < n; ++i) v *= std::pow(q[i], e[i]);
        d(w, w) = v;
    }
    return d;
}

// ---------------------------------------------------------------- empty diagram

cplx chi24_empty(int omega, int j, int k, const QTildeOracle& q) {
    const int n = q.n();
    cplx out = 1.0;
    for (int c = 0; c < n; ++c) out *= q.y24(c, j, k + mod_n(c - omega - 1, n) + 1);
    return out;
}

CheckResult chi24_shift_check(const QTildeOracle& q, const std::vector<std::pair<int, int>>& keys, double tol) {
    CheckResult r;
    r.name = "chi24_shift_relation";
    r.anchor = "empty-diagram folded character shift";
    r.tolerance = tol;
    for (auto [j, k] : keys)
        for (int w = 0; w < q.n(); ++w) {
            const cplx lhs = chi24_empty(w, j, k + 1, q);
            const cplx rhs = q.y(w, j + 1, k + 1) / q.y(w, j, k + 1) * chi24_empty(w - 1, j, k, q);
            r.record(pair_error(lhs, rhs), key_str(j, k) + " w=" + std::to_string(w));
        }
    r.finalize();
    return r;
}

CheckResult chi24_matrix_check(const QTildeOracle& q, int j, int k, double tol) {
    CheckResult r;
    r.name = "chi24_matrix_relation";
    r.anchor = "empty-diagram eigen-relation";
    r.tolerance = tol;
    for (int w = 0; w < q.n(); ++w) {
        const cplx a = q.y(w + 1, j, k + 1) * chi24_empty(w, j - 1, k, q);
        const cplx b = -q.y(w + 1, j - 1, k + 1) * chi24_empty(w + 1, j - 1, k + 1, q);
        r.record(cancellation({a, b}), key_str(j, k) + " w=" + std::to_string(w));
    }
    r.finalize();
    return r;
}

// ---------------------------------------------------------------- N = 2

namespace {

cplx box_product(int j, int k, const QTildeOracle& q, int last_color) {
    return q.q(1, j, k + 2) * q.q(1, j - 1, k) * q.q(1, j, k + 2) * q.q(0, j, k + 3) /
           (q.q(1, j, k) * q.q(1, j + 1, k + 2) * q.q(1, j - 1, k + 2) * q.q(last_color, j + 1, k + 3));
}

}  // namespace

cplx chi24_box(int j, int k, const QTildeOracle& q) { return box_product(j, k, q, 0); }
cplx chi24_box_misprint(int j, int k, const QTildeOracle& q) { return box_product(j, k, q, 1); }

Sl2Report sl2_eigen_check(const QTildeOracle& q, int j, int k, cplx box_factor, bool misprint, double tol) {
    if (q.n() != 2) throw ConfigError("sl2_eigen_check: needs N = 2");
    auto y = [&](int w, int jj, int kk) { return q.y(w, jj, kk); };
    auto c0 = [&](int jj, int kk) { return chi24_empty(0, jj, kk, q); };
    auto c1 = [&](int jj, int kk) { return chi24_empty(1, jj, kk, q); };
    auto box = [&](int jj, int kk) {
        return box_factor * (misprint ? chi24_box_misprint(jj, kk, q) : chi24_box(jj, kk, q));
    };
    // qq-characters with q_0 = 0: chi_0 exact, chi_1 = chi1_0 + q_1 chi1_1
    auto chi0 = [&](int jj, int kk) { return y(1, jj, kk + 1); };
    auto chi1_0 = [&](int jj, int kk) { return y(0, jj, kk + 1); };
    auto chi1_1 = [&](int jj, int kk) { return y(0, jj + 1, kk + 1) * y(1, jj - 1, kk) / y(1, jj, kk); };
    // psi(x) = chi_24(x - m)
    auto psi0 = [&](int jj, int kk) { return c0(jj - 1, kk); };
    auto psi1_0 = [&](int jj, int kk) { return c1(jj - 1, kk); };
    auto psi1_1 = [&](int jj, int kk) { return box(jj - 1, kk); };

    const std::string where = key_str(j, k);
    auto make = [&](const std::string& name) {
        CheckResult r;
        r.name = name;
        r.anchor = "two-component eigenvector, first order";
        r.tolerance = tol;
        return r;
    };
    Sl2Report rep;
    rep.order0 = make("sl2_order0");
    rep.order0.record(cancellation({chi0(j, k) * psi0(j, k), -chi0(j - 1, k) * psi1_0(j, k + 1)}), where + " row0");
    rep.order0.record(cancellation({chi1_0(j, k) * psi1_0(j, k), -chi1_0(j - 1, k) * psi0(j, k + 1)}), where + " row1");

    rep.box_shift = make("sl2_box_shift");
    rep.box_shift.record(pair_error(y(1, j, k + 1) * box(j, k + 1), y(1, j - 1, k + 1) * c0(j, k + 2)), where);

    rep.box_definition = make("sl2_box_definition");
    rep.box_definition.record(
        pair_error(y(0, j + 1, k + 1) * y(1, j - 1, k) / y(1, j, k) * c0(j, k + 1), y(0, j + 1, k + 1) * box(j, k)),
        where);

    rep.second_row = make("sl2_second_row");
    rep.second_row.record(
        pair_error(y(0, j + 2, k + 1) * y(1, j, k) / y(1, j + 1, k) * c1(j, k), y(0, j + 2, k + 1) * c0(j, k - 1)),
        where);

    rep.order1 = make("sl2_order1");
    rep.order1.record(cancellation({-chi0(j - 1, k) * psi1_1(j, k + 1), chi0(j - 2, k) * psi0(j, k + 2)}),
                      where + " row0");
    rep.order1.record(cancellation({chi1_0(j, k) * psi1_1(j, k), chi1_1(j, k) * psi1_0(j, k),
                                    -chi1_1(j - 1, k) * psi0(j, k + 1), -chi1_0(j + 1, k) * psi0(j, k - 1)}),
                      where + " row1");
    for (CheckResult* c : {&rep.order0, &rep.box_shift, &rep.box_definition, &rep.second_row, &rep.order1})
        c->finalize();
    return rep;
}

// ---------------------------------------------------------------- recursion

bool map_applicable(const FoldedTriple& t) { return t.mu.row(1) - t.shift >= t.nu.row(1); }
bool in_map_image(const FoldedTriple& t) { return t.mu.row(1) - t.shift < t.nu.row(1); }

FoldedTriple folded_map(const FoldedTriple& t) {
    if (!map_applicable(t)) throw MapNotApplicable("folded_map: needs mu_1 - n >= nu_1");
    return {drop_first_row(t.mu), prepend_row(t.mu.row(1) - t.shift, t.nu), t.shift + 1};
}

FoldedTriple folded_map_inverse(const FoldedTriple& t) {
    if (!in_map_image(t)) throw MapNotApplicable("folded_map_inverse: needs mu_1 - n < nu_1");
    const int n = t.shift - 1;
    return {prepend_row(t.nu.row(1) + n, t.mu), drop_first_row(t.nu), n};
}

FormalCharacter ch24_part(const Partition& mu, int color, int shift, int n) {
    FormalCharacter out(n, VirtualCharacter(n));
    const VirtualCharacter pre = p_char(n, 3) * q3_power(n, -1);
    for (int w = 0; w < n; ++w) {
        const VirtualCharacter s = s24_boundary(n, mu, w, n);
        if (s.empty()) continue;
        for (int a = 1; a <= n; ++a) out[mod_n(color + a + w, n)] += pre * q2_power(n, a + shift) * s;
    }
    return out;
}

FormalCharacter ch34_part(const Partition& nu, int omega, int shift, int n) {
    FormalCharacter out(n, VirtualCharacter(n));
    const VirtualCharacter pre = q2_power(n, 1) * (VirtualCharacter::one(n) - q2_power(n, n)) * q3_power(n, -shift);
    for (int w = 0; w < n; ++w) {
        const VirtualCharacter s = s34_boundary(n, nu, w, n);
        if (!s.empty()) out[mod_n(omega + w + 1, n)] += pre * s;
    }
    return out;
}

Multidegree fug24_grading(const Partition& mu, int color, int n) {
    Multidegree d(n, 0);
    for (const Cell& c : mu.cells()) ++d[mod_n(color + c.row - c.col, n)];
    return d;
}

RecursionReport recursion_step_check(const FoldedTriple& t, int omega, int n) {
    const FoldedTriple u = folded_map(t);
    const std::string where = triple_str(t, omega);
    RecursionReport rep;
    rep.character = exact_check("recursion_character", "boundary-box recursion");
    rep.prefactor = exact_check("recursion_prefactor", "fugacity prefactor matching");
    rep.bijection = exact_check("recursion_bijection", "triple map inverse");

    const FormalCharacter lhs =
        formal_sum(ch24_part(t.mu, omega + t.shift, t.shift, n), ch34_part(t.nu, omega, t.shift, n));
    const FormalCharacter rhs =
        formal_sum(ch24_part(u.mu, omega + u.shift, u.shift, n), ch34_part(u.nu, omega, u.shift, n));
    rep.character.record(formal_equal(lhs, rhs) ? 0.0 : 1.0, where);

    const Multidegree pl = add(add(shift_prefactor_grading(-t.shift - 1, omega, n), fug24_grading(u.mu, omega + u.shift, n)),
                               diagram_grading(u.nu, omega, n));
    const Multidegree pr = add(add(shift_prefactor_grading(-t.shift, omega, n), fug24_grading(t.mu, omega + t.shift, n)),
                               diagram_grading(t.nu, omega, n));
    rep.prefactor.record(pl == pr ? 0.0 : 1.0, where);

    rep.bijection.record(in_map_image(u) && folded_map_inverse(u) == t ? 0.0 : 1.0, where);
    rep.character.finalize();
    rep.prefactor.finalize();
    rep.bijection.finalize();
    return rep;
}

RecursionReport recursion_sweep(int n, int max_size, int max_shift) {
    RecursionReport rep;
    rep.character = exact_check("recursion_character", "boundary-box recursion");
    rep.prefactor = exact_check("recursion_prefactor", "fugacity prefactor matching");
    rep.bijection = exact_check("recursion_bijection", "triple map inverse");
    const std::vector<Partition> parts = enumerate_partitions_upto(max_size);
    for (const Partition& mu : parts)
        for (const Partition& nu : parts) {
            if (mu.size() + nu.size() > max_size) continue;
            for (int s = -max_shift; s <= max_shift; ++s) {
                const FoldedTriple t{mu, nu, s};
                if (map_applicable(t)) {
                    for (int w = 0; w < n; ++w) {
                        const RecursionReport r = recursion_step_check(t, w, n);
                        rep.character.merge(r.character);
                        rep.prefactor.merge(r.prefactor);
                        rep.bijection.merge(r.bijection);
                    }
                } else {
                    // image side: the inverse lands in the domain and maps back
                    const FoldedTriple back = folded_map_inverse(t);
                    rep.bijection.record(map_applicable(back) && folded_map(back) == t ? 0.0 : 1.0,
                                         triple_str(t, -1) + " inverse");
                }
            }
        }
    rep.character.finalize();
    rep.prefactor.finalize();
    rep.bijection.finalize();
    return rep;
}

// ---------------------------------------------------------------- split

SplitReport folded_split_check(int omega, const Tuple& lam, const Partition& mu) {
    const int n = int(lam.size());
    if (omega < 0 || omega >= n) throw ConfigError("folded_split_check: omega out of range");
    const std::string where = "w=" + std::to_string(omega) + " |mu|=" + std::to_string(mu.size());
    SplitReport rep;
    rep.regrouping = exact_check("split_regrouping", "graded folded character regrouping");
    rep.tilde_sums = exact_check("split_tilde_sums", "rescaled component totals");
    rep.singular = exact_check("split_singular_part", "singular part of the folded character");

    const VirtualCharacter ex = VirtualCharacter::monomial(-Weight::var_x(n));
    const VirtualCharacter n12 = ex * w12(n);
    const VirtualCharacter k12 = ex * v12(lam);
    const VirtualCharacter s12c = s12(lam);
    const VirtualCharacter s24c = s24(n, mu);
    const VirtualCharacter k24c = k24(n, mu);
    const VirtualCharacter one = VirtualCharacter::one(n);
    const VirtualCharacter qn = q2_power(n, n);

    std::vector<VirtualCharacter> t12, t24;
    for (int a = 0; a < n; ++a) {
        t12.push_back(q2_power(n, -a) * zn_component(s12c, a, n));
        t24.push_back(q2_power(n, -a) * zn_component(s24c, a, n));
    }

    VirtualCharacter graded_weight(n);
    for (int a = 1; a <= n; ++a) graded_weight += q2_power(n, a);
    const VirtualCharacter lhs = zn_component(graded_weight * s12c.dual() * s24c, mod_n(-omega, n), n);

    VirtualCharacter all(n), mid(n), low(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const VirtualCharacter prod = t12[a].dual() * t24[b];
            all += prod;
            const int d = a - b;
            if (d > omega) continue;
            if (d > omega - n) mid += prod;
            else low += prod;
        }
    const VirtualCharacter rhs = q2_power(n, -omega) * (all - (one - qn) * mid - (one - qn * qn) * low);
    rep.regrouping.record(lhs == rhs ? 0.0 : 1.0, where);

    VirtualCharacter tot12(n), tot24(n), tn12(n);
    for (int a = 0; a < n; ++a) {
        tot12 += t12[a];
        tot24 += t24[a];
        tn12 += q2_power(n, -a) * zn_component(n12, a, n);
    }
    const VirtualCharacter kt12 = q2_power(n, 1 - n) * zn_component(k12, n - 1, n);
    const VirtualCharacter kt24_last = q2_power(n, 1 - n) * zn_component(k24c, n - 1, n);
    const VirtualCharacter kt24_first = zn_component(k24c, 0, n);
    const VirtualCharacter q24 = VirtualCharacter::monomial(Weight::eps(n, 2) + Weight::eps(n, 4));
    rep.tilde_sums.record(tot12 == tn12 - p_char(n, 1) * (one - qn) * kt12 ? 0.0 : 1.0, where + " S12");
    // summing the components below gives -q2 q4 (1 - q2^{-N}) K~_0 for the last term
    rep.tilde_sums.record(
        tot24 == one - (one - qn) * kt24_last - q24 * (one - q2_power(n, -n)) * kt24_first ? 0.0 : 1.0,
        where + " S24");
    // S~_24,a = N~_a - K~_a + q2^{N[a=0]} K~_{a-1} + q2^{-N[a=N-1]} q2 q4 K~_{a+1} - q2 q4 K~_a
    auto kt = [&](int a) { return q2_power(n, -mod_n(a, n)) * zn_component(k24c, mod_n(a, n), n); };
    for (int a = 0; a < n; ++a) {
        const VirtualCharacter nt = a == 0 ? one : VirtualCharacter(n);
        const VirtualCharacter comp = nt - kt(a) + q2_power(n, a == 0 ? n : 0) * kt(a - 1) +
                                      q2_power(n, a == n - 1 ? -n : 0) * q24 * kt(a + 1) - q24 * kt(a);
        rep.tilde_sums.record(t24[a] == comp ? 0.0 : 1.0, where + " S24 a=" + std::to_string(a));
    }

    // N~_24 = 1: removing q2^{-w} S~*_12 leaves a multiple of (1 - q2^N)
    const VirtualCharacter singular = q2_power(n, -omega) * tot12.dual();
    double err = 0.0;
    try {
        const VirtualCharacter quot = divide_one_minus_q2_power(lhs - singular, n);
        if (!((one - qn) * quot == lhs - singular)) err = 1.0;
    } catch (const DomainError&) {
        err = 1.0;
    }
    rep.singular.record(err, where);

    rep.regrouping.finalize();
    rep.tilde_sums.finalize();
    rep.singular.finalize();
    return rep;
}

}  // namespace qqlax
