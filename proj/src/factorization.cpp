#include "qqlax/factorization.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include "qqlax/errors.hpp"

namespace qqlax {

int mod_n(int a, int n) {
    const int r = a % n;
    return r < 0 ? r + n : r;
}

// ---------------------------------------------------------------- oracle

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit(std::uint64_t& state) { return double(splitmix(state) >> 11) * 0x1.0p-53; }

}  // namespace

YOracle::YOracle(int n, std::uint64_t seed, bool classical) : n_(n), seed_(seed), classical_(classical) {
    if (n < 1) throw ConfigError("YOracle: N must be positive");
}

cplx YOracle::operator()(int omega, int j, int k) const {
    const int w = mod_n(omega, n_);
    if (classical_) k = 0;
    std::uint64_t state = seed_;
    splitmix(state);
    state ^= std::uint64_t(std::uint32_t(w)) * 0x100000001b3ULL;
    splitmix(state);
    state ^= std::uint64_t(std::uint32_t(j + (1 << 20))) * 0xc2b2ae3d27d4eb4fULL;
    splitmix(state);
    state ^= std::uint64_t(std::uint32_t(k + (1 << 20))) * 0x165667b19e3779f9ULL;
    const double log_r = std::log(0.5) + unit(state) * (std::log(2.0) - std::log(0.5));
    const double phase = 2.0 * std::numbers::pi * unit(state);
    cplx v = std::polar(std::exp(log_r), phase);
    auto it = overrides_.find({w, j, k});
    if (it != overrides_.end()) v *= it->second;
    return v;
}

void YOracle::perturb(int omega, int j, int k, cplx factor) {
    if (classical_) k = 0;
    overrides_[{mod_n(omega, n_), j, k}] = factor;
}

// ---------------------------------------------------------------- qq-character

Multidegree diagram_grading(const Partition& lam, int omega, int n) {
    Multidegree d(n, 0);
    for (int j = 1; j <= lam.row(1); ++j) d[mod_n(omega + 1 - j, n)] += lam.col(j);
    return d;
}

Multidegree shift_prefactor_grading(int shift, int omega, int n) {
    Multidegree d(n, 0);
    if (shift >= 0)
        for (int k = 0; k < shift; ++k) d[mod_n(omega - k, n)] += shift - k;
    else
        for (int k = 1; k < -shift; ++k) d[mod_n(omega + k, n)] += -shift - k;
    return d;
}

FugacitySeries chi_from_y(int omega, int j, int k, int degree, const YOracle& y, bool scalar) {
    if (scalar && y.n() != 1) throw DomainError("chi_from_y: scalar form needs N = 1");
    const int n = y.n();
    FugacitySeries out(n, degree);
    for (const Partition& lam : enumerate_partitions_upto(degree)) {
        cplx term;
        if (scalar) {
            // box-by-box product with sigma = m(row - col) + eps(1 - col)
            term = y(0, j, k + 1);
            for (const Cell& c : lam.cells()) {
                const int sm = c.row - c.col;
                const int se = 1 - c.col;
                term *= y(0, j + sm + 1, k + se + 1) * y(0, j + sm - 1, k + se) /
                        (y(0, j + sm, k + se + 1) * y(0, j + sm, k + se));
            }
        } else {
            const int width = lam.row(1);
            term = y(omega + 1 - width, j - width, k + 1 - width);
            for (int c = 1; c <= width; ++c) {
                const int h = lam.col(c);
                term *= y(omega + 2 - c, j + h - c + 1, k + 2 - c) / y(omega + 1 - c, j + h - c, k + 1 - c);
            }
        }
        out.add(diagram_grading(lam, omega, n), term);
    }
    return out;
}

// ---------------------------------------------------------------- operator building blocks

namespace {

using Oracle = std::shared_ptr<const YOracle>;

// k -> diag_w Y_{w+1}(x0 + j m + (k + dk) eps)
ShiftOperator y_diag(const Oracle& y, int j, int dk, bool inverse = false) {
    const int n = y->n();
    return ShiftOperator::function(n, [y, j, dk, inverse, n](int k) {
        Matrix m = Matrix::Zero(n, n);
        for (int w = 0; w < n; ++w) {
            const cplx v = (*y)(w + 1, j, k + dk);
            m(w, w) = inverse ? 1.0 / v : v;
        }
        return m;
    });
}

// k -> diag_w Y_{w+1}(j_num, k+1) / Y_{w+1}(j_den, k+1)
ShiftOperator y_ratio(const Oracle& y, int j_num, int j_den) {
    const int n = y->n();
    return ShiftOperator::function(n, [y, j_num, j_den, n](int k) {
        Matrix m = Matrix::Zero(n, n);
        for (int w = 0; w < n; ++w) m(w, w) = (*y)(w + 1, j_num, k + 1) / (*y)(w + 1, j_den, k + 1);
        return m;
    });
}

GradedOperator lift(const ShiftOperator& op, int n_vars, int degree) {
    GradedOperator g(n_vars, degree, op.dim());
    g.add(Multidegree(n_vars, 0), op);
    return g;
}

// diag(q_w)^power split into its N homogeneous pieces.
GradedOperator qhat_power(int n, int degree, int power) {
    GradedOperator g(n, degree, n);
    for (int w = 0; w < n; ++w) {
        Multidegree d(n, 0);
        d[w] = power;
        Matrix e = Matrix::Zero(n, n);
        e(w, w) = 1.0;
        g.add(d, ShiftOperator::constant(e));
    }
    return g;
}

GradedOperator power(const GradedOperator& a, int k) {
    GradedOperator r = GradedOperator::identity(a.n_vars(), a.max_degree(), a.dim());
    for (int i = 0; i < k; ++i) r = r.compose(a);
    return r;
}

// chi-hat(x0 + j m) with chi series cached per (w, k).
GradedOperator chi_hat(const Oracle& y, int j, int degree) {
    const int n = y->n();
    struct Cache {
        std::mutex mu;
        std::map<std::pair<int, int>, FugacitySeries> table;
    };
    auto cache = std::make_shared<Cache>();
    auto series = [cache, y, j, degree](int w, int k) -> FugacitySeries {
        {
            std::lock_guard<std::mutex> lock(cache->mu);
            auto it = cache->table.find({w, k});
            if (it != cache->table.end()) return it->second;
        }
        FugacitySeries s = chi_from_y(w, j, k, degree, *y);
        std::lock_guard<std::mutex> lock(cache->mu);
        return cache->table.emplace(std::make_pair(w, k), std::move(s)).first->second;
    };
    std::set<Multidegree> support;
    for (int w = 0; w < n; ++w)
        for (const Partition& lam : enumerate_partitions_upto(degree)) support.insert(diagram_grading(lam, w, n));
    GradedOperator g(n, degree, n);
    for (const Multidegree& d : support) {
        g.add(d, ShiftOperator::function(n, [series, d, n](int k) {
            Matrix m = Matrix::Zero(n, n);
            for (int w = 0; w < n; ++w) m(w, w) = series(w, k).coeff(d);
            return m;
        }));
    }
    return g;
}

}  // namespace

namespace {

// LHS product with the hatted shift C and its inverse supplied as graded operators. They may
// carry a negative degree, so each right factor is formed at their (higher) working degree and
// only then truncated to `degree`.
GradedOperator lhs_product(int j0, const GradedOperator& c_hat, const GradedOperator& c_hat_inv, int degree,
                           int n_left, int n_right, const Oracle& y) {
    const int n = y->n();
    const int scratch = c_hat.max_degree();
    const GradedOperator one = GradedOperator::identity(n, degree, n);

    GradedOperator left = one;
    for (int k = n_left; k >= 1; --k) {
        const GradedOperator core = lift(y_diag(y, j0 + k, 1), n, scratch)
                                        .compose(c_hat_inv)
                                        .compose(lift(y_diag(y, j0 + k - 1, 1, true), n, scratch));
        left = left.compose(one - qhat_power(n, scratch, k).compose(core).truncated(degree));
    }
    GradedOperator out = left.compose(lift(y_diag(y, j0, 1), n, degree));

    const GradedOperator q_cinv = qhat_power(n, scratch, 1).compose(c_hat_inv);
    for (int k = 0; k <= n_right; ++k) {
        const GradedOperator factor = power(q_cinv, k)
                                          .compose(lift(y_ratio(y, j0 - k - 1, j0 - k), n, scratch))
                                          .compose(power(c_hat, k + 1));
        out = out.compose(one - factor.truncated(degree));
    }
    return out;
}

}  // namespace

GradedOperator build_lhs(int j0, cplx z, int degree, const YOracle& oracle) {
    auto y = std::make_shared<const YOracle>(oracle);
    const int n = y->n();
    return lhs_product(j0, lift(cz_hat(n, z), n, degree), lift(cz_hat_inverse(n, z), n, degree), degree, degree, degree,
                       y);
}

GradedOperator build_rhs(int j0, cplx z, int degree, const YOracle& oracle) {
    auto y = std::make_shared<const YOracle>(oracle);
    const int n = y->n();
    const GradedOperator c_hat = lift(cz_hat(n, z), n, degree);
    const GradedOperator c_hat_inv = lift(cz_hat_inverse(n, z), n, degree);
    const GradedOperator q_cinv = qhat_power(n, degree, 1).compose(c_hat_inv);

    GradedOperator out(n, degree, n);
    for (int s = 0; s * (s + 1) / 2 <= degree; ++s) {
        GradedOperator tail = GradedOperator::identity(n, degree, n);
        for (int k = 0; k < s; ++k) tail = tail.compose(qhat_power(n, degree, s - k).compose(c_hat_inv));
        const GradedOperator term = chi_hat(y, j0 + s, degree).compose(tail);
        out = out + term * (s % 2 ? -1.0 : 1.0);
    }
    for (int s = 1; s * (s - 1) / 2 <= degree; ++s) {
        GradedOperator tail = GradedOperator::identity(n, degree, n);
        for (int k = 1; k < s; ++k) tail = tail.compose(power(c_hat, k)).compose(power(q_cinv, k));
        tail = tail.compose(power(c_hat, s));
        const GradedOperator term = chi_hat(y, j0 - s, degree).compose(tail);
        out = out + term * (s % 2 ? -1.0 : 1.0);
    }
    return out;
}

namespace {

GradedOperator scalar_term(int degree, int q_power, cplx coeff, const ShiftOperator& op) {
    GradedOperator g(1, degree, 1);
    g.add({q_power}, op * coeff);
    return g;
}

ShiftOperator scalar_y(const Oracle& y, int j, int dk, bool inverse = false) {
    return ShiftOperator::function(1, [y, j, dk, inverse](int k) {
        const cplx v = (*y)(0, j, k + dk);
        return Matrix::Constant(1, 1, inverse ? 1.0 / v : v);
    });
}

}  // namespace

GradedOperator build_scalar_lhs(int j0, cplx z, int degree, const YOracle& oracle) {
    if (oracle.n() != 1) throw DomainError("scalar factorization needs a rank-one oracle");
    auto y = std::make_shared<const YOracle>(oracle);
    const GradedOperator one = GradedOperator::identity(1, degree, 1);
    const ShiftOperator back = ShiftOperator::constant(Matrix::Identity(1, 1), -1);
    const ShiftOperator fwd = ShiftOperator::constant(Matrix::Identity(1, 1), +1);

    GradedOperator out = one;
    for (int k = degree; k >= 1; --k) {
        const ShiftOperator core =
            shiftop_compose(shiftop_compose(scalar_y(y, j0 + k, 1), back), scalar_y(y, j0 + k - 1, 1, true));
        out = out.compose(one - scalar_term(degree, k, z, core));
    }
    out = out.compose(scalar_term(degree, 0, 1.0, scalar_y(y, j0, 1)));
    for (int k = 0; k <= degree; ++k) {
        // the ratio sits at x - k eps, as in the N = 1 matrix identity
        const ShiftOperator core =
            shiftop_compose(shiftop_compose(scalar_y(y, j0 - k - 1, 1 - k), scalar_y(y, j0 - k, 1 - k, true)), fwd);
        out = out.compose(one - scalar_term(degree, k, 1.0 / z, core));
    }
    return out;
}

GradedOperator build_scalar_rhs(int j0, cplx z, int degree, const YOracle& oracle) {
    if (oracle.n() != 1) throw DomainError("scalar factorization needs a rank-one oracle");
    auto y = std::make_shared<const YOracle>(oracle);
    GradedOperator out(1, degree, 1);
    for (int s = -(degree + 2); s <= degree + 2; ++s) {
        const int lead = (s * s + s) / 2;
        if (lead > degree) continue;
        const cplx pref = std::pow(-z, s);
        auto series = std::make_shared<std::map<int, FugacitySeries>>();
        auto mu = std::make_shared<std::mutex>();
        for (int d = 0; d + lead <= degree; ++d) {
            auto f = [y, s, j0, degree, d, series, mu](int k) {
                std::lock_guard<std::mutex> lock(*mu);
                auto it = series->find(k);
                if (it == series->end()) it = series->emplace(k, chi_from_y(0, j0 + s, k, degree, *y, true)).first;
                return Matrix::Constant(1, 1, it->second.coeff({d}));
            };
            GradedOperator g(1, degree, 1);
            g.add({d + lead}, ShiftOperator::function(1, f, -s) * pref);
            out = out + g;
        }
    }
    return out;
}

// ---------------------------------------------------------------- comparison

std::map<int, Matrix> evaluate_graded(const GradedOperator& op, const std::vector<cplx>& q, int k) {
    std::map<int, Matrix> out;
    for (const auto& [d, sop] : op.terms()) {
        cplx mono = 1.0;
        for (std::size_t i = 0; i < d.size(); ++i) mono *= std::pow(q[i], d[i]);
        for (const auto& [s, f] : sop.terms()) {
            Matrix v = f(k) * mono;
            auto it = out.find(s);
            if (it == out.end())
                out.emplace(s, std::move(v));
            else
                it->second += v;
        }
    }
    return out;
}

namespace {

std::string degree_label(const Multidegree& d) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
    os << ")";
    return os.str();
}

}  // namespace

void compare_matrices(CheckResult& res, const Matrix& a, const Matrix& b, const std::string& where) {
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) {
            const double err = rel_error(std::abs(a(r, c) - b(r, c)), std::abs(a(r, c)), std::abs(b(r, c)));
            res.record(err, where + " entry (" + std::to_string(r) + "," + std::to_string(c) + ")");
        }
}


CheckResult compare_graded(const GradedOperator& a, const GradedOperator& b, double tol, bool collapse_shifts,
                           const std::vector<int>& ks) {
    CheckResult res;
    res.tolerance = tol;
    const int n = a.dim();
    const Matrix zero = Matrix::Zero(n, n);
    std::set<Multidegree> degrees;
    for (const auto& [d, op] : a.terms()) degrees.insert(d);
    for (const auto& [d, op] : b.terms()) degrees.insert(d);
    const ShiftOperator empty(n);
    for (const Multidegree& d : degrees) {
        auto ia = a.terms().find(d);
        auto ib = b.terms().find(d);
        const ShiftOperator& oa = ia == a.terms().end() ? empty : ia->second;
        const ShiftOperator& ob = ib == b.terms().end() ? empty : ib->second;
        std::set<int> shifts;
        for (const auto& [s, f] : oa.terms()) shifts.insert(s);
        for (const auto& [s, f] : ob.terms()) shifts.insert(s);
        for (int k : ks) {
            if (collapse_shifts) {
                Matrix sa = zero, sb = zero;
                for (int s : shifts) {
                    sa += oa.at(s, k);
                    sb += ob.at(s, k);
                }
                compare_matrices(res, sa, sb, "degree " + degree_label(d) + " k=" + std::to_string(k));
            } else {
                for (int s : shifts)
                    compare_matrices(res, oa.at(s, k), ob.at(s, k),
                                     "degree " + degree_label(d) + " shift " + std::to_string(s) + " k=" +
                                         std::to_string(k));
            }
        }
    }
    res.finalize();
    return res;
}

CheckResult check_factorization(int n, int degree, std::uint64_t seed, FactorizationVariant variant,
                                const FactorizationOptions& opt) {
    if (n < 1) throw ConfigError("factorization check needs N >= 1");
    if (degree < 0 || degree > 6) throw ConfigError("factorization degree must lie in [0, 6]");
    if (opt.z == cplx(0.0)) throw ConfigError("z must be nonzero");
    const bool classical = variant == FactorizationVariant::Classical;
    const int rank = variant == FactorizationVariant::Scalar ? 1 : n;
    YOracle clean(rank, seed, classical);
    YOracle lhs_oracle = clean;
    // an entry of the right product at first order; it shows up at degree >= 1
    if (opt.mutate) lhs_oracle.perturb(1, -2, 1, 1.0 + 1e-3);

    CheckResult res;
    if (variant == FactorizationVariant::Scalar) {
        const GradedOperator lhs = build_scalar_lhs(0, opt.z, degree, lhs_oracle);
        res = compare_graded(lhs, build_scalar_rhs(0, opt.z, degree, clean), opt.tolerance, false);
        res.merge(compare_graded(lhs, build_lhs(0, opt.z, degree, lhs_oracle), opt.tolerance, false));
    } else {
        res = compare_graded(build_lhs(0, opt.z, degree, lhs_oracle), build_rhs(0, opt.z, degree, clean),
                             opt.tolerance, classical);
    }
    res.tolerance = opt.tolerance;
    res.finalize();
    return res;
}

CheckResult check_xshift(const PhaseSpacePoint& pt, cplx z, int degree, std::uint64_t seed, double tol) {
    pt.validate();
    const int n = pt.n();
    CheckResult res;
    res.tolerance = tol;

    // X C_{qz}^{-1} X^{-1} = Q C_z^{-1} at the given point
    const Matrix x = diag_matrix(pt.x);
    const Matrix lhs = x * cyclic_z(n, pt.nome * z).inverse() * x.inverse();
    const Matrix rhs = diag_matrix(pt.fugacities()) * cyclic_z(n, z).inverse();
    compare_matrices(res, lhs, rhs, "conjugated C");

    // Formal part: conjugation by X turns the hatted C_{qz} into C_z Q^{-1} and its inverse into
    // Q C_z^{-1}. Only the first right factor then has degree -1, so working one degree higher
    // keeps every cell up to `degree` exact.
    auto y = std::make_shared<const YOracle>(YOracle(n, seed));
    const int work = degree + 1;
    const int scratch = 3 * work + 4;
    const GradedOperator c_hat = lift(cz_hat(n, z), n, scratch);
    const GradedOperator c_hat_inv = lift(cz_hat_inverse(n, z), n, scratch);
    const GradedOperator conj_c = c_hat.compose(qhat_power(n, scratch, -1));
    const GradedOperator conj_c_inv = qhat_power(n, scratch, 1).compose(c_hat_inv);
    const GradedOperator shifted = lhs_product(1, conj_c, conj_c_inv, work, work, work + 1, y);
    const GradedOperator base = lhs_product(0, c_hat, c_hat_inv, work, work, work + 1, y);
    const GradedOperator target = base.compose(conj_c.truncated(work)) * -1.0;
    res.merge(compare_graded(shifted.truncated(degree), target.truncated(degree), tol, false));
    res.finalize();
    return res;
}

// ---------------------------------------------------------------- combinatorial lemmas

BijectionData lemma_bijection(const Partition& lam, int p) {
    BijectionData b;
    for (int j = 0;; ++j) {
        const int v = lam.col(j + 1) - j + p;
        if (v < 1) break;
        b.n_list.push_back(v);
    }
    std::vector<int> ks;
    for (int i = 1;; ++i) {
        const int v = lam.row(i) - i - p;
        if (v < 0) break;
        ks.push_back(v);
    }
    b.r = int(b.n_list.size());
    b.s = int(ks.size());
    b.k_list.assign(ks.rbegin(), ks.rend());  // k_{s-i} = lambda_i - i - p
    return b;
}

std::pair<Partition, int> lemma_bijection_inverse(const std::vector<int>& n_list, const std::vector<int>& k_list) {
    for (std::size_t i = 0; i < n_list.size(); ++i)
        if (n_list[i] < 1 || (i && n_list[i] >= n_list[i - 1]))
            throw DomainError("n-list must be strictly decreasing and positive");
    for (std::size_t i = 0; i < k_list.size(); ++i)
        if (k_list[i] < 0 || (i && k_list[i] <= k_list[i - 1]))
            throw DomainError("k-list must be strictly increasing and nonnegative");
    const int p = int(n_list.size()) - int(k_list.size());
    // Occupied sites lambda_i - i - p: the k's, then every negative site except -n_j.
    std::set<int> holes;
    for (int v : n_list) holes.insert(-v);
    int lowest = -1;
    for (int v : n_list) lowest = std::min(lowest, -v);
    std::vector<int> sites(k_list.rbegin(), k_list.rend());
    const int depth = lowest - int(n_list.size() + k_list.size()) - std::abs(p) - 2;
    for (int v = -1; v >= depth; --v)
        if (!holes.count(v)) sites.push_back(v);
    std::vector<int> rows;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const int r = sites[i] + int(i) + 1 + p;
        if (r < 0) throw DomainError("lists do not describe a diagram");
        if (r > 0) rows.push_back(r);
    }
    return {Partition(rows), p};
}

cplx lemma_lhs(const Partition& lam, int p, int omega, const YOracle& y) {
    const BijectionData b = lemma_bijection(lam, p);
    cplx v = 1.0;
    for (int j = 0; j < b.r; ++j) {
        const int nj = b.n_list[j];
        v *= y(omega + 1 - j, nj, 1 - j) / y(omega - j, nj - 1, -j);
    }
    v *= y(omega + 1 - b.r, 0, 1 - b.r);
    for (int i = 1; i <= b.s; ++i) {
        const int li = lam.row(i);
        const int ki = li - i - p;
        v *= y(omega + 1 - li, -(ki + 1), 1 - li) / y(omega + 1 - li, -ki, 1 - li);
    }
    return v;
}

cplx lemma_rhs(const Partition& lam, int p, int omega, const YOracle& y) {
    const int width = lam.row(1);
    cplx v = y(omega + 1 - width, p - width, 1 - width);
    for (int j = 1; j <= width; ++j) {
        const int h = lam.col(j);
        v *= y(omega + 2 - j, h - j + 1 + p, 2 - j) / y(omega + 1 - j, h - j + p, 1 - j);
    }
    return v;
}

CheckResult lemma_lhs_rhs(const Partition& lam, int p, int omega, const YOracle& y, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const cplx a = lemma_lhs(lam, p, omega, y);
    const cplx b = lemma_rhs(lam, p, omega, y);
    res.record(std::abs(a - b) / std::max(std::abs(a), std::abs(b)), "p=" + std::to_string(p));
    res.finalize();
    return res;
}

Multidegree lemma_fugacity_lhs(const Partition& lam, int p, int omega, int n) {
    const BijectionData b = lemma_bijection(lam, p);
    Multidegree d(n, 0);
    for (int j = 0; j < b.r; ++j) d[mod_n(omega - j, n)] += b.n_list[j];
    for (int i = 1; i <= b.s; ++i)
        for (int j = 0; j < lam.row(i) - i - p; ++j) d[mod_n(omega - i - j - p, n)] += 1;
    return d;
}

Multidegree lemma_fugacity_rhs(const Partition& lam, int p, int omega, int n) {
    Multidegree d = diagram_grading(lam, omega, n);
    const Multidegree pre = shift_prefactor_grading(p, omega, n);
    for (int i = 0; i < n; ++i) d[i] += pre[i];
    return d;
}

CheckResult lemma_fugacity(const Partition& lam, int p, int omega, int n) {
    CheckResult res;
    res.tolerance = 0.0;
    const Multidegree a = lemma_fugacity_lhs(lam, p, omega, n);
    const Multidegree b = lemma_fugacity_rhs(lam, p, omega, n);
    double diff = 0.0;
    for (int i = 0; i < n; ++i) diff += std::abs(a[i] - b[i]);
    res.record(diff, "p=" + std::to_string(p) + " omega=" + std::to_string(omega));
    res.finalize();
    return res;
}

// ---------------------------------------------------------------- matrix Jacobi identity

std::vector<cplx> b_weights(const PhaseSpacePoint& pt, int n_terms) {
    std::vector<cplx> b(pt.n());
    for (int w = 0; w < pt.n(); ++w) {
        cplx prod = 1.0;
        for (int l = 1; l <= n_terms; ++l) {
            const cplx f = 1.0 - pt.x_ext(w) / pt.x_ext(w - l);
            if (std::abs(f) < 1e-300) throw DegeneratePoint("B weight factor vanishes");
            prod *= f;
        }
        b[w] = 1.0 / prod;
    }
    return b;
}

Matrix jacobi_product(const PhaseSpacePoint& pt, cplx z, int n_terms) {
    const int n = pt.n();
    const Matrix q = diag_matrix(pt.fugacities());
    const Matrix c = cyclic_z(n, z);
    const Matrix ci = c.inverse();
    const Matrix one = Matrix::Identity(n, n);
    Matrix left = one;
    Matrix qn = one;
    std::vector<Matrix> factors;
    for (int k = 1; k <= n_terms; ++k) {
        qn = qn * q;
        factors.push_back(one - qn * ci);
    }
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) left = left * *it;
    Matrix right = one;
    Matrix qc = one;    // (Q C^{-1})^k
    Matrix cpow = c;    // C^{k+1}
    for (int k = 0; k <= n_terms; ++k) {
        right = right * (one - qc * cpow);
        qc = qc * q * ci;
        cpow = cpow * c;
    }
    return left * right;
}

Matrix jacobi_sum(const PhaseSpacePoint& pt, cplx z, int n_terms) {
    const int n = pt.n();
    const Matrix q = diag_matrix(pt.fugacities());
    const Matrix c = cyclic_z(n, z);
    const Matrix ci = c.inverse();
    const Matrix bh = diag_matrix(b_weights(pt, 4 * n_terms + 8));
    const Matrix one = Matrix::Identity(n, n);
    auto mpow = [&](const Matrix& m, int k) {
        Matrix r = one;
        for (int i = 0; i < k; ++i) r = r * m;
        return r;
    };
    Matrix out = Matrix::Zero(n, n);
    for (int s = 0; s <= n_terms; ++s) {
        Matrix t = one;
        for (int k = 0; k < s; ++k) t = t * mpow(q, s - k) * ci;
        out += (s % 2 ? -1.0 : 1.0) * bh * t;
    }
    for (int s = 1; s <= n_terms; ++s) {
        Matrix t = one;
        for (int k = 1; k < s; ++k) t = t * mpow(c, k) * mpow(q * ci, k);
        out += (s % 2 ? -1.0 : 1.0) * bh * t * mpow(c, s);
    }
    return out;
}

JacobiReport jacobi_identity(const PhaseSpacePoint& pt, cplx z, int n_terms, double tol) {
    pt.validate();
    const Matrix prod = jacobi_product(pt, z, n_terms);
    const Matrix sum = jacobi_sum(pt, z, n_terms);
    JacobiReport rep;
    rep.product_vs_sum.tolerance = tol;
    compare_matrices(rep.product_vs_sum, prod, sum, "D1");
    rep.product_vs_sum.finalize();

    rep.determinant.tolerance = tol;
    const cplx det = prod.determinant();
    const cplx expect = theta(1.0 / z, pt.nome) / euler_product(pt.nome);
    rep.determinant.record(rel_error(std::abs(det - expect), std::abs(det), std::abs(expect)), "det D1");
    rep.determinant.finalize();

    if (pt.n() == 1) {
        // sum_n (-z)^n q^{n(n-1)/2} / prod(1-q^n) = prod_{n>=0} (1 - q^n z)(1 - q^{n+1}/z), at 1/z
        const cplx q = pt.nome;
        const cplx w = 1.0 / z;
        cplx series = 0.0;
        for (int k = -n_terms; k <= n_terms; ++k) series += std::pow(-w, k) * std::pow(q, k * (k - 1) / 2);
        cplx euler = 1.0, product = 1.0;
        for (int k = 1; k <= n_terms; ++k) euler *= 1.0 - std::pow(q, k);
        for (int k = 0; k <= n_terms; ++k) product *= (1.0 - std::pow(q, k) * w) * (1.0 - std::pow(q, k + 1) / w);
        rep.triple_product.tolerance = std::min(tol, 1e-12);
        rep.triple_product.record(
            rel_error(std::abs(series / euler - product), std::abs(series / euler), std::abs(product)),
            "triple product");
        rep.triple_product.record(rel_error(std::abs(det - product), std::abs(det), std::abs(product)),
                                  "det vs triple product");
        rep.triple_product.finalize();
    }
    return rep;
}

}  // namespace qqlax
