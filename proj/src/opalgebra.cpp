#include "qqlax/opalgebra.hpp"

#include <mutex>
#include <numeric>

#include "qqlax/errors.hpp"

namespace qqlax {

int total_degree(const Multidegree& d) { return std::accumulate(d.begin(), d.end(), 0); }

namespace {

Multidegree add_degrees(const Multidegree& a, const Multidegree& b) {
    Multidegree r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

}  // namespace

// ---------------------------------------------------------------- series

FugacitySeries::FugacitySeries(int n_vars, int max_degree) : n_vars_(n_vars), max_degree_(max_degree) {
    if (n_vars < 1 || max_degree < 0) throw DomainError("FugacitySeries: bad shape");
}

FugacitySeries FugacitySeries::constant(int n_vars, int max_degree, cplx c) {
    FugacitySeries s(n_vars, max_degree);
    s.add(Multidegree(n_vars, 0), c);
    return s;
}

FugacitySeries FugacitySeries::monomial(int max_degree, const Multidegree& d, cplx c) {
    FugacitySeries s(int(d.size()), max_degree);
    s.add(d, c);
    return s;
}

cplx FugacitySeries::coeff(const Multidegree& d) const {
    auto it = coeffs_.find(d);
    return it == coeffs_.end() ? cplx(0.0) : it->second;
}

void FugacitySeries::add(const Multidegree& d, cplx c) {
    if (int(d.size()) != n_vars_) throw DomainError("FugacitySeries: multidegree length mismatch");
    for (int e : d)
        if (e < 0) throw DomainError("FugacitySeries: negative exponent");
    if (total_degree(d) > max_degree_) return;
    coeffs_[d] += c;
}

FugacitySeries FugacitySeries::operator+(const FugacitySeries& o) const {
    FugacitySeries r(n_vars_, std::min(max_degree_, o.max_degree_));
    for (const auto& [d, c] : coeffs_) r.add(d, c);
    for (const auto& [d, c] : o.coeffs_) r.add(d, c);
    return r;
}

FugacitySeries FugacitySeries::operator-(const FugacitySeries& o) const { return *this + o * -1.0; }

FugacitySeries FugacitySeries::operator*(cplx s) const {
    FugacitySeries r(n_vars_, max_degree_);
    for (const auto& [d, c] : coeffs_) r.add(d, c * s);
    return r;
}

FugacitySeries series_mul(const FugacitySeries& a, const FugacitySeries& b) {
    if (a.n_vars() != b.n_vars()) throw DomainError("series_mul: variable count mismatch");
    FugacitySeries r(a.n_vars(), std::min(a.max_degree(), b.max_degree()));
    for (const auto& [da, ca] : a.coeffs())
        for (const auto& [db, cb] : b.coeffs())
            if (total_degree(da) + total_degree(db) <= r.max_degree()) r.add(add_degrees(da, db), ca * cb);
    return r;
}

FugacitySeries FugacitySeries::inverse() const {
    const cplx c0 = coeff(Multidegree(n_vars_, 0));
    if (c0 == cplx(0.0)) throw DomainError("FugacitySeries::inverse: zero constant term");
    // 1/(c0 (1 + r)) = c0^{-1} sum_k (-r)^k, r has no constant term
    FugacitySeries r(n_vars_, max_degree_);
    for (const auto& [d, c] : coeffs_)
        if (total_degree(d) > 0) r.add(d, -c / c0);
    FugacitySeries acc = constant(n_vars_, max_degree_, 1.0);
    FugacitySeries power = acc;
    for (int k = 1; k <= max_degree_; ++k) {
        power = series_mul(power, r);
        acc = acc + power;
    }
    return acc * (1.0 / c0);
}

cplx FugacitySeries::evaluate(const std::vector<cplx>& values) const {
    if (int(values.size()) != n_vars_) throw DomainError("FugacitySeries::evaluate: arity mismatch");
    cplx s = 0.0;
    for (const auto& [d, c] : coeffs_) {
        cplx t = c;
        for (int i = 0; i < n_vars_; ++i)
            for (int e = 0; e < d[i]; ++e) t *= values[i];
        s += t;
    }
    return s;
}

std::vector<cplx> FugacitySeries::by_total_degree() const {
    std::vector<cplx> out(max_degree_ + 1, 0.0);
    for (const auto& [d, c] : coeffs_) out[total_degree(d)] += c;
    return out;
}

// ---------------------------------------------------------------- shift operators

// The wrapped function lives in the shared cache, so copies of the result are cheap even when
// `f` captures a deep tree of other coefficients.
ShiftOperator::Coeff memoize(ShiftOperator::Coeff f) {
    struct Cache {
        std::mutex mu;
        std::map<int, Matrix> table;
        ShiftOperator::Coeff fn;
    };
    auto cache = std::make_shared<Cache>();
    cache->fn = std::move(f);
    return [cache](int k) -> Matrix {
        {
            std::lock_guard<std::mutex> lock(cache->mu);
            auto it = cache->table.find(k);
            if (it != cache->table.end()) return it->second;
        }
        Matrix v = cache->fn(k);
        std::lock_guard<std::mutex> lock(cache->mu);
        return cache->table.emplace(k, std::move(v)).first->second;
    };
}

ShiftOperator ShiftOperator::identity(int n) { return constant(Matrix::Identity(n, n), 0); }

ShiftOperator ShiftOperator::constant(const Matrix& m, int shift) {
    ShiftOperator op(int(m.rows()));
    op.terms_[shift] = [m](int) { return m; };
    return op;
}

ShiftOperator ShiftOperator::function(int n, Coeff f, int shift) {
    ShiftOperator op(n);
    op.terms_[shift] = memoize(std::move(f));
    return op;
}

Matrix ShiftOperator::at(int shift, int k) const {
    auto it = terms_.find(shift);
    return it == terms_.end() ? Matrix(Matrix::Zero(n_, n_)) : it->second(k);
}

void ShiftOperator::add(int shift, Coeff f) {
    auto it = terms_.find(shift);
    if (it == terms_.end()) {
        terms_[shift] = std::move(f);
        return;
    }
    Coeff g = it->second;
    it->second = memoize([g, f](int k) -> Matrix { return g(k) + f(k); });
}

ShiftOperator ShiftOperator::operator+(const ShiftOperator& o) const {
    ShiftOperator r = *this;
    for (const auto& [s, f] : o.terms_) r.add(s, f);
    return r;
}

ShiftOperator ShiftOperator::operator*(cplx c) const {
    ShiftOperator r(n_);
    for (const auto& [s, f] : terms_) r.terms_[s] = memoize([f, c](int k) -> Matrix { return f(k) * c; });
    return r;
}

ShiftOperator ShiftOperator::operator-(const ShiftOperator& o) const { return *this + o * -1.0; }

ShiftOperator shiftop_compose(const ShiftOperator& a, const ShiftOperator& b, int window, ClipReport* clip) {
    if (a.dim() != b.dim()) throw DomainError("shiftop_compose: dimension mismatch");
    std::map<int, std::vector<std::pair<ShiftOperator::Coeff, std::pair<ShiftOperator::Coeff, int>>>> parts;
    for (const auto& [s, fa] : a.terms())
        for (const auto& [t, fb] : b.terms()) parts[s + t].push_back({fa, {fb, s}});
    ShiftOperator r(a.dim());
    for (auto& [shift, list] : parts) {
        auto f = memoize([list](int k) -> Matrix {
            Matrix acc = list.front().first(k) * list.front().second.first(k + list.front().second.second);
            for (std::size_t i = 1; i < list.size(); ++i)
                acc += list[i].first(k) * list[i].second.first(k + list[i].second.second);
            return acc;
        });
        if (window >= 0 && std::abs(shift) > window) {
            if (clip) {
                ++clip->events;
                clip->max_clipped_norm = std::max(clip->max_clipped_norm, f(0).norm());
            }
            continue;
        }
        r.add(shift, f);
    }
    return r;
}

// ---------------------------------------------------------------- graded operators

GradedOperator::GradedOperator(int n_vars, int max_degree, int dim)
    : n_vars_(n_vars), max_degree_(max_degree), dim_(dim) {}

GradedOperator GradedOperator::identity(int n_vars, int max_degree, int dim) {
    GradedOperator g(n_vars, max_degree, dim);
    g.add(Multidegree(n_vars, 0), ShiftOperator::identity(dim));
    return g;
}

void GradedOperator::add(const Multidegree& d, const ShiftOperator& op) {
    if (int(d.size()) != n_vars_) throw DomainError("GradedOperator: multidegree length mismatch");
    if (total_degree(d) > max_degree_ || op.empty()) return;
    auto it = terms_.find(d);
    if (it == terms_.end())
        terms_.emplace(d, op);
    else
        it->second = it->second + op;
}

GradedOperator GradedOperator::operator+(const GradedOperator& o) const {
    GradedOperator r = *this;
    r.max_degree_ = std::min(max_degree_, o.max_degree_);
    for (const auto& [d, op] : o.terms_) r.add(d, op);
    return r;
}

GradedOperator GradedOperator::operator*(cplx s) const {
    GradedOperator r(n_vars_, max_degree_, dim_);
    for (const auto& [d, op] : terms_) r.add(d, op * s);
    return r;
}

GradedOperator GradedOperator::operator-(const GradedOperator& o) const { return *this + o * -1.0; }

GradedOperator GradedOperator::truncated(int max_degree) const {
    GradedOperator r(n_vars_, std::min(max_degree, max_degree_), dim_);
    for (const auto& [d, op] : terms_) r.add(d, op);
    return r;
}

GradedOperator GradedOperator::compose(const GradedOperator& o) const {
    GradedOperator r(n_vars_, std::min(max_degree_, o.max_degree_), dim_);
    for (const auto& [da, a] : terms_)
        for (const auto& [db, b] : o.terms_)
            if (total_degree(da) + total_degree(db) <= r.max_degree_) r.add(add_degrees(da, db), shiftop_compose(a, b));
    return r;
}

// ---------------------------------------------------------------- phase space / structural

cplx PhaseSpacePoint::x_ext(int index) const {
    const int n = this->n();
    int w = index % n;
    int wraps = index / n;
    if (w < 0) {
        w += n;
        wraps -= 1;
    }
    return x[w] * std::pow(nome, wraps);
}

std::vector<cplx> PhaseSpacePoint::fugacities() const {
    std::vector<cplx> q(n());
    for (int w = 0; w < n(); ++w) q[w] = x_ext(w) / x_ext(w - 1);
    return q;
}

bool PhaseSpacePoint::in_chamber() const {
    for (int w = 0; w < n(); ++w)
        if (!(std::abs(x_ext(w)) < std::abs(x_ext(w - 1)))) return false;
    return true;
}

void PhaseSpacePoint::validate() const {
    if (x.empty()) throw ConfigError("phase-space point needs at least one position");
    if (p.size() != x.size()) throw ConfigError("momenta and positions differ in length");
    elliptic().validate();
    if (nome == cplx(0.0) && n() == 1) throw ConfigError("N = 1 requires a nonzero nome");
    for (int w = 0; w < n(); ++w) {
        if (x[w] == cplx(0.0)) throw DegeneratePoint("position x_w vanishes");
        for (int v = 0; v < w; ++v)
            if (x[w] == x[v]) throw DegeneratePoint("coincident positions");
    }
    if (!in_chamber()) throw ConfigError("point is outside the stability chamber |x_0| > ... > |x_{N-1}| > |q x_0|");
}

Matrix cyclic(int n) {
    Matrix c = Matrix::Zero(n, n);
    for (int w = 0; w < n; ++w) c(w, (w + 1) % n) = 1.0;
    return c;
}

Matrix cyclic_z(int n, cplx z) {
    if (z == cplx(0.0)) throw DomainError("cyclic_z: z = 0");
    Matrix c = cyclic(n);
    c(n - 1, 0) = 1.0 / z;
    return c;
}

Matrix sz_matrix(int n, cplx z) {
    Matrix s = Matrix::Zero(n, n);
    for (int w = 0; w < n; ++w) s(w, w) = std::pow(z, double(w) / n);
    return s;
}

Matrix diag_matrix(const std::vector<cplx>& d) {
    Matrix m = Matrix::Zero(int(d.size()), int(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix structural_matrix(Structural kind, const PhaseSpacePoint& pt, cplx z) {
    const int n = pt.n();
    for (int w = 0; w < n; ++w)
        if (pt.x[w] == cplx(0.0)) throw DegeneratePoint("position x_w vanishes");
    switch (kind) {
        case Structural::X: return diag_matrix(pt.x);
        case Structural::P: return diag_matrix(pt.p);
        case Structural::Qhat: return diag_matrix(pt.fugacities());
        case Structural::C: return cyclic(n);
        case Structural::Cz: return cyclic_z(n, z);
        case Structural::Sz: return sz_matrix(n, z);
        case Structural::CzHat: throw DomainError("CzHat is an operator; use cz_hat()");
    }
    return Matrix();
}

ShiftOperator cz_hat(int n, cplx z) { return ShiftOperator::constant(cyclic_z(n, z), +1); }

ShiftOperator cz_hat_inverse(int n, cplx z) { return ShiftOperator::constant(cyclic_z(n, z).inverse(), -1); }

}  // namespace qqlax
