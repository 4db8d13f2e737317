#include "qqlax/limits.hpp"

#include <Eigen/LU>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qqlax/elliptic.hpp"
#include "qqlax/errors.hpp"
#include "qqlax/factorization.hpp"
#include "qqlax/laxphase.hpp"

namespace qqlax {

namespace {

constexpr int kModes = 64;

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

cplx guarded(cplx num, cplx den, const char* what) {
    if (std::abs(den) < 1e-300) throw PoleError(what);
    return num / den;
}

// Fourier modes 0..kmax of f on |z| = r: (1/K) sum f(z_j) z_j^{-k}.
template <class F>
std::vector<Matrix> modes(F&& f, double r, int kmax) {
    std::vector<Matrix> acc(kmax + 1);
    for (int j = 0; j < kModes; ++j) {
        const cplx z = std::polar(r, 2.0 * std::numbers::pi * (j + 0.5) / kModes);
        const Matrix v = f(z);
        for (int k = 0; k <= kmax; ++k) {
            const Matrix t = v * std::pow(z, -k);
            acc[k] = j == 0 ? t : Matrix(acc[k] + t);
        }
    }
    for (Matrix& a : acc) a /= double(kModes);
    return acc;
}

PhaseSpacePoint trig_copy(const PhaseSpacePoint& pt) {
    PhaseSpacePoint t = pt;
    t.nome = 0.0;
    return t;
}

}  // namespace

cplx YModel::y(int omega, cplx x) const {
    cplx out = 1.0;
    for (cplx a : roots[mod_n(omega, n())]) out *= vartheta(x - a, ep);
    return out;
}

cplx YModel::total(cplx x) const {
    cplx out = 1.0;
    for (int w = 0; w < n(); ++w) out *= y(w, x);
    return out;
}

cplx chi_from_model(int omega, cplx x, const YModel& model, const std::vector<cplx>& fugacities, cplx m,
                    int max_len) {
    const int n = model.n();
    if (int(fugacities.size()) != n) throw ConfigError("chi_from_model: fugacity count differs from N");
    // diagrams of size > k weigh at most qmax^k
    double qmax = 0.0;
    for (cplx q : fugacities) qmax = std::max(qmax, std::abs(q));
    int len_cap = max_len;
    if (qmax < 1.0 && qmax > 0.0) len_cap = std::min(max_len, int(std::ceil(std::log(1e-18) / std::log(qmax))) + 1);
    if (qmax == 0.0) len_cap = 0;

    // Y_c(x + t m) for t in [-len_cap - 1, len_cap + 1]
    const int off = len_cap + 1;
    std::vector<std::vector<cplx>> ytab(n, std::vector<cplx>(2 * off + 1));
    for (int c = 0; c < n; ++c)
        for (int t = -off; t <= off; ++t) ytab[c][t + off] = model.y(c, x + m * double(t));
    auto y = [&](int c, int t) { return ytab[mod_n(c, n)][t + off]; };

    // acc[L]: summed weight of columns j..len_cap with column j of length L
    std::vector<cplx> acc(len_cap + 1, 0.0);
    acc[0] = 1.0;
    std::vector<cplx> next(len_cap + 1);
    for (int j = len_cap; j >= 1; --j) {
        const int c = omega + 2 - j;
        const cplx q = fugacities[mod_n(omega + 1 - j, n)];
        const cplx top0 = y(c, 1 - j);
        const cplx bot0 = y(c - 1, -j);
        cplx below = 0.0;
        cplx qpow = 1.0;
        for (int len = 0; len <= len_cap; ++len) {
            below += acc[len];
            if (len == 0) {
                next[0] = below;
                continue;
            }
            qpow *= q;
            next[len] = qpow * guarded(y(c, len + 1 - j), top0, "chi_from_model: pole") *
                        guarded(bot0, y(c - 1, len - j), "chi_from_model: pole") * below;
        }
        std::swap(acc, next);
    }
    cplx sum = 0.0;
    for (cplx v : acc) sum += v;
    return model.y(omega + 1, x) * sum;
}

TrigData d_trig(cplx x, const PhaseSpacePoint& pt, const CharacterFn& chi, const std::vector<double>& radii,
                double tol) {
    if (pt.nome != cplx(0.0)) throw ConfigError("d_trig needs nome = 0");
    if (radii.empty()) throw ConfigError("d_trig: no probe radii");
    const int n = pt.n();
    auto dz = [&](cplx z) { return d_from_characters(x, z, pt, chi); };
    TrigData out;
    bool first = true;
    double scale = 1.0;
    for (double r : radii) {
        const std::vector<Matrix> md = modes(dz, r, n + 1);
        if (first) {
            out.d = md[0];
            scale = std::max(1.0, max_abs(out.d));
            first = false;
        }
        out.spread = std::max(out.spread, max_abs(md[0] - out.d) / scale);
        for (int k = 1; k <= n + 1; ++k) out.spread = std::max(out.spread, max_abs(md[k]) * std::pow(r, k) / scale);
    }
    if (!(out.spread <= tol))
        throw NotZIndependent("q -> 0 matrix depends on z at large |z| (spread " + std::to_string(out.spread) + ")");
    out.minors.assign(n + 1, 1.0);
    for (int k = 1; k <= n; ++k) out.minors[k] = out.d.topLeftCorner(k, k).determinant();
    return out;
}

TrigReport trig_model_checks(const PhaseSpacePoint& pt_in, const YModel& model, cplx x, cplx z, double tol) {
    const PhaseSpacePoint pt = trig_copy(pt_in);
    pt.validate();
    if (model.n() != pt.n()) throw ConfigError("trig_model_checks: model and point disagree on N");
    const int n = pt.n();
    const std::vector<cplx> fug = pt.fugacities();
    const CharacterFn chi = [&](int w, cplx y) { return chi_from_model(w, y, model, fug, pt.m); };

    TrigReport rep;
    rep.z_independence.tolerance = 1e-8;
    rep.y_recovery.tolerance = tol;
    rep.determinant.tolerance = tol;

    const TrigData td = d_trig(x, pt, chi, {1e2, 1e3, 1e4}, 1.0);
    rep.z_independence.record(td.spread, "z^0 mode spread");
    for (int k = 1; k <= n; ++k) {
        const cplx ratio = td.minors[k] / td.minors[k - 1];
        const cplx y = model.y(k, x);
        rep.y_recovery.record(rel_error(std::abs(ratio - y), std::abs(ratio), std::abs(y)), "Q" + std::to_string(k));
    }
    const cplx det = d_from_characters(x, z, pt, chi).determinant();
    const cplx expect = model.total(x) - model.total(x - pt.m) / z;
    rep.determinant.record(rel_error(std::abs(det - expect), std::abs(det), std::abs(expect)), "det D(x, z)");
    for (CheckResult* c : {&rep.z_independence, &rep.y_recovery, &rep.determinant}) c->finalize();
    return rep;
}

CheckResult trig_spectrum_check(const PhaseSpacePoint& pt_in, cplx x, double tol) {
    const PhaseSpacePoint pt = trig_copy(pt_in);
    pt.validate();
    const int n = pt.n();
    const CharacterFn chi = [&](int w, cplx y) { return chi_classical(w, y, pt); };
    const TrigData td = d_trig(x, pt, chi);
    cplx expect;
    const double r = 1e2;
    switch (pt.kernel) {
        case Kernel::FourD: {
            const Matrix l = modes([&](cplx z) { return lax_cm(pt, z, LaxSource::Explicit); }, r, 0)[0];
            expect = (x * Matrix::Identity(n, n) - l).determinant();
            break;
        }
        case Kernel::FiveD: {
            const Matrix l = modes([&](cplx z) { return lax_rs(pt, z, RsSource::Explicit); }, r, 0)[0];
            expect = (Matrix::Identity(n, n) - std::exp(-pt.beta * x) * l).determinant();
            break;
        }
        case Kernel::SixD: throw ConfigError("trig_spectrum_check: no finite Lax matrix for the 6d kernel");
    }
    CheckResult res;
    res.tolerance = tol;
    const cplx qn = td.minors[n];
    res.record(rel_error(std::abs(qn - expect), std::abs(qn), std::abs(expect)), "Q_N vs Lax spectrum");
    res.finalize();
    return res;
}

BetheResidual bethe_residual(const std::function<cplx(int, cplx)>& q_fn, int omega, cplx x,
                             const std::vector<cplx>& twists, cplx m) {
    const int n = int(twists.size());
    if (omega < 1 || omega >= n) throw DomainError("bethe_residual: need 1 <= omega <= N - 1");
    auto q = [&](int k, cplx y) { return q_fn(k, y); };
    const cplx t = twists[omega];
    BetheResidual out;
    out.substituted = t * guarded(q(omega + 1, x + m) * q(omega, x - m) * q(omega - 1, x),
                                  q(omega, x + m) * q(omega - 1, x - m) * q(omega + 1, x), "Bethe residual: pole");
    // at a zero of Q_w the Y form is 0/0; only the cancelled form is defined there
    if (std::abs(q(omega, x)) < 1e-300) {
        out.limit_shape = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    } else {
        auto y = [&](int k, cplx v) { return guarded(q(k, v), q(k - 1, v), "Bethe residual: pole"); };
        out.limit_shape = t * guarded(y(omega + 1, x + m) * y(omega, x - m), y(omega + 1, x) * y(omega, x),
                                      "Bethe residual: pole");
    }
    out.as_displayed = t * guarded(q(omega + 1, x + m) * q(omega, x - m) * q(omega - 1, x),
                                   q(omega + 1, x) * q(omega, x + m) * q(omega, x - m), "Bethe residual: pole");
    return out;
}

SpinLaxWindow spin_lax(cplx x, int window, const PhaseSpacePoint& pt, const YModel& model) {
    pt.validate();
    if (window < 0 || window > 40) throw ConfigError("spin_lax: window must be in [0, 40]");
    const int n = pt.n();
    const int dim = 2 * window + 1;
    const std::vector<cplx> fug = pt.fugacities();
    SpinLaxWindow out;
    out.window = window;
    for (int w = 1; w <= n; ++w) {
        Matrix l = Matrix::Zero(dim, dim);
        const cplx q = fug[mod_n(w, n)];
        for (int i = 0; i < dim; ++i) {
            const int k = i - window;
            const cplx den = model.y(w + 1, x + double(k) * pt.m);
            if (std::abs(den) < 1e-300) throw SingularWindow("spin_lax: Y vanishes on the window");
            const cplx d = std::pow(q, -k) * model.y(w, x + double(k - 1) * pt.m) / den;
            if (std::abs(d) < 1e-300) throw SingularWindow("spin_lax: zero diagonal entry");
            l(i, i) = d;
            if (i + 1 < dim) l(i, i + 1) = d;
        }
        out.ops.push_back(std::move(l));
    }
    return out;
}

cplx spin_chain_det(cplx x, cplx z, int window, const PhaseSpacePoint& pt, const YModel& model) {
    const SpinLaxWindow sl = spin_lax(x, window, pt, model);
    const int dim = 2 * window + 1;
    Matrix prod = Matrix::Identity(dim, dim);
    for (const Matrix& l : sl.ops) prod = prod * l;
    const Matrix t = prod.inverse();
    return Eigen::PartialPivLU<Matrix>(Matrix::Identity(dim, dim) - z * t).determinant();
}

DualityReport duality_ratio_check(const PhaseSpacePoint& pt, const YModel& model, cplx x, cplx z, int small_window,
                                  int large_window, double tol) {
    pt.validate();
    if (model.n() != pt.n()) throw ConfigError("duality_ratio_check: model and point disagree on N");
    if (pt.kernel == Kernel::SixD) throw ConfigError("duality_ratio_check: 4d and 5d kernels only");
    const std::vector<cplx> fug = pt.fugacities();
    const CharacterFn chi = [&](int w, cplx y) { return chi_from_model(w, y, model, fug, pt.m); };
    const cplx m = pt.m;

    DualityReport rep;
    rep.structure.tolerance = 1e-12;
    rep.product.tolerance = 1e-9;
    rep.ratio.tolerance = tol;
    rep.decay.tolerance = 1e-3;

    const SpinLaxWindow sl = spin_lax(x, large_window, pt, model);
    for (std::size_t w = 0; w < sl.ops.size(); ++w) {
        const Matrix& l = sl.ops[w];
        double off = 0.0;
        cplx diag = 1.0;
        for (int i = 0; i < l.rows(); ++i) {
            diag *= l(i, i);
            for (int j = 0; j < l.cols(); ++j)
                if (j != i && j != i + 1) off = std::max(off, std::abs(l(i, j)));
        }
        rep.structure.record(off, "L" + std::to_string(w + 1) + " outside bidiagonal");
        const cplx det = Eigen::PartialPivLU<Matrix>(l).determinant();
        rep.structure.record(rel_error(std::abs(det - diag), std::abs(det), std::abs(diag)),
                             "L" + std::to_string(w + 1) + " determinant");
    }

    auto closed = [&](cplx y, int window) {
        cplx out = 1.0;
        for (int k = -window; k <= window; ++k)
            out *= 1.0 - z * std::pow(pt.nome, k) * model.total(y + double(k) * m) / model.total(y + double(k - 1) * m);
        return out;
    };
    const cplx sd = spin_chain_det(x, z, large_window, pt, model);
    const cplx cl = closed(x, large_window);
    rep.product.record(rel_error(std::abs(sd - cl), std::abs(sd), std::abs(cl)), "det(1 - z T_N)");

    const cplx lhs = d_from_characters(x + m, z, pt, chi).determinant() / d_from_characters(x, z, pt, chi).determinant();
    auto errors = [&](int window) {
        const cplx bare = spin_chain_det(x + m, z, window, pt, model) / spin_chain_det(x, z, window, pt, model);
        const double edge_m = double(window);
        const cplx edge = model.total(x - edge_m * m) / model.total(x - (edge_m + 1.0) * m);
        const cplx full = bare * edge;
        return std::pair{rel_error(std::abs(full - lhs), std::abs(full), std::abs(lhs)),
                         rel_error(std::abs(bare - lhs), std::abs(bare), std::abs(lhs))};
    };
    std::tie(rep.error_small, rep.literal_small) = errors(small_window);
    std::tie(rep.error_large, rep.literal_large) = errors(large_window);
    rep.ratio.record(rep.error_large, "M = " + std::to_string(large_window));
    rep.decay.record(rep.error_small > 0.0 ? rep.error_large / rep.error_small : 0.0,
                     "M = " + std::to_string(small_window) + " -> " + std::to_string(large_window));
    for (CheckResult* c : {&rep.structure, &rep.product, &rep.ratio, &rep.decay}) c->finalize();
    return rep;
}

}  // namespace qqlax
