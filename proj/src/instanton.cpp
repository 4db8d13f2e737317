#include "qqlax/instanton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qqlax/errors.hpp"

namespace qqlax {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

// A fixed-point contribution split into an x-independent factor and the linear-in-x
// kernel factors vartheta(x + offset)^(-mult).
struct XTerm {
    cplx constant{1.0};
    std::vector<std::pair<cplx, long long>> xfactors;
    std::vector<Weight> pole_weights;  // x-free parts of denominators
};

XTerm split_term(const VirtualCharacter& ch, const ParamAssignment& params, cplx fugacity) {
    XTerm t;
    VirtualCharacter fixed(ch.n_colors());
    for (const auto& [w, c] : ch.terms()) {
        if (w.x == 0) {
            fixed.add_term(w, c);
            continue;
        }
        if (w.x != 1) throw DomainError("observable character has x coefficient other than 1");
        Weight rest = w;
        rest.x = 0;
        t.xfactors.emplace_back(params.eval(rest), c);
        if (c > 0) t.pole_weights.push_back(rest);
    }
    t.constant = fugacity * pleth_exp(fixed, params);
    return t;
}

cplx eval_term(const XTerm& t, cplx x, const EllipticParams& ell) {
    cplx num = 1.0, den = 1.0;
    for (const auto& [off, c] : t.xfactors) {
        const cplx v = vartheta(x + off, ell);
        const long long k = c < 0 ? -c : c;
        cplx p = 1.0;
        for (long long i = 0; i < k; ++i) p *= v;
        if (c < 0)
            num *= p;
        else
            den *= p;
    }
    if (den == cplx(0.0)) throw PoleError("observable evaluated on a pole");
    return t.constant * num / den;
}

// Contributions of fixed points with total fugacity order k; fugacity set to 1.
std::vector<XTerm> order_terms(Observable obs, const InstantonConfig& cfg, int k, const Partition* dropped) {
    std::vector<XTerm> out;
    const int n = cfg.n_colors;
    for (int big = 0; big <= k; ++big) {
        const int rest = k - big;
        if (obs == Observable::Y && rest != 0) continue;
        for (const Tuple& lam : enumerate_tuples(n, big)) {
            const VirtualCharacter meas = measure_character(lam, false);
            if (obs == Observable::Y) {
                out.push_back(split_term(meas + y_character(lam, Weight(n)), cfg.params, 1.0));
                continue;
            }
            for (const Partition& small : enumerate_partitions(rest)) {
                if (dropped && small == *dropped) continue;
                out.push_back(split_term(meas + qq_term_character(lam, small), cfg.params,
                                         std::pow(qq_coupling_factor(cfg.params), small.size())));
            }
        }
    }
    return out;
}

cplx sum_terms(const std::vector<XTerm>& terms, cplx x, const EllipticParams& ell) {
    cplx s = 0.0;
    for (const XTerm& t : terms) s += eval_term(t, x, ell);
    return s;
}

}  // namespace

void InstantonConfig::validate(bool orbifold) const {
    if (n_colors < 1) throw ConfigError("n_colors must be >= 1");
    if (order < 0) throw ConfigError("order must be >= 0");
    if (params.n_colors() != n_colors) throw ConfigError("Coulomb parameter count must equal n_colors");
    params.ell.validate();
    if (!fugacity.empty()) {
        const std::size_t want = orbifold ? std::size_t(n_colors) : 1;
        if (fugacity.size() != want) throw ConfigError("wrong number of fugacities");
    }
}

VirtualCharacter measure_character(const Tuple& lam, bool orbifold) {
    const int n = int(lam.size());
    const VirtualCharacter t = orbifold ? tangent_orbifold(lam) : tangent_plain(lam);
    return t - t.shifted(Weight::mass(n));
}

cplx measure(const Tuple& lam, const InstantonConfig& cfg, bool orbifold) {
    cplx fug = 1.0;
    if (orbifold) {
        if (int(cfg.fugacity.size()) != cfg.n_colors) throw ConfigError("orbifold measure needs N fugacities");
        for (int w = 0; w < cfg.n_colors; ++w) fug *= std::pow(cfg.fugacity[w], d_omega(lam, w));
    } else {
        if (cfg.fugacity.size() != 1) throw ConfigError("plain measure needs one fugacity");
        fug = std::pow(cfg.fugacity[0], tuple_size(lam));
    }
    return fug * pleth_exp(measure_character(lam, orbifold), cfg.params);
}

FugacitySeries partition_function(const InstantonConfig& cfg, bool orbifold) {
    const int n = cfg.n_colors;
    FugacitySeries z(orbifold ? n : 1, cfg.order);
    for (int k = 0; k <= cfg.order; ++k)
        for (const Tuple& lam : enumerate_tuples(n, k)) {
            const cplx v = pleth_exp(measure_character(lam, orbifold), cfg.params);
            Multidegree d;
            if (orbifold)
                for (int w = 0; w < n; ++w) d.push_back(d_omega(lam, w));
            else
                d = {k};
            z.add(d, v);
        }
    return z;
}

VirtualCharacter y_character(const Tuple& lam, const Weight& shift) {
    const int n = int(lam.size());
    const VirtualCharacter pp = (VirtualCharacter::one(n) - q_char(n, 1).dual()) * (VirtualCharacter::one(n) - q_char(n, 2).dual());
    const VirtualCharacter inner = w12(n).dual() - pp * v12(lam).dual();
    return -inner.shifted(Weight::var_x(n) + shift);
}

cplx y_fixed_point(cplx x, const Tuple& lam, const ParamAssignment& params) {
    const int n = int(lam.size());
    const auto& ell = params.ell;
    cplx v = 1.0;
    for (int alpha = 1; alpha <= n; ++alpha) {
        const cplx a = params.a[alpha - 1];
        v *= vartheta(x - a, ell);
        for (const Cell& c : lam[alpha - 1].cells()) {
            const cplx s = x - a - params.eps1 * double(c.row - 1) - params.eps2 * double(c.col - 1);
            v *= vartheta(s - params.eps1, ell) / vartheta(s, ell) * vartheta(s - params.eps2, ell) /
                 vartheta(s - params.eps1 - params.eps2, ell);
        }
    }
    return v;
}

VirtualCharacter s_factor_character(int n, const Partition& lam) {
    VirtualCharacter arg(n);
    for (const Cell& c : lam.cells()) {
        const int hook = lam.hook(c.row, c.col);
        const int arm = lam.arm(c.row, c.col);
        arg.add_term(Weight::mass(n) * hook + (Weight::eps(n, 1) + Weight::eps(n, 2)) * arm, 1);
    }
    return arg * p_char(n, 1) * p_char(n, 2);
}

cplx qq_coupling_factor(const ParamAssignment& params) {
    if (params.ell.kernel == Kernel::FourD) return 1.0;
    return std::exp(-params.ell.beta * params.m * double(params.n_colors()));
}

VirtualCharacter qq_term_character(const Tuple& lam, const Partition& small) {
    const int n = int(lam.size());
    const Weight eps = Weight::eps(n, 1) + Weight::eps(n, 2);
    const Weight m = Weight::mass(n);
    VirtualCharacter ch = y_character(lam, eps) + s_factor_character(n, small);
    for (const Cell& c : small.cells()) {
        const Weight sigma = Weight::eps(n, 3) * (c.row - 1) + Weight::eps(n, 4) * (c.col - 1);
        ch += y_character(lam, sigma + m + eps);
        ch += y_character(lam, sigma - m);
        ch -= y_character(lam, sigma + eps);
        ch -= y_character(lam, sigma);
    }
    return ch;
}

FugacitySeries observable_unnormalized(Observable obs, cplx x, const InstantonConfig& cfg, const Partition* dropped) {
    FugacitySeries u(1, cfg.order);
    for (int k = 0; k <= cfg.order; ++k) u.add({k}, sum_terms(order_terms(obs, cfg, k, dropped), x, cfg.params.ell));
    return u;
}

FugacitySeries observable_average(Observable obs, cplx x, const InstantonConfig& cfg) {
    return series_mul(observable_unnormalized(obs, x, cfg), partition_function(cfg, false).inverse());
}

std::vector<cplx> candidate_poles(const InstantonConfig& cfg, int order, Observable obs) {
    std::vector<Weight> seen;
    std::vector<cplx> out;
    for (const XTerm& t : order_terms(obs, cfg, order, nullptr))
        for (const Weight& w : t.pole_weights)
            if (std::find(seen.begin(), seen.end(), w) == seen.end()) {
                seen.push_back(w);
                out.push_back(-cfg.params.eval(w));
            }
    return out;
}

PoleReport check_pole_cancellation(const InstantonConfig& cfg, int order, double radius, const Partition* dropped,
                                   int points) {
    if (cfg.params.ell.kernel == Kernel::SixD) throw DomainError("pole check supports the 4d and 5d kernels");
    PoleReport rep;
    rep.order = order;
    rep.min_separation = std::numeric_limits<double>::infinity();
    std::vector<cplx> all;
    for (int k = 0; k <= order; ++k) {
        const auto terms = order_terms(Observable::QQChar, cfg, k, dropped);
        std::vector<Weight> seen;
        std::vector<cplx> poles;
        for (const XTerm& t : terms)
            for (const Weight& w : t.pole_weights)
                if (std::find(seen.begin(), seen.end(), w) == seen.end()) {
                    seen.push_back(w);
                    poles.push_back(-cfg.params.eval(w));
                }
        for (std::size_t i = 0; i < poles.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) rep.min_separation = std::min(rep.min_separation, std::abs(poles[i] - poles[j]));
        rep.candidates += int(poles.size());

        double worst = 0.0;
        for (const cplx& p : poles) {
            std::vector<cplx> vals(points);
            double scale = 0.0;
            for (int j = 0; j < points; ++j) {
                const cplx dz = std::polar(radius, 2.0 * std::numbers::pi * j / points);
                vals[j] = sum_terms(terms, p + dz, cfg.params.ell);
                scale = std::max(scale, std::abs(vals[j]));
            }
            if (scale == 0.0) continue;
            for (int power = 0; power <= 2; ++power) {
                cplx moment = 0.0;
                for (int j = 0; j < points; ++j)
                    moment += vals[j] * std::pow(std::polar(radius, 2.0 * std::numbers::pi * j / points), power + 1);
                moment /= double(points);
                worst = std::max(worst, std::abs(moment) / (std::pow(radius, power + 1) * scale));
            }
        }
        rep.per_order.push_back(worst);
        rep.max_residual = std::max(rep.max_residual, worst);
    }
    if (rep.min_separation < 2.5 * radius)
        throw DomainError("candidate poles closer than the contour radius allows; choose more generic parameters");
    return rep;
}

VirtualCharacter y_orbifold_character(int omega, const Tuple& lam) {
    const int n = int(lam.size());
    const VirtualCharacter p1d = VirtualCharacter::one(n) - q_char(n, 1).dual();
    const VirtualCharacter inner = w_omega(n, omega).dual() - p1d * v_omega(lam, omega).dual() +
                                   q_char(n, 2).dual() * p1d * v_omega(lam, omega - 1).dual();
    return -inner.shifted(Weight::var_x(n));
}

cplx y_orbifold_fixed_point(int omega, cplx x, const Tuple& lam, const ParamAssignment& params) {
    const int n = int(lam.size());
    const auto& ell = params.ell;
    const int a_index = mod(omega, n) == 0 ? n : mod(omega, n);
    cplx v = vartheta(x - params.a[a_index - 1], ell);
    for (int alpha = 1; alpha <= n; ++alpha)
        for (const Cell& c : lam[alpha - 1].cells()) {
            const cplx s = x - params.a[alpha - 1] - params.eps1 * double(c.row - 1) - params.eps2 * double(c.col - 1);
            if (mod(alpha + c.col - 1 - omega, n) == 0) v *= vartheta(s - params.eps1, ell) / vartheta(s, ell);
            if (mod(alpha + c.col - omega, n) == 0)
                v *= vartheta(s - params.eps2, ell) / vartheta(s - params.eps1 - params.eps2, ell);
        }
    return v;
}

PlainImage orbifold_plain_image(const Tuple& lam, const ParamAssignment& params) {
    const int n = int(lam.size());
    PlainImage img{Tuple(n), params};
    img.params.eps2 = params.eps2 * double(n);
    for (int alpha = 1; alpha <= n; ++alpha) {
        const int r = mod(alpha, n);
        img.params.a[alpha - 1] = params.a[alpha - 1] - params.eps2 * double(r);
        const Partition t = lam[alpha - 1].transpose();
        std::vector<int> cols;
        for (int b = (r == 0 ? n : n - r); b <= t.length(); b += n) cols.push_back(t.row(b));
        img.lam[alpha - 1] = Partition(cols).transpose();
    }
    return img;
}

}  // namespace qqlax
