#include <cmath>
#include <random>

#include "doctest.h"
#include "qqlax/errors.hpp"
#include "qqlax/instanton.hpp"

using namespace qqlax;

namespace {

InstantonConfig make_config(int n, int order, Kernel k = Kernel::FourD, cplx m = cplx(0.2531, -0.1187)) {
    InstantonConfig cfg;
    cfg.n_colors = n;
    cfg.order = order;
    cfg.params.eps1 = cplx(0.4137, 0.1029);
    cfg.params.eps2 = cplx(-0.1583, 0.3671);
    cfg.params.m = m;
    for (int a = 0; a < n; ++a) cfg.params.a.push_back(cplx(0.9 * a + 0.05, -0.6 * a + 0.02));
    cfg.params.ell.kernel = k;
    cfg.params.ell.beta = cplx(0.7, 0.1);
    cfg.fugacity = {cplx(0.1, 0.05)};
    return cfg;
}

std::vector<long long> inverse_euler(int colors, int max) {
    std::vector<long long> c(max + 1, 0);
    c[0] = 1;
    for (int k = 0; k < colors; ++k)
        for (int n = 1; n <= max; ++n)
            for (int i = n; i <= max; ++i) c[i] += c[i - n];
    return c;
}

}  // namespace

TEST_CASE("measure values") {
    auto cfg = make_config(1, 1);
    const Tuple empty{Partition()};
    CHECK(measure(empty, cfg, false) == cplx(1.0));
    const Tuple one{Partition({1})};
    const auto& p = cfg.params;
    const cplx expect = cfg.fugacity[0] * (p.m + p.eps1) * (p.m + p.eps2) / (p.eps1 * p.eps2);
    CHECK(std::abs(measure(one, cfg, false) - expect) < 1e-13);

    auto massless = make_config(2, 3, Kernel::FourD, 0.0);
    massless.fugacity = {cplx(0.3, 0.1)};
    for (int k = 0; k <= 3; ++k)
        for (const Tuple& lam : enumerate_tuples(2, k))
            CHECK(measure(lam, massless, false) == std::pow(massless.fugacity[0], k));
}

TEST_CASE("partition function") {
    for (int n = 1; n <= 3; ++n) {
        auto cfg = make_config(n, 6, Kernel::FourD, 0.0);
        const auto z = partition_function(cfg).by_total_degree();
        const auto counts = inverse_euler(n, 6);
        for (int k = 0; k <= 6; ++k) CHECK(z[k] == cplx(double(counts[k])));
    }
    auto cfg = make_config(1, 1);
    const auto z = partition_function(cfg);
    CHECK(z.coeff({0}) == cplx(1.0));
    CHECK(std::abs(z.coeff({1}) - measure(Tuple{Partition({1})}, cfg, false) / cfg.fugacity[0]) < 1e-14);
}

TEST_CASE("orbifold partition function grading") {
    auto cfg = make_config(2, 3);
    cfg.fugacity = {cplx(0.1, 0.0), cplx(0.2, 0.1)};
    const auto z = partition_function(cfg, true);
    cplx total = 0.0;
    for (int k = 0; k <= 3; ++k)
        for (const Tuple& lam : enumerate_tuples(2, k)) total += measure(lam, cfg, true);
    CHECK(std::abs(z.evaluate(cfg.fugacity) - total) < 1e-12 * std::abs(total));
    auto massless = cfg;
    massless.params.m = 0.0;
    const auto z0 = partition_function(massless, true);
    for (const auto& [d, c] : z0.coeffs()) CHECK(std::abs(c - std::round(c.real())) < 1e-12);
}

TEST_CASE("Y observable: character vs explicit product") {
    for (Kernel k : {Kernel::FourD, Kernel::FiveD, Kernel::SixD}) {
        auto cfg = make_config(2, 0, k);
        cfg.params.ell.nome6d = 0.03;
        for (int s = 0; s <= 4; ++s)
            for (const Tuple& lam : enumerate_tuples(2, s)) {
                auto p = cfg.params;
                p.x = cplx(0.377, -0.211);
                const cplx a = pleth_exp(y_character(lam, Weight(2)), p);
                const cplx b = y_fixed_point(p.x, lam, p);
                CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
            }
    }
}

TEST_CASE("Y and qq-character at order zero") {
    auto cfg = make_config(2, 0);
    const cplx x(0.31, 0.27);
    const auto y = observable_average(Observable::Y, x, cfg);
    const cplx expect = (x - cfg.params.a[0]) * (x - cfg.params.a[1]);
    CHECK(std::abs(y.coeff({0}) - expect) < 1e-14);
    const auto chi = observable_average(Observable::QQChar, x, cfg);
    const cplx eps = cfg.params.eps1 + cfg.params.eps2;
    const auto yshift = observable_average(Observable::Y, x + eps, cfg);
    CHECK(std::abs(chi.coeff({0}) - yshift.coeff({0})) < 1e-14);
    CHECK(s_factor_character(2, Partition()).empty());
}

TEST_CASE("qq-character pole cancellation") {
    for (Kernel k : {Kernel::FourD, Kernel::FiveD})
        for (int n = 1; n <= 2; ++n) {
            const auto cfg = make_config(n, 2, k);
            const auto rep = check_pole_cancellation(cfg, 2, 1e-2);
            CAPTURE(n);
            CAPTURE(int(k));
            CHECK(rep.per_order[0] < 1e-8);
            CHECK(rep.max_residual < 1e-8);
            const Partition box({1});
            const auto bad = check_pole_cancellation(cfg, 2, 1e-2, &box);
            CHECK(bad.max_residual > 1e-2);
            CHECK(bad.max_residual > 1e4 * rep.max_residual);
        }
}

TEST_CASE("Y average has poles only at candidate loci") {
    // multiply the order-k coefficient of the unnormalized <Y> by prod (x - x*) over all
    // candidate denominators (with multiplicity) and check the result is a polynomial of the
    // predicted degree through its Fourier coefficients on a large circle
    auto cfg = make_config(2, 2);
    for (int k = 1; k <= 2; ++k) {
        const auto poles = candidate_poles(cfg, k, Observable::Y);
        const int degree = cfg.n_colors + int(poles.size());
        const int m = 64;
        const double r = 3.0;
        std::vector<cplx> vals(m);
        for (int j = 0; j < m; ++j) {
            const cplx x = std::polar(r, 2 * M_PI * (j + 0.5) / m);
            cplx f = observable_unnormalized(Observable::Y, x, cfg).coeff({k});
            for (const cplx& p : poles) f *= (x - p);
            vals[j] = f;
        }
        double top = 0.0, tail = 0.0;
        for (int p = 0; p < m; ++p) {
            cplx c = 0.0;
            for (int j = 0; j < m; ++j) c += vals[j] * std::polar(1.0, -2 * M_PI * p * (j + 0.5) / m);
            c /= double(m);
            const double mag = std::abs(c) * std::pow(r, -p);
            (p <= degree ? top : tail) = std::max(p <= degree ? top : tail, std::abs(c));
            (void)mag;
        }
        CHECK(tail <= 1e-10 * top);
    }
}

TEST_CASE("orbifold Y observable") {
    const int n = 3;
    auto cfg = make_config(n, 0);
    const cplx x(0.41, -0.13);
    for (int w = 0; w < n; ++w) {
        const int alpha = w == 0 ? n : w;
        const Tuple empty(n);
        CHECK(std::abs(y_orbifold_fixed_point(w, x, empty, cfg.params) - (x - cfg.params.a[alpha - 1])) < 1e-15);
    }
    std::mt19937_64 rng(9);
    for (int s = 0; s <= 4; ++s)
        for (const Tuple& lam : enumerate_tuples(n, s)) {
            auto p = cfg.params;
            p.x = x;
            for (int w = 0; w < n; ++w) {
                const cplx a = pleth_exp(y_orbifold_character(w, lam), p);
                const cplx b = y_orbifold_fixed_point(w, x, lam, p);
                CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
            }
            cplx prod = 1.0;
            for (int w = 0; w < n; ++w) prod *= y_orbifold_fixed_point(w, x + double(w) * p.eps2, lam, p);
            const auto img = orbifold_plain_image(lam, p);
            const cplx plain = y_fixed_point(x, img.lam, img.params);
            CHECK(std::abs(prod - plain) <= 1e-10 * std::abs(plain));
        }
}

TEST_CASE("single-box orbifold Y factors") {
    const int n = 2;
    auto cfg = make_config(n, 0);
    const Tuple lam{Partition({1}), Partition()};
    const auto& p = cfg.params;
    const cplx x(0.2, 0.6);
    const cplx s = x - p.a[0];
    // box (alpha=1,a=1,b=1) has charge 1: the eps1 ratio sits in Y_1, the eps2 ratio in Y_0
    CHECK(std::abs(y_orbifold_fixed_point(1, x, lam, p) - (x - p.a[0]) * (s - p.eps1) / s) < 1e-14);
    CHECK(std::abs(y_orbifold_fixed_point(0, x, lam, p) - (x - p.a[1]) * (s - p.eps2) / (s - p.eps1 - p.eps2)) < 1e-14);
}
