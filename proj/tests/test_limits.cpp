#include <cmath>
#include <random>

#include "doctest.h"
#include "qqlax/elliptic.hpp"
#include "qqlax/errors.hpp"
#include "qqlax/factorization.hpp"
#include "qqlax/laxphase.hpp"
#include "qqlax/limits.hpp"
#include "qqlax/partitions.hpp"

using namespace qqlax;

namespace {

PhaseSpacePoint chamber_point(int n, cplx nome, Kernel kernel, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhaseSpacePoint pt;
    pt.nome = nome;
    pt.kernel = kernel;
    pt.m = cplx(0.37 + 0.05 * u(gen), 0.05 * u(gen));
    pt.beta = 0.8;
    const double step = nome == cplx(0.0) ? 0.35 : std::pow(std::abs(nome), 1.0 / n);
    for (int w = 0; w < n; ++w) {
        pt.x.push_back(std::polar(std::pow(step, w + 0.1 * u(gen)), 0.3 * u(gen)));
        pt.p.push_back(cplx(0.3 * u(gen), 0.1 * u(gen)));
    }
    return pt;
}

YModel random_model(const PhaseSpacePoint& pt, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    YModel m;
    m.ep = pt.elliptic();
    for (int w = 0; w < pt.n(); ++w) m.roots.push_back({cplx(u(gen), u(gen))});
    return m;
}

// Box-by-box classical qq-character: Y_{w+1}(x) sum_lam Q^lam prod over boxes (i, j) of
// Y_{w+2-j}(x+s+m) Y_{w+1-j}(x+s-m) / (Y_{w+2-j}(x+s) Y_{w+1-j}(x+s)), s = m(i - j).
cplx chi_brute(int w, cplx x, const YModel& y, const std::vector<cplx>& q, cplx m, int degree) {
    const int n = y.n();
    cplx sum = 0.0;
    for (const Partition& lam : enumerate_partitions_upto(degree)) {
        cplx t = 1.0;
        for (const Cell& c : lam.cells()) {
            const cplx s = m * double(c.row - c.col);
            t *= q[mod_n(w + 1 - c.col, n)];
            t *= y.y(w + 2 - c.col, x + s + m) * y.y(w + 1 - c.col, x + s - m) /
                 (y.y(w + 2 - c.col, x + s) * y.y(w + 1 - c.col, x + s));
        }
        sum += t;
    }
    return y.y(w + 1, x) * sum;
}

}  // namespace

TEST_CASE("column recursion matches the box-by-box character") {
    for (int n = 1; n <= 3; ++n) {
        PhaseSpacePoint pt = chamber_point(n, cplx(0.002, 0.001), Kernel::FourD, 5 + n);
        const YModel y = random_model(pt, 17 + n);
        const std::vector<cplx> q = pt.fugacities();
        double qmax = 0.0;
        for (cplx v : q) qmax = std::max(qmax, std::abs(v));
        // truncation of the brute sum at size 12 costs qmax^13
        const double tol = 50.0 * std::pow(qmax, 13) + 1e-13;
        for (int w = 0; w < n; ++w) {
            const cplx x(0.4, 0.3);
            const cplx a = chi_from_model(w, x, y, q, pt.m);
            const cplx b = chi_brute(w, x, y, q, pt.m, 12);
            CHECK(std::abs(a - b) <= tol * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("trigonometric limit: z-independence, minors, determinant") {
    for (Kernel k : {Kernel::FourD, Kernel::FiveD})
        for (int n = 2; n <= 3; ++n)
            for (std::uint32_t seed : {1u, 2u, 3u}) {
                const PhaseSpacePoint pt = chamber_point(n, 0.0, k, seed);
                const YModel y = random_model(pt, 100 + seed);
                const TrigReport r = trig_model_checks(pt, y, {0.45, 0.2}, {2.5, 1.5});
                CHECK(r.z_independence.pass);
                CHECK(r.z_independence.max_rel_error < 1e-8);
                CHECK(r.y_recovery.pass);
                CHECK(r.determinant.pass);
            }
    const PhaseSpacePoint pt = chamber_point(2, 0.0, Kernel::FourD, 9);
    const YModel y = random_model(pt, 9);
    const std::vector<cplx> q = pt.fugacities();
    const CharacterFn chi = [&](int w, cplx v) { return chi_from_model(w, v, y, q, pt.m); };
    CHECK_THROWS_AS(d_trig(0.3, pt, chi, {1e2}, 1e-30), NotZIndependent);
    CHECK_THROWS_AS(d_trig(0.3, chamber_point(2, 0.1, Kernel::FourD, 9), chi), ConfigError);
}

TEST_CASE("trigonometric limit: Q_N is the Lax characteristic polynomial") {
    for (Kernel k : {Kernel::FourD, Kernel::FiveD})
        for (int n = 2; n <= 3; ++n) {
            const CheckResult r = trig_spectrum_check(chamber_point(n, 0.0, k, 40 + n), {0.5, 0.1});
            CHECK(r.pass);
        }
}

TEST_CASE("q -> 0 factors are unitriangular") {
    const PhaseSpacePoint pt = chamber_point(3, 0.0, Kernel::FourD, 50);
    const BilateralFactors f = bilateral_factors(pt, {0.7, 0.4});
    for (const Matrix& l : f.left)
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(l(i, i) - 1.0) < 1e-15);
            for (int j = i + 1; j < 3; ++j) CHECK(std::abs(l(i, j)) < 1e-15);
        }
    const BilateralFactors g = bilateral_factors(pt, 1e14);
    for (const Matrix& r : g.right)
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(r(i, i) - 1.0) < 1e-12);
            for (int j = 0; j < i; ++j) CHECK(std::abs(r(i, j)) < 1e-12);
        }
}

TEST_CASE("leading minors survive unitriangular dressing") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const PhaseSpacePoint pt = chamber_point(3, 0.0, Kernel::FourD, 60);
    const YModel y = random_model(pt, 60);
    const std::vector<cplx> q = pt.fugacities();
    const CharacterFn chi = [&](int w, cplx v) { return chi_from_model(w, v, y, q, pt.m); };
    const TrigData td = d_trig({0.3, 0.2}, pt, chi);
    Matrix lo = Matrix::Identity(3, 3), up = Matrix::Identity(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j) {
            lo(i, j) = cplx(u(gen), u(gen));
            up(j, i) = cplx(u(gen), u(gen));
        }
    const Matrix dressed = lo * td.d * up;
    for (int k = 1; k <= 3; ++k) {
        const cplx a = dressed.topLeftCorner(k, k).determinant();
        CHECK(std::abs(a - td.minors[k]) < 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("Bethe residual: substitution against the limit-shape form") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 3;
    EllipticParams ep{0.0, 0.0, 1.0, Kernel::FourD};
    // Q_k a random product of k linear factors, Q_0 = 1
    std::vector<std::vector<cplx>> roots(n + 1);
    for (int k = 1; k <= n; ++k)
        for (int r = 0; r < k; ++r) roots[k].push_back(cplx(u(gen), u(gen)));
    std::vector<cplx> scale(n + 1, 1.0);
    auto q_fn = [&](int k, cplx x) {
        cplx out = scale[k];
        for (cplx a : roots[k]) out *= vartheta(x - a, ep);
        return out;
    };
    const std::vector<cplx> twists = {0.0, {0.3, 0.1}, {0.5, -0.2}};
    const cplx m(0.37, 0.05);
    for (int t = 0; t < 20; ++t) {
        const cplx x(2.0 * u(gen), 2.0 * u(gen));
        for (int w = 1; w < n; ++w) {
            const BetheResidual b = bethe_residual(q_fn, w, x, twists, m);
            CHECK(std::abs(b.substituted - b.limit_shape) <= 1e-11 * std::max(1.0, std::abs(b.substituted)));
        }
    }
    // at a root of Q_w the residual is finite and does not see the normalization of Q_w
    for (int w = 1; w < n; ++w) {
        const cplx root = roots[w][0];
        const BetheResidual a = bethe_residual(q_fn, w, root, twists, m);
        scale[w] = cplx(3.7, -1.2);
        const BetheResidual b = bethe_residual(q_fn, w, root, twists, m);
        scale[w] = 1.0;
        CHECK(std::isfinite(std::abs(a.substituted)));
        CHECK(std::abs(a.substituted - b.substituted) <= 1e-12 * std::max(1.0, std::abs(a.substituted)));
        // the displayed variant with Q_w(x - m) in the denominator is a different function
        CHECK(std::abs(a.as_displayed - a.substituted) > 1e-6);
    }
    // Q_{w+1} vanishing at x makes the residual singular
    CHECK_THROWS_AS(bethe_residual(q_fn, 1, roots[2][0], twists, m), PoleError);
    CHECK_THROWS_AS(bethe_residual(q_fn, 0, 0.3, twists, m), DomainError);
}

TEST_CASE("spin-chain Lax window") {
    const PhaseSpacePoint pt = chamber_point(3, 0.1, Kernel::FourD, 70);
    const YModel y = random_model(pt, 70);
    const SpinLaxWindow sl = spin_lax({0.3, 0.2}, 6, pt, y);
    REQUIRE(sl.ops.size() == 3);
    for (const Matrix& l : sl.ops) {
        REQUIRE(l.rows() == 13);
        cplx diag = 1.0;
        for (int i = 0; i < 13; ++i) {
            diag *= l(i, i);
            CHECK(std::abs(l(i, i)) > 0.0);
            if (i + 1 < 13) CHECK(l(i, i + 1) == l(i, i));
            for (int j = 0; j < 13; ++j)
                if (j != i && j != i + 1) CHECK(l(i, j) == cplx(0.0));
        }
        CHECK(std::abs(l.determinant() - diag) <= 1e-10 * std::abs(diag));
    }
    // Y_2 vanishing at x + k m for some k in the window
    YModel bad = y;
    bad.roots[2][0] = cplx(0.3, 0.2) + 2.0 * pt.m;
    CHECK_THROWS_AS(spin_lax({0.3, 0.2}, 6, pt, bad), SingularWindow);
    CHECK_THROWS_AS(spin_lax({0.3, 0.2}, 41, pt, y), ConfigError);
}

TEST_CASE("spectral duality: window ratios") {
    for (Kernel k : {Kernel::FourD, Kernel::FiveD})
        for (int n = 1; n <= 3; ++n) {
            const PhaseSpacePoint pt = chamber_point(n, 0.1, k, 80 + n);
            const YModel y = random_model(pt, 80 + n);
            const cplx x(0.4, 0.3);
            // large |z| keeps the right-hand tail visible at M = 10
            const DualityReport r = duality_ratio_check(pt, y, x, {8e3, 6e3});
            CHECK(r.structure.pass);
            CHECK(r.product.pass);
            CHECK(r.ratio.pass);
            CHECK(r.error_large <= 1e-7);
            CHECK(r.decay.pass);
            CHECK(r.error_small >= 1e3 * r.error_large);
            // dropping the edge factor leaves an O(1) error in 5d and a slow O(1/M) one in 4d
            CHECK(r.literal_large > 1e-3);
            if (k == Kernel::FourD) {
                CHECK(r.literal_small / r.literal_large > 1.5);
                CHECK(r.literal_small / r.literal_large < 2.5);
            }

            const DualityReport s = duality_ratio_check(pt, y, x, {0.6, 0.2});
            CHECK(s.ratio.pass);
        }
}
