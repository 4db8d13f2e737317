#include <random>

#include "doctest.h"
#include "qqlax/errors.hpp"
#include "qqlax/opalgebra.hpp"

using namespace qqlax;

namespace {

Matrix random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

// x-dependent coefficient on the lattice x = x0 + k eps
ShiftOperator random_op(std::mt19937_64& rng, int n, int max_shift) {
    ShiftOperator op(n);
    for (int s = -max_shift; s <= max_shift; ++s) {
        const Matrix a = random_matrix(rng, n), b = random_matrix(rng, n);
        op.add(s, [a, b](int k) -> Matrix { return a + double(k) * b; });
    }
    return op;
}

PhaseSpacePoint chamber_point(int n) {
    PhaseSpacePoint pt;
    pt.nome = cplx(0.1, 0.02);
    for (int w = 0; w < n; ++w) {
        pt.x.push_back(std::polar(std::pow(0.6, w), 0.3 * w));
        pt.p.push_back(cplx(0.1 * w, -0.2));
    }
    return pt;
}

}  // namespace

TEST_CASE("series arithmetic") {
    FugacitySeries a(2, 2), b(2, 2);
    a.add({0, 0}, 1.0);
    a.add({1, 0}, 1.0);
    b.add({0, 0}, 1.0);
    b.add({1, 0}, -1.0);
    const auto p = series_mul(a, b);
    CHECK(p.coeff({0, 0}) == cplx(1.0));
    CHECK(p.coeff({1, 0}) == cplx(0.0));
    CHECK(p.coeff({2, 0}) == cplx(-1.0));

    FugacitySeries c(2, 2), d(2, 2);
    c.add({1, 0}, 1.0);
    c.add({0, 1}, 1.0);
    d.add({1, 1}, 1.0);
    const auto e = series_mul(c, d);
    CHECK(e.coeffs().empty());  // degree 3 dropped at max degree 2
    FugacitySeries f(2, 3), g(2, 3);
    f.add({1, 1}, 1.0);
    g.add({0, 1}, 1.0);
    const auto h = series_mul(f, g);
    CHECK(h.coeff({1, 2}) == cplx(1.0));
    CHECK(h.coeffs().size() == 1);

    FugacitySeries s(1, 6);
    s.add({0}, 2.0);
    s.add({1}, cplx(0.3, 0.1));
    s.add({3}, -0.7);
    const auto one = series_mul(s, s.inverse());
    CHECK(std::abs(one.coeff({0}) - 1.0) < 1e-15);
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(one.coeff({k})) < 1e-14);
}

TEST_CASE("grading is respected") {
    std::mt19937_64 rng(2);
    FugacitySeries a(3, 6), b(3, 6);
    a.add({1, 0, 1}, cplx(0.4, 1.0));
    a.add({0, 2, 0}, -2.0);
    b.add({2, 1, 0}, 1.5);
    b.add({0, 0, 3}, cplx(0, 1));
    const auto prod = series_mul(a, b);
    CHECK(prod.coeffs().size() == 4);
    for (const auto& [d, c] : prod.coeffs()) CHECK(total_degree(d) == 5);
}

TEST_CASE("shift operator composition") {
    const int n = 2;
    std::mt19937_64 rng(7);
    const Matrix a = random_matrix(rng, n), b = random_matrix(rng, n);
    ShiftOperator A(n), B(n);
    A.add(1, [a](int k) -> Matrix { return a * double(k + 2); });
    B.add(-1, [b](int k) -> Matrix { return b * double(k * k + 1); });
    const auto AB = shiftop_compose(A, B);
    CHECK(AB.terms().size() == 1);
    for (int k = -2; k <= 2; ++k)
        CHECK((AB.at(0, k) - a * double(k + 2) * b * double((k + 1) * (k + 1) + 1)).norm() < 1e-12);

    const auto T = random_op(rng, n, 1);
    const auto IT = shiftop_compose(ShiftOperator::identity(n), T);
    for (int s = -1; s <= 1; ++s) CHECK((IT.at(s, 3) - T.at(s, 3)).norm() < 1e-14);

    // e^{eps d} x = (x + eps) e^{eps d}, with x = k on the lattice
    const auto shift = ShiftOperator::constant(Matrix::Identity(n, n), 1);
    const auto xop = ShiftOperator::function(n, [n](int k) -> Matrix { return Matrix::Identity(n, n) * double(k); });
    const auto xp1 = ShiftOperator::function(n, [n](int k) -> Matrix { return Matrix::Identity(n, n) * double(k + 1); });
    const auto lhs = shiftop_compose(shift, xop), rhs = shiftop_compose(xp1, shift);
    for (int k = -3; k <= 3; ++k) CHECK((lhs.at(1, k) - rhs.at(1, k)).norm() < 1e-15);

    for (int t = 0; t < 5; ++t) {
        const auto X = random_op(rng, 3, 1), Y = random_op(rng, 3, 1), Z = random_op(rng, 3, 1);
        const auto l = shiftop_compose(shiftop_compose(X, Y), Z), r = shiftop_compose(X, shiftop_compose(Y, Z));
        for (int s = -3; s <= 3; ++s)
            for (int k = -1; k <= 1; ++k)
                CHECK((l.at(s, k) - r.at(s, k)).norm() <= 1e-12 * (1.0 + l.at(s, k).norm()));
    }

    ClipReport clip;
    const auto clipped = shiftop_compose(random_op(rng, n, 2), random_op(rng, n, 2), 2, &clip);
    CHECK(clip.events == 4);
    CHECK(clip.max_clipped_norm > 0.0);
    for (const auto& [s, f] : clipped.terms()) CHECK(std::abs(s) <= 2);
}

TEST_CASE("structural matrices") {
    for (int n = 1; n <= 4; ++n) {
        Matrix c = cyclic(n), p = Matrix::Identity(n, n);
        for (int i = 0; i < n; ++i) p = p * c;
        CHECK((p - Matrix::Identity(n, n)).norm() < 1e-15);
        const cplx z(0.7, 0.2);
        const cplx sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
        CHECK(std::abs(cyclic_z(n, z).determinant() - sign / z) < 1e-14);
    }
    const int n = 3;
    const cplx z(0.7, 0.2);
    const Matrix lhs = std::pow(z, -1.0 / n) * sz_matrix(n, z).inverse() * cyclic(n) * sz_matrix(n, z);
    CHECK((lhs - cyclic_z(n, z)).cwiseAbs().maxCoeff() < 1e-14);

    const auto pt = chamber_point(3);
    CHECK_NOTHROW(pt.validate());
    const auto q = pt.fugacities();
    cplx prod = 1.0;
    for (cplx v : q) {
        prod *= v;
        CHECK(std::abs(v) < 1.0);
    }
    CHECK(std::abs(prod - pt.nome) < 1e-14);
    CHECK(std::abs(pt.x_ext(3) - pt.nome * pt.x[0]) < 1e-15);
    CHECK(std::abs(pt.x_ext(-1) - pt.x[2] / pt.nome) < 1e-14);
    const Matrix qh = structural_matrix(Structural::Qhat, pt, z);
    CHECK(std::abs(qh(1, 1) - pt.x[1] / pt.x[0]) < 1e-15);

    const auto hat = cz_hat(n, z), inv = cz_hat_inverse(n, z);
    const auto id = shiftop_compose(hat, inv);
    CHECK(id.terms().size() == 1);
    CHECK((id.at(0, 0) - Matrix::Identity(n, n)).norm() < 1e-14);

    PhaseSpacePoint bad = pt;
    bad.x[1] = 0.0;
    CHECK_THROWS_AS(structural_matrix(Structural::X, bad, z), DegeneratePoint);
    bad = pt;
    std::swap(bad.x[0], bad.x[1]);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("graded operator composition") {
    const int n = 2;
    std::mt19937_64 rng(4);
    GradedOperator a(2, 3, n), b(2, 3, n);
    a.add({0, 0}, ShiftOperator::identity(n));
    a.add({1, 0}, random_op(rng, n, 1));
    b.add({0, 0}, ShiftOperator::identity(n));
    b.add({0, 1}, random_op(rng, n, 1));
    b.add({2, 1}, random_op(rng, n, 1));
    const auto c = a.compose(b);
    CHECK(c.terms().count({1, 1}) == 1);
    CHECK(c.terms().count({3, 1}) == 0);  // degree 4 truncated
    CHECK(c.terms().count({2, 1}) == 1);
}
