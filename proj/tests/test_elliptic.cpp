#include <cmath>

#include "doctest.h"
#include "qqlax/elliptic.hpp"
#include "qqlax/errors.hpp"

using namespace qqlax;

TEST_CASE("theta at zero nome is 1 - z") {
    const cplx z(0.37, -0.81);
    CHECK(std::abs(theta(z, 0.0, ThetaForm::Series, 5) - (1.0 - z)) < 1e-15);
    CHECK(std::abs(theta(z, 0.0, ThetaForm::Product, 5) - (1.0 - z)) < 1e-15);
}

TEST_CASE("theta vanishes at z = 1") { CHECK(std::abs(theta(1.0, 0.1, ThetaForm::Product, 64)) < 1e-14); }

TEST_CASE("series and product forms agree") {
    const cplx z(0.3, 0.1);
    CHECK(std::abs(theta(z, 0.2, ThetaForm::Series, 64) - theta(z, 0.2, ThetaForm::Product, 64)) < 1e-12);
    for (int k = 0; k < 20; ++k) {
        const cplx q = std::polar(0.3 * (k + 1) / 20.0, 0.7 * k);
        const cplx w = std::polar(0.4 + 0.05 * k, -0.3 * k + 0.2);
        const cplx s = theta(w, q, ThetaForm::Series);
        const cplx p = theta(w, q, ThetaForm::Product);
        CHECK(std::abs(s - p) <= 1e-12 * std::max(1.0, std::abs(p)));
    }
}

TEST_CASE("theta quasi-periodicity on the annulus") {
    const cplx q(0.12, 0.18);
    for (int k = 0; k < 16; ++k) {
        const double r = std::abs(q) + (1.0 - std::abs(q)) * (k + 0.5) / 16.0;
        const cplx z = std::polar(r, 0.9 * k);
        const cplx lhs = theta(q * z, q) + theta(z, q) / z;
        CHECK(std::abs(lhs) <= 1e-10 * std::abs(theta(z, q) / z));
    }
}

TEST_CASE("theta rejects bad input") {
    CHECK_THROWS_AS(theta(0.5, 1.2), DomainError);
    CHECK_THROWS_AS(theta(0.0, 0.1), DomainError);
    CHECK_THROWS_AS(theta(0.5, 0.1, ThetaForm::Series, 0), DomainError);
}

TEST_CASE("e1 basic values") {
    CHECK(std::abs(e1(0.5, 0.0) - (-1.0)) < 1e-15);
    const cplx q = 0.15, z = 0.4;
    CHECK(std::abs(e1(q * z, q) - e1(z, q) + 1.0) < 1e-10);
    CHECK_THROWS_AS(e1(1.0, 0.1), PoleError);
    CHECK_THROWS_AS(e1(0.1, 0.1), PoleError);
}

TEST_CASE("e1 matches finite difference of log theta") {
    const double z = 0.7, q = 0.1, h = 1e-5;
    const double fd = z * (std::log(std::abs(theta(z + h, q))) - std::log(std::abs(theta(z - h, q)))) / (2 * h);
    CHECK(std::abs(e1(z, q) - fd) < 1e-6);
    const cplx w(0.45, 0.2);
    CHECK(std::abs(e1(w, q) - theta_zderiv(w, q) / theta(w, q)) < 1e-12);
}

TEST_CASE("theta derivative at one") {
    const cplx q(0.2, -0.1);
    const double h = 1e-6;
    const cplx fd = (theta(1.0 + h, q) - theta(1.0 - h, q)) / (2 * h);
    CHECK(std::abs(fd - theta_prime_at_one(q)) < 1e-8);
    CHECK(std::abs(theta_zderiv(1.0, q) - theta_prime_at_one(q)) < 1e-12);
}

TEST_CASE("vartheta kernels") {
    EllipticParams p4;
    const cplx x(0.3, 0.2);
    CHECK(vartheta(x, p4) == x);
    EllipticParams p5{0.1, 0.0, 0.8, Kernel::FiveD};
    EllipticParams p6{0.1, 0.0, 0.8, Kernel::SixD};
    CHECK(vartheta(x, p5) == vartheta(x, p6));
    EllipticParams small{0.1, 0.0, 1e-4, Kernel::FiveD};
    CHECK(std::abs(vartheta(0.3, small) / 1e-4 - 0.3) < 1e-4);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((EllipticParams{1.5, 0.0, 1.0, Kernel::FourD}.validate()), ConfigError);
    CHECK_THROWS_AS((EllipticParams{0.1, 1.0, 1.0, Kernel::SixD}.validate()), ConfigError);
    CHECK_THROWS_AS((EllipticParams{0.1, 0.0, 0.0, Kernel::FiveD}.validate()), ConfigError);
    CHECK_NOTHROW((EllipticParams{0.1, 0.0, 0.0, Kernel::FourD}.validate()));
}
