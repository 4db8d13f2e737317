#include "qqlax/elliptic.hpp"

#include <cmath>

#include "qqlax/errors.hpp"

namespace qqlax {

namespace {

void check_nome(cplx nome) {
    if (!(std::abs(nome) < 1.0)) throw DomainError("theta: |nome| must be < 1");
}

constexpr double kPoleGuard = 1e-12;

}  // namespace

void EllipticParams::validate() const {
    if (!(std::abs(nome) < 1.0)) throw ConfigError("|nome| must be < 1");
    if (kernel == Kernel::SixD && !(std::abs(nome6d) < 1.0))
        throw ConfigError("|nome6d| must be < 1 for the 6d kernel");
    if (kernel != Kernel::FourD && beta == cplx(0.0))
        throw ConfigError("beta must be nonzero for the 5d/6d kernels");
}

cplx theta(cplx z, cplx nome, ThetaForm form, int terms) {
    check_nome(nome);
    if (z == cplx(0.0)) throw DomainError("theta: z = 0");
    if (terms < 1) throw DomainError("theta: terms must be >= 1");

    if (form == ThetaForm::Product) {
        cplx acc = 1.0;
        cplx qn = 1.0;  // q^n
        for (int n = 0; n < terms; ++n) {
            const cplx qn1 = qn * nome;
            acc *= (1.0 - qn1) * (1.0 - qn * z) * (1.0 - qn1 / z);
            qn = qn1;
        }
        return acc;
    }

    // term_n = (-z)^n q^{n(n-1)/2}; successive ratios are (-z) q^n and (-1/z) q^{n+1}
    cplx sum = 1.0;
    cplx term = 1.0;
    cplx qn = 1.0;
    for (int n = 0; n < terms; ++n) {
        term *= -z * qn;
        qn *= nome;
        sum += term;
    }
    term = 1.0;
    qn = nome;
    for (int n = 0; n < terms; ++n) {
        term *= -qn / z;
        qn *= nome;
        sum += term;
    }
    return sum;
}

cplx theta_zderiv(cplx z, cplx nome, int terms) {
    check_nome(nome);
    if (z == cplx(0.0)) throw DomainError("theta: z = 0");
    cplx sum = 0.0;
    cplx term = 1.0;
    cplx qn = 1.0;
    for (int n = 1; n <= terms; ++n) {
        term *= -z * qn;
        qn *= nome;
        sum += double(n) * term;
    }
    term = 1.0;
    qn = nome;
    for (int n = 1; n <= terms; ++n) {
        term *= -qn / z;
        qn *= nome;
        sum -= double(n) * term;
    }
    return sum;
}

cplx euler_product(cplx nome, int terms) {
    check_nome(nome);
    cplx acc = 1.0;
    cplx qn = 1.0;
    for (int n = 1; n <= terms; ++n) {
        qn *= nome;
        acc *= 1.0 - qn;
    }
    return acc;
}

cplx theta_prime_at_one(cplx nome, int terms) {
    const cplx e = euler_product(nome, terms);
    return -e * e * e;
}

cplx e1(cplx z, cplx nome, int terms) {
    check_nome(nome);
    if (z == cplx(0.0)) throw DomainError("e1: z = 0");
    cplx sum = 0.0;
    cplx qn = 1.0;
    for (int n = 0; n < terms; ++n) {
        const cplx a = qn * z;
        const cplx b = qn * nome / z;
        const cplx fa = 1.0 - a;
        const cplx fb = 1.0 - b;
        if (std::abs(fa) < kPoleGuard * std::max(1.0, std::abs(a)) ||
            std::abs(fb) < kPoleGuard * std::max(1.0, std::abs(b)))
            throw PoleError("e1: z on the zero lattice of theta");
        sum += -a / fa + b / fb;
        qn *= nome;
    }
    return sum;
}

cplx vartheta(cplx x, const EllipticParams& params) {
    switch (params.kernel) {
        case Kernel::FourD:
            return x;
        case Kernel::FiveD:
            return 1.0 - std::exp(-params.beta * x);
        case Kernel::SixD:
            return theta(std::exp(-params.beta * x), params.nome6d, ThetaForm::Product);
    }
    return x;
}

}  // namespace qqlax
