#pragma once

#include <complex>

namespace qqlax {

using cplx = std::complex<double>;

enum class Kernel { FourD, FiveD, SixD };

struct EllipticParams {
    cplx nome{0.0, 0.0};
    cplx nome6d{0.0, 0.0};
    cplx beta{1.0, 0.0};
    Kernel kernel = Kernel::FourD;

    void validate() const;
};

enum class ThetaForm { Series, Product };

inline constexpr int kThetaTerms = 64;

// theta_q(z) = sum_n (-z)^n q^{n(n-1)/2} = prod_{n>=0} (1-q^{n+1})(1-q^n z)(1-q^{n+1}/z)
cplx theta(cplx z, cplx nome, ThetaForm form = ThetaForm::Product, int terms = kThetaTerms);

// z d/dz theta_q(z)
cplx theta_zderiv(cplx z, cplx nome, int terms = kThetaTerms);

// d/dz theta_q(z) at z = 1, i.e. -prod_{n>=1}(1-q^n)^3
cplx theta_prime_at_one(cplx nome, int terms = kThetaTerms);

// E1(z) = z theta'(z) / theta(z). Throws PoleError on the zero lattice q^Z.
cplx e1(cplx z, cplx nome, int terms = kThetaTerms);

// prod_{n=1}^{terms} (1 - q^n)
cplx euler_product(cplx nome, int terms = kThetaTerms);

// 4d: x, 5d: 1 - e^{-beta x}, 6d: theta_{p6d}(e^{-beta x})
cplx vartheta(cplx x, const EllipticParams& params);

}  // namespace qqlax
