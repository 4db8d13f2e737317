#pragma once

#include <string>
#include <vector>

#include "qqlax/characters.hpp"
#include "qqlax/opalgebra.hpp"

namespace qqlax {

struct InstantonConfig {
    int n_colors = 1;
    int order = 2;
    ParamAssignment params;       // x entry unused; observables take x explicitly
    std::vector<cplx> fugacity;   // {q} plain, {q_0..q_{N-1}} orbifold; only for numeric measure()

    void validate(bool orbifold) const;
};

// (1 - e^m) T* at the fixed point, with T* the plain or orbifold cotangent character.
VirtualCharacter measure_character(const Tuple& lam, bool orbifold);

// Unnormalized fixed-point weight: fugacity monomial times E[(1 - e^m) T*].
cplx measure(const Tuple& lam, const InstantonConfig& cfg, bool orbifold);

// Z as a series: one variable (plain) or N variables graded by d_w (orbifold).
FugacitySeries partition_function(const InstantonConfig& cfg, bool orbifold = false);

// Characters whose plethystic exponential gives Y(x + shift)|_Lambda; shift is a lattice weight without x.
VirtualCharacter y_character(const Tuple& lam, const Weight& shift);
cplx y_fixed_point(cplx x, const Tuple& lam, const ParamAssignment& params);  // explicit product form

// S(y) = vartheta(y+e1) vartheta(y+e2) / (vartheta(y) vartheta(y+e1+e2)) equals E[e^y P1 P2].
VirtualCharacter s_factor_character(int n_colors, const Partition& lam);

// qq-character term for a fixed point Lambda and a 34-plane diagram lambda, as a character
// (fugacity power |lambda| carried separately).
VirtualCharacter qq_term_character(const Tuple& lam, const Partition& small);

// Relative weight per box of the 34-plane diagram: 1 for the 4d kernel, e^{-N beta m} for the
// 5d/6d kernels (the K-theoretic kernel is not odd, which shifts the effective coupling).
cplx qq_coupling_factor(const ParamAssignment& params);

enum class Observable { Y, QQChar };

// <obs(x)> = sum_Lambda obs|_Lambda mu[Lambda] / Z, as a truncated series in q.
FugacitySeries observable_average(Observable obs, cplx x, const InstantonConfig& cfg);
// Same, but without the 1/Z normalization.
FugacitySeries observable_unnormalized(Observable obs, cplx x, const InstantonConfig& cfg,
                                       const Partition* dropped = nullptr);

struct PoleReport {
    int order = 0;
    int candidates = 0;
    double min_separation = 0.0;   // smallest distance between distinct candidates
    double max_residual = 0.0;     // max over candidates/orders of normalized contour moments
    std::vector<double> per_order; // max residual per fugacity order
};

// Contour test of pole cancellation for <X(x)>. `dropped` removes one 34-plane diagram from
// the sum (negative control).
PoleReport check_pole_cancellation(const InstantonConfig& cfg, int order, double radius,
                                   const Partition* dropped = nullptr, int points = 32);

// Candidate pole locations of the order-k coefficient (exact lattice weights of linear-in-x
// denominators, evaluated).
std::vector<cplx> candidate_poles(const InstantonConfig& cfg, int order, Observable obs);

// Orbifold Y_w at a fixed point: explicit product and character forms.
cplx y_orbifold_fixed_point(int omega, cplx x, const Tuple& lam, const ParamAssignment& params);
VirtualCharacter y_orbifold_character(int omega, const Tuple& lam);

// Data for comparing prod_w Y_w(x + w eps2)|_Lambda with the plain Y at eps2 -> N eps2: the plain
// fixed point keeps, for color alpha, the columns b = N b' - (alpha mod N) of lambda^(alpha), and the
// plain Coulomb parameters are a_alpha - (alpha mod N) eps2.
struct PlainImage {
    Tuple lam;
    ParamAssignment params;
};
PlainImage orbifold_plain_image(const Tuple& lam, const ParamAssignment& params);

}  // namespace qqlax
