#include "qqlax/suite.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <random>

#include "json.hpp"
#include "qqlax/characters.hpp"
#include "qqlax/eigenvector.hpp"
#include "qqlax/errors.hpp"
#include "qqlax/factorization.hpp"
#include "qqlax/instanton.hpp"
#include "qqlax/laxphase.hpp"
#include "qqlax/limits.hpp"

#ifndef QQLAX_VERSION
#define QQLAX_VERSION "0.0.0"
#endif

namespace qqlax {

using Json = nlohmann::ordered_json;

namespace {

using Rows = std::vector<CheckResult>;
using Job = std::function<Rows()>;

const cplx kProbes[] = {{0.55, 0.31}, {-0.42, 0.6}, {0.7, -0.25}};

const char* kernel_tag(Kernel k) {
    switch (k) {
        case Kernel::FourD: return "4d";
        case Kernel::FiveD: return "5d";
        case Kernel::SixD: return "6d";
    }
    return "?";
}

std::string tag(const std::string& base, int n) { return base + "_n" + std::to_string(n); }
std::string tag(const std::string& base, Kernel k, int n) { return base + "_" + kernel_tag(k) + "_n" + std::to_string(n); }

CheckResult row(std::string name, std::string anchor, double tol) {
    CheckResult r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.tolerance = tol;
    return r;
}

CheckResult renamed(CheckResult r, std::string name, std::string anchor = "") {
    r.name = std::move(name);
    if (!anchor.empty()) r.anchor = std::move(anchor);
    return r;
}

// Negative control: the clean error must sit at least `min_ratio` below the corrupted one.
CheckResult control(std::string name, std::string anchor, double clean, double corrupted, double min_ratio) {
    CheckResult r = row(std::move(name), std::move(anchor), 1.0 / min_ratio);
    r.record(corrupted > 0.0 ? clean / corrupted : INFINITY, "clean/corrupted");
    r.finalize();
    return r;
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }
double rel_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b) / std::max({1.0, max_abs(a), max_abs(b)}); }

std::mt19937_64 rng_for(const SuiteConfig& cfg, std::uint64_t salt) { return std::mt19937_64(cfg.seed * 0x9e3779b97f4a7c15ULL + salt); }

// Seeded point in the stability chamber: |x_w| falls geometrically within one period.
PhaseSpacePoint chamber_point(const SuiteConfig& cfg, int n, Kernel kernel, std::uint64_t salt, cplx nome) {
    PhaseSpacePoint pt;
    pt.m = cfg.m;
    pt.nome = nome;
    pt.beta = cfg.beta;
    pt.nome6d = cfg.nome6d;
    pt.kernel = kernel;
    if (int(cfg.x.size()) == n) {
        pt.x = cfg.x;
        pt.p = int(cfg.p.size()) == n ? cfg.p : std::vector<cplx>(n, 0.0);
    } else {
        auto gen = rng_for(cfg, salt);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double step = nome == cplx(0.0) ? 0.35 : std::pow(std::abs(nome), 1.0 / n);
        for (int w = 0; w < n; ++w) {
            pt.x.push_back(std::polar(std::pow(step, w + 0.5 + 0.15 * u(gen)), 0.6 * u(gen)));
            pt.p.push_back(cplx(0.4 * u(gen), 0.2 * u(gen)));
        }
    }
    pt.validate();
    return pt;
}

PhaseSpacePoint chamber_point(const SuiteConfig& cfg, int n, Kernel kernel, std::uint64_t salt) {
    return chamber_point(cfg, n, kernel, salt, cfg.nome);
}

YModel seeded_model(const PhaseSpacePoint& pt, std::mt19937_64 gen) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    YModel y;
    y.ep = pt.elliptic();
    for (int w = 0; w < pt.n(); ++w) y.roots.push_back({cplx(u(gen), u(gen))});
    return y;
}

// ---------------------------------------------------------------- theta

void theta_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    jobs.push_back([cfg, ts] {
        auto gen = rng_for(cfg, 11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        CheckResult r = row("theta_series_vs_product", "theta series against triple product", 1e-12 * ts);
        for (int k = 0; k < 20; ++k) {
            const cplx q = std::polar(0.3 * (k + 1) / 20.0, 2.0 * M_PI * u(gen));
            const cplx z = std::polar(0.4 + 1.1 * u(gen), 2.0 * M_PI * u(gen));
            const cplx s = theta(z, q, ThetaForm::Series), p = theta(z, q, ThetaForm::Product);
            r.record(rel_error(std::abs(s - p), std::abs(s), std::abs(p)), "k=" + std::to_string(k));
        }
        r.finalize();
        return Rows{r};
    });
    jobs.push_back([cfg, ts] {
        auto gen = rng_for(cfg, 12);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const cplx q = cfg.nome;
        CheckResult per = row("theta_quasi_periodicity", "theta(q z) = -theta(z) / z", 1e-10 * ts);
        CheckResult e1s = row("theta_e1_shift", "E1(q z) = E1(z) - 1", 1e-10 * ts);
        for (int k = 0; k < 20; ++k) {
            const double rad = std::abs(q) + (1.0 - std::abs(q)) * (k + 0.5) / 20.0;
            const cplx z = std::polar(rad, 2.0 * M_PI * u(gen));
            const cplx t = theta(z, q) / z;
            per.record(std::abs(theta(q * z, q) + t) / std::max(1.0, std::abs(t)), "k=" + std::to_string(k));
            e1s.record(std::abs(e1(q * z, q) - e1(z, q) + 1.0) / std::max(1.0, std::abs(e1(z, q))),
                       "k=" + std::to_string(k));
        }
        per.finalize();
        e1s.finalize();
        return Rows{per, e1s};
    });
}

// ---------------------------------------------------------------- instanton

InstantonConfig instanton_config(const SuiteConfig& cfg, int n, int order, Kernel k) {
    InstantonConfig ic;
    ic.n_colors = n;
    ic.order = order;
    ic.params.eps1 = cfg.eps1;
    ic.params.eps2 = cfg.eps2;
    ic.params.m = cfg.m;
    if (int(cfg.a.size()) == n)
        ic.params.a = cfg.a;
    else
        for (int a = 0; a < n; ++a) ic.params.a.push_back(cplx(0.9 * a + 0.05, -0.6 * a + 0.02));
    ic.params.ell.kernel = k;
    ic.params.ell.beta = cfg.beta;
    ic.params.ell.nome6d = cfg.nome6d;
    ic.fugacity = {cfg.nome};
    return ic;
}

std::vector<long long> colored_partition_counts(int colors, int max) {
    std::vector<long long> c(max + 1, 0);
    c[0] = 1;
    for (int k = 0; k < colors; ++k)
        for (int n = 1; n <= max; ++n)
            for (int i = n; i <= max; ++i) c[i] += c[i - n];
    return c;
}

void instanton_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    for (int n = 1; n <= std::min(3, cfg.n_colors); ++n)
        jobs.push_back([cfg, n] {
            InstantonConfig ic = instanton_config(cfg, n, 6, Kernel::FourD);
            ic.params.m = 0.0;
            const auto z = partition_function(ic).by_total_degree();
            const auto counts = colored_partition_counts(n, 6);
            CheckResult r = row(tag("massless_partition_counts", n), "Z(m = 0) counts colored partitions", 0.0);
            for (int k = 0; k <= 6; ++k)
                r.record(std::abs(z[k] - double(counts[k])), "k=" + std::to_string(k));
            r.finalize();
            return Rows{r};
        });
    for (Kernel k : {Kernel::FourD, Kernel::FiveD, Kernel::SixD})
        jobs.push_back([cfg, ts, k] {
            auto gen = rng_for(cfg, 21 + int(k));
            std::uniform_int_distribution<int> small(-2, 2);
            const int n = 2;
            ParamAssignment pa = instanton_config(cfg, n, 0, k).params;
            pa.x = cplx(0.31, 0.17);
            auto random_char = [&] {
                VirtualCharacter v(n);
                for (int t = 0; t < 6; ++t) {
                    Weight w(n);
                    w.x = small(gen) == 0 ? 1 : 0;
                    w.a = {small(gen), small(gen)};
                    w.e1 = small(gen);
                    w.e2 = small(gen);
                    w.m = small(gen);
                    if (w.is_zero()) w.x = 1;
                    v.add_term(w, small(gen) >= 0 ? 1 : -1);
                }
                return v;
            };
            CheckResult r = row(std::string("pleth_multiplicativity_") + kernel_tag(k), "E[A + B] = E[A] E[B]",
                                1e-12 * ts);
            for (int t = 0; t < 20; ++t) {
                const VirtualCharacter a = random_char(), b = random_char();
                const cplx lhs = pleth_exp(a + b, pa), rhs = pleth_exp(a, pa) * pleth_exp(b, pa);
                r.record(rel_error(std::abs(lhs - rhs), std::abs(lhs), std::abs(rhs)), "t=" + std::to_string(t));
            }
            r.finalize();
            return Rows{r};
        });
    const int order = std::max(1, std::min(2, cfg.degree));
    for (Kernel k : {Kernel::FourD, Kernel::FiveD})
        for (int n = 1; n <= std::min(2, cfg.n_colors); ++n)
            jobs.push_back([cfg, ts, k, n, order] {
                const InstantonConfig ic = instanton_config(cfg, n, order, k);
                const PoleReport good = check_pole_cancellation(ic, order, 1e-2);
                const Partition box({1});
                const PoleReport bad = check_pole_cancellation(ic, order, 1e-2, &box);
                CheckResult r = row(tag("qq_pole_cancellation", k, n), "qq-character average has no poles", 1e-8 * ts);
                r.record(good.max_residual, "order<=" + std::to_string(order));
                r.finalize();
                return Rows{r, control(tag("qq_pole_mutation", k, n), "dropping the one-box term leaves poles",
                                       good.max_residual, bad.max_residual, 1e4)};
            });
}

// ---------------------------------------------------------------- factorization

void factorization_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    const int max_deg = std::min(4, cfg.degree);
    FactorizationOptions opt;
    opt.tolerance = 1e-9 * ts;
    for (int n = 1; n <= std::min(3, cfg.n_colors); ++n)
        for (int d = 0; d <= max_deg; ++d)
            for (FactorizationVariant v : {FactorizationVariant::Matrix, FactorizationVariant::Classical})
                jobs.push_back([cfg, n, d, v, opt] {
                    const std::string base = v == FactorizationVariant::Matrix ? "factorization_matrix" : "factorization_classical";
                    CheckResult r = row(tag(base, n) + "_deg" + std::to_string(d), "operator factorization", opt.tolerance);
                    for (std::uint64_t s = 0; s < 3; ++s) r.merge(check_factorization(n, d, cfg.seed + s, v, opt));
                    r.finalize();
                    return Rows{r};
                });
    for (int d = 0; d <= max_deg; ++d)
        jobs.push_back([cfg, d, opt] {
            CheckResult r = row("factorization_scalar_deg" + std::to_string(d), "scalar operator factorization", opt.tolerance);
            for (std::uint64_t s = 0; s < 3; ++s) r.merge(check_factorization(1, d, cfg.seed + s, FactorizationVariant::Scalar, opt));
            r.finalize();
            return Rows{r};
        });
    if (max_deg >= 1)
        jobs.push_back([cfg, opt, max_deg] {
            const int n = std::min(2, cfg.n_colors);
            const double good = check_factorization(n, max_deg, cfg.seed, FactorizationVariant::Matrix, opt).max_rel_error;
            FactorizationOptions bad = opt;
            bad.mutate = true;
            const double worse = check_factorization(n, max_deg, cfg.seed, FactorizationVariant::Matrix, bad).max_rel_error;
            return Rows{control("factorization_mutation", "perturbed oracle breaks the identity", good, worse, 1e4)};
        });
    for (int n = 1; n <= std::min(3, cfg.n_colors); ++n)
        jobs.push_back([cfg, ts, n] {
            const YOracle y(n, cfg.seed + 100 + n);
            CheckResult val = row(tag("lemma_values", n), "open-bracket products equal qq-character terms", 1e-10 * ts);
            CheckResult fug = row(tag("lemma_fugacity", n), "fugacity weights agree", 0.0);
            for (int w = 0; w < n; ++w)
                for (const Partition& lam : enumerate_partitions_upto(5))
                    for (int p = -3; p <= 3; ++p) {
                        val.merge(lemma_lhs_rhs(lam, p, w, y, 1e-10 * ts));
                        fug.merge(lemma_fugacity(lam, p, w, n));
                    }
            val.finalize();
            fug.finalize();
            return Rows{val, fug};
        });
    for (int n = 1; n <= std::min(3, cfg.n_colors); ++n)
        jobs.push_back([cfg, ts, n] {
            const PhaseSpacePoint pt = chamber_point(cfg, n, Kernel::FourD, 300 + n);
            return Rows{renamed(check_xshift(pt, {0.9, 0.3}, std::min(2, cfg.degree), cfg.seed, 1e-9 * ts),
                                tag("x_shift_relation", n), "shift by m and the nome")};
        });
}

// ---------------------------------------------------------------- jacobi

void jacobi_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    for (int n = 1; n <= std::min(4, cfg.n_colors); ++n)
        jobs.push_back([cfg, ts, n] {
            const PhaseSpacePoint pt = chamber_point(cfg, n, Kernel::FourD, 400 + n);
            Rows out;
            for (cplx z : kProbes) {
                const JacobiReport r = jacobi_identity(pt, z * 1.3, 80, 1e-9 * ts);
                if (out.empty()) {
                    out.push_back(renamed(r.product_vs_sum, tag("jacobi_product_vs_sum", n), "matrix Jacobi product = sum"));
                    out.push_back(renamed(r.determinant, tag("jacobi_determinant", n), "det D1 = theta(1/z) / euler"));
                    if (n == 1) out.push_back(renamed(r.triple_product, "jacobi_triple_product", "scalar triple product"));
                } else {
                    out[0].merge(r.product_vs_sum);
                    out[1].merge(r.determinant);
                    if (n == 1) out[2].merge(r.triple_product);
                }
            }
            if (n == 1) {
                out[2].tolerance = 1e-12 * ts;
                out[2].finalize();
            }
            return out;
        });
}

// ---------------------------------------------------------------- lax

void lax_cm_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    for (int n = 1; n <= std::min(3, cfg.n_colors); ++n)
        jobs.push_back([cfg, ts, n] {
            const PhaseSpacePoint pt = chamber_point(cfg, n, Kernel::FourD, 500 + n);
            CheckResult agree = row(tag("cm_three_constructions", n), "CM Lax from D, product and theta forms", 1e-7 * ts);
            CheckResult per = row(tag("cm_quasi_periodicity", n), "X^{-1} L(z) X + m = L(q z)", 1e-8 * ts);
            const Matrix xm = diag_matrix(pt.x);
            for (cplx z : kProbes) {
                const Matrix ex = lax_cm(pt, z, LaxSource::Explicit);
                const Matrix fd = lax_cm(pt, z, LaxSource::FromD);
                agree.record(rel_diff(fd, ex), "from D");
                agree.record(rel_diff(lax_cm(pt, z, LaxSource::ProductFormula), ex), "product");
                const Matrix rhs = xm.inverse() * fd * xm + pt.m * Matrix::Identity(n, n);
                per.record(rel_diff(lax_cm(pt, pt.nome * z, LaxSource::FromD), rhs), "probe");
            }
            CheckResult res = row(tag("cm_residue", n), "residue -m e e^t at z = 1", 1e-7 * ts);
            const Matrix rz = residue_at_one([&](cplx z) { return lax_cm(pt, z, LaxSource::FromD); }, n);
            res.record(rel_diff(rz, -pt.m * Matrix::Ones(n, n)), "z=1");
            agree.finalize();
            per.finalize();
            res.finalize();
            return Rows{agree, per, res};
        });
    if (cfg.n_colors >= 2)
        jobs.push_back([cfg, ts] {
            PhaseSpacePoint pt = chamber_point(cfg, 2, Kernel::FourD, 550, 0.05);
            const FlowReport f = flow_conservation(pt, {0.55, 0.31}, {-0.4, 0.6}, 0.1, 0.01, 1e-6 * ts);
            CheckResult order = row("cm_flow_rk4_order", "step halving shrinks the error ~16x", 0.25);
            order.record(std::abs(std::log2(f.step_ratio) - 4.0), "log2 ratio");
            order.finalize();
            return Rows{renamed(f.drift, "cm_flow_spectral_drift", "spectrum of L(z1) along the tr L^2 flow"), order};
        });
}

void lax_rs_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    for (int n = 1; n <= std::min(3, cfg.n_colors); ++n)
        jobs.push_back([cfg, ts, n] {
            const PhaseSpacePoint pt = chamber_point(cfg, n, Kernel::FiveD, 600 + n);
            const RsOrientation o = resolve_rs_orientation(pt);
            CheckResult orient = row(tag("rs_orientation", n), "Dinf D1^{-1} matches the theta form", 1e-7 * ts);
            orient.record(o.matching == RsSource::FromDOrientB ? o.error_b : INFINITY, "orientation B");
            orient.finalize();
            CheckResult forms = row(tag("rs_product_vs_explicit", n), "RS closed form against theta form", 1e-7 * ts);
            for (cplx z : kProbes)
                forms.record(rel_diff(lax_rs(pt, z, RsSource::ProductFormula), lax_rs(pt, z, RsSource::Explicit)), "probe");
            forms.finalize();
            CheckResult res = row(tag("rs_residue", n), "residue (1 - e^{beta m}) a v^t", 1e-7 * ts);
            const Matrix rz = residue_at_one([&](cplx z) { return lax_rs_tilde(pt, z, RsSource::FromDOrientB); }, n);
            const std::vector<cplx> a = rs_residue_left(pt), v = v_row(pt);
            const cplx k = 1.0 - std::exp(pt.beta * pt.m);
            Matrix expect(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) expect(i, j) = k * a[i] * v[j];
            res.record(rel_diff(rz, expect), "z=1");
            res.finalize();
            return Rows{orient, control(tag("rs_orientation_a_rejected", n), "D1 Dinf^{-1} does not match",
                                        o.error_b, o.error_a, 1e4),
                        forms, res};
        });
}

// ---------------------------------------------------------------- spectral

void spectral_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    for (int n = 1; n <= std::min(3, cfg.n_colors); ++n) {
        for (Kernel k : {Kernel::FourD, Kernel::FiveD})
            jobs.push_back([cfg, ts, n, k] {
                const PhaseSpacePoint pt = chamber_point(cfg, n, k, 700 + 10 * int(k) + n);
                CheckResult r = row(tag("spectral_closure", k, n), "theta(1/z) det(x - L) / euler = det D", 1e-7 * ts);
                for (cplx z : kProbes) r.merge(spectral_closure(pt, {0.6, 0.1}, z, 1e-7 * ts));
                r.finalize();
                return Rows{r};
            });
        for (Kernel k : {Kernel::FourD, Kernel::FiveD, Kernel::SixD})
            jobs.push_back([cfg, ts, n, k] {
                const PhaseSpacePoint pt = chamber_point(cfg, n, k, 750 + 10 * int(k) + n);
                return Rows{renamed(check_d_quasiperiodicity(pt, {0.3, 0.2}, {0.55, 0.31}, 1e-9 * ts),
                                    tag("d_quasi_periodicity", k, n), "D(x + m, q z) intertwines D(x, z)")};
            });
        jobs.push_back([cfg, ts, n] {
            const PhaseSpacePoint pt = chamber_point(cfg, n, Kernel::SixD, 780 + n);
            return Rows{renamed(check_sixd_transformation(pt, {0.5, 0.2}, {0.55, 0.31}, 1e-8 * ts),
                                tag("sixd_second_period", n), "shift of x by the second period")};
        });
    }
    for (int n = 1; n <= std::min(2, cfg.n_colors); ++n)
        for (Kernel k : {Kernel::FourD, Kernel::SixD})
            jobs.push_back([cfg, ts, n, k] {
                const PhaseSpacePoint pt = chamber_point(cfg, n, k, 800 + 10 * int(k) + n);
                return Rows{renamed(spectral_fourier_check(pt, {0.3, 0.1}, 1.0, 3, 1e-6 * ts), tag("fourier_ratios", k, n),
                                    "f_n(x) / f_0(x + n m) = (-1)^n q^{(n^2+n)/2}")};
            });
}

// ---------------------------------------------------------------- trig

void trig_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    for (Kernel k : {Kernel::FourD, Kernel::FiveD})
        for (int n = 2; n <= std::min(3, cfg.n_colors); ++n)
            jobs.push_back([cfg, ts, n, k] {
                Rows out;
                for (std::uint64_t s = 0; s < 3; ++s) {
                    const PhaseSpacePoint pt = chamber_point(cfg, n, k, 900 + 10 * s + n, 0.0);
                    const YModel y = seeded_model(pt, rng_for(cfg, 950 + 10 * s + n));
                    const TrigReport r = trig_model_checks(pt, y, {0.45, 0.2}, {2.5, 1.5}, 1e-9 * ts);
                    if (out.empty()) {
                        out = {renamed(r.z_independence, tag("trig_z_independence", k, n), "z^0 mode is z-independent"),
                               renamed(r.y_recovery, tag("trig_minor_ratios", k, n), "leading minors recover Y_w"),
                               renamed(r.determinant, tag("trig_determinant", k, n), "det = Y(x) - Y(x - m) / z")};
                    } else {
                        out[0].merge(r.z_independence);
                        out[1].merge(r.y_recovery);
                        out[2].merge(r.determinant);
                    }
                }
                out[0].tolerance = 1e-8 * ts;
                out[0].finalize();
                out.push_back(renamed(trig_spectrum_check(chamber_point(cfg, n, k, 980 + n, 0.0), {0.5, 0.1}, 1e-9 * ts),
                                      tag("trig_characteristic_polynomial", k, n), "Q_N against the Lax spectrum"));
                return out;
            });
    jobs.push_back([cfg, ts] {
        auto gen = rng_for(cfg, 990);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const int n = 3;
        EllipticParams ep{0.0, 0.0, 1.0, Kernel::FourD};
        std::vector<std::vector<cplx>> roots(n + 1);
        for (int k = 1; k <= n; ++k)
            for (int r = 0; r < k; ++r) roots[k].push_back(cplx(u(gen), u(gen)));
        auto q_fn = [&](int k, cplx x) {
            cplx out = 1.0;
            for (cplx a : roots[k]) out *= vartheta(x - a, ep);
            return out;
        };
        const std::vector<cplx> twists = {0.0, {0.3, 0.1}, {0.5, -0.2}};
        CheckResult r = row("bethe_substitution", "Bethe residual from the limit-shape relation", 1e-11 * ts);
        double displayed = INFINITY;
        for (int t = 0; t < 20; ++t) {
            const cplx x(2.0 * u(gen), 2.0 * u(gen));
            for (int w = 1; w < n; ++w) {
                const BetheResidual b = bethe_residual(q_fn, w, x, twists, cfg.m);
                r.record(rel_error(std::abs(b.substituted - b.limit_shape), std::abs(b.substituted), std::abs(b.limit_shape)),
                         "t=" + std::to_string(t));
                displayed = std::min(displayed, rel_error(std::abs(b.as_displayed - b.limit_shape), std::abs(b.as_displayed),
                                                          std::abs(b.limit_shape)));
            }
        }
        r.finalize();
        // The residual with Q_w(x - m) in the denominator in place of Q_{w-1}(x - m) is not an identity.
        return Rows{r, control("bethe_displayed_form_rejected", "Q_w(x - m) denominator variant does not match",
                               r.max_rel_error, displayed, 1e4)};
    });
    if (cfg.n_colors >= 2)
        jobs.push_back([cfg, ts] {
            Rows out;
            for (std::uint64_t s = 0; s < 3; ++s) {
                const PhaseSpacePoint pt = chamber_point(cfg, 2, Kernel::SixD, 1000 + s);
                for (cplx z : kProbes) {
                    const TrigPairReport r = trig_pair_checks(pt, {0.45, 0.15}, z, 1e-9 * ts);
                    const CheckResult parts[] = {r.determinant, r.matrix, r.series_vs_chars, r.five_d, r.dell};
                    const char* names[] = {"trig_pair_determinant", "trig_pair_matrix", "trig_pair_double_sum",
                                           "trig_pair_5d_reduction", "trig_pair_dell_limit"};
                    if (out.empty())
                        for (int i = 0; i < 5; ++i) out.push_back(renamed(parts[i], names[i], "N = 2 trigonometric identities"));
                    else
                        for (int i = 0; i < 5; ++i) out[i].merge(parts[i]);
                }
            }
            return out;
        });
}

// ---------------------------------------------------------------- eigenvector

void eigenvector_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    jobs.push_back([cfg] {
        CheckResult r = row("dn_product_vs_diagonal", "diagonal prefactor D_n", 0.0);
        for (int n = 1; n <= std::max(2, cfg.n_colors); ++n)
            for (int s = -6; s <= 6; ++s) r.merge(dn_check(s, n));
        r.finalize();
        return Rows{r};
    });
    for (int n = 1; n <= std::min(4, cfg.n_colors); ++n)
        jobs.push_back([cfg, ts, n] {
            const QTildeOracle q(n, cfg.seed + 1100 + n);
            std::vector<std::pair<int, int>> keys;
            for (int j = -3; j <= 3; ++j)
                for (int k = -4; k <= 4; ++k) keys.push_back({j, k});
            CheckResult mat = row(tag("chi24_matrix_relation", n), "empty-diagram eigen-relation", 1e-10 * ts);
            for (auto [j, k] : keys) mat.merge(chi24_matrix_check(q, j, k, 1e-10 * ts));
            mat.finalize();
            return Rows{renamed(chi24_shift_check(q, keys, 1e-11 * ts), tag("chi24_shift_relation", n)), mat};
        });
    jobs.push_back([cfg, ts] {
        Rows out;
        for (std::uint64_t s = 0; s < 3; ++s) {
            const QTildeOracle q(2, cfg.seed + 1200 + s);
            for (int j = -2; j <= 2; ++j)
                for (int k = -2; k <= 2; ++k) {
                    const Sl2Report r = sl2_eigen_check(q, j, k, 1.0, false, 1e-10 * ts);
                    const CheckResult parts[] = {r.order0, r.box_shift, r.box_definition, r.second_row, r.order1};
                    if (out.empty())
                        for (const CheckResult& c : parts) out.push_back(c);
                    else
                        for (int i = 0; i < 5; ++i) out[i].merge(parts[i]);
                }
        }
        const QTildeOracle q(2, cfg.seed + 1250);
        const double clean = sl2_eigen_check(q, 0, 0).order1.max_rel_error;
        const double bad = sl2_eigen_check(q, 0, 0, 1.0 + 1e-4).order1.max_rel_error;
        out.push_back(control("sl2_mutation_control", "1e-4 box perturbation is visible at first order", clean, bad, 1e4));
        return out;
    });
    for (int n = 2; n <= std::min(3, std::max(2, cfg.n_colors)); ++n) {
        jobs.push_back([n] {
            const RecursionReport r = recursion_sweep(n, 6, 3);
            return Rows{renamed(r.character, tag("recursion_character", n)),
                        renamed(r.prefactor, tag("recursion_prefactor", n)),
                        renamed(r.bijection, tag("recursion_bijection", n))};
        });
        jobs.push_back([cfg, n] {
            auto gen = rng_for(cfg, 1300 + n);
            const std::vector<Tuple> tuples = enumerate_tuples(n, 2);
            SplitReport acc;
            acc.regrouping = row(tag("split_regrouping", n), "graded folded character regrouping", 0.0);
            acc.tilde_sums = row(tag("split_tilde_sums", n), "rescaled component totals", 0.0);
            acc.singular = row(tag("split_singular_part", n), "singular part of the folded character", 0.0);
            for (int w = 0; w < n; ++w)
                for (const Partition& mu : enumerate_partitions_upto(4)) {
                    const SplitReport r = folded_split_check(w, tuples[gen() % tuples.size()], mu);
                    acc.regrouping.merge(r.regrouping);
                    acc.tilde_sums.merge(r.tilde_sums);
                    acc.singular.merge(r.singular);
                }
            return Rows{acc.regrouping, acc.tilde_sums, acc.singular};
        });
    }
}

// ---------------------------------------------------------------- duality

void duality_jobs(const SuiteConfig& cfg, double ts, std::vector<Job>& jobs) {
    const int large = cfg.window;
    const int small = std::max(1, cfg.window / 2);
    for (Kernel k : {Kernel::FourD, Kernel::FiveD})
        for (int n = 1; n <= std::min(3, cfg.n_colors); ++n)
            jobs.push_back([cfg, ts, n, k, large, small] {
                const PhaseSpacePoint pt = chamber_point(cfg, n, k, 1400 + 10 * int(k) + n);
                const YModel y = seeded_model(pt, rng_for(cfg, 1450 + 10 * int(k) + n));
                const DualityReport r = duality_ratio_check(pt, y, {0.4, 0.3}, {8e3, 6e3}, small, large, 1e-7 * ts);
                return Rows{renamed(r.structure, tag("duality_window_structure", k, n), "window spin-chain matrix is bidiagonal"),
                            renamed(r.product, tag("duality_window_product", k, n), "window determinant as a product"),
                            renamed(r.ratio, tag("duality_ratio", k, n), "det D(x + m) / det D(x) from the spin chain"),
                            renamed(r.decay, tag("duality_decay", k, n), "truncation error falls 1e3x from M/2 to M")};
            });
}

void collect_jobs(const std::string& suite, const SuiteConfig& cfg, std::vector<Job>& jobs) {
    const double ts = cfg.tolerance_scale;
    if (suite == "theta") theta_jobs(cfg, ts, jobs);
    else if (suite == "instanton") instanton_jobs(cfg, ts, jobs);
    else if (suite == "factorization") factorization_jobs(cfg, ts, jobs);
    else if (suite == "jacobi") jacobi_jobs(cfg, ts, jobs);
    else if (suite == "lax-cm") lax_cm_jobs(cfg, ts, jobs);
    else if (suite == "lax-rs") lax_rs_jobs(cfg, ts, jobs);
    else if (suite == "spectral") spectral_jobs(cfg, ts, jobs);
    else if (suite == "trig") trig_jobs(cfg, ts, jobs);
    else if (suite == "eigenvector") eigenvector_jobs(cfg, ts, jobs);
    else if (suite == "duality") duality_jobs(cfg, ts, jobs);
    else if (suite == "all") {
        for (const std::string& s : suite_names())
            if (s != "all") collect_jobs(s, cfg, jobs);
    } else
        throw ConfigError("unknown suite '" + suite + "'");
}

// ---------------------------------------------------------------- JSON

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);  // shortest round-trip form
}

double parse_num(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw ConfigError("expected a number or a decimal string");
    const std::string s = j.get<std::string>();
    if (s == "nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ConfigError("malformed number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("malformed number '" + s + "'");
    }
}

Json complex_json(cplx z) { return Json::array({num(z.real()), num(z.imag())}); }

cplx parse_complex(const Json& j) {
    if (j.is_array()) {
        if (j.size() != 2) throw ConfigError("complex numbers are [re, im] pairs");
        return {parse_num(j[0]), parse_num(j[1])};
    }
    return {parse_num(j), 0.0};
}

std::vector<cplx> parse_complex_list(const Json& j) {
    if (!j.is_array()) throw ConfigError("expected a list of complex numbers");
    std::vector<cplx> out;
    for (const Json& e : j) out.push_back(parse_complex(e));
    return out;
}

long long parse_int(const Json& j) {
    const double v = parse_num(j);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError("expected an integer");
    return static_cast<long long>(v);
}

Json config_json(const SuiteConfig& c) {
    Json j;
    j["suite"] = c.suite;
    j["n_colors"] = std::to_string(c.n_colors);
    j["degree"] = std::to_string(c.degree);
    j["window"] = std::to_string(c.window);
    j["seed"] = std::to_string(c.seed);
    j["m"] = complex_json(c.m);
    j["eps1"] = complex_json(c.eps1);
    j["eps2"] = complex_json(c.eps2);
    j["nome"] = complex_json(c.nome);
    j["beta"] = complex_json(c.beta);
    j["nome6d"] = complex_json(c.nome6d);
    for (const char* key : {"a", "x", "p"}) {
        const std::vector<cplx>& v = key[0] == 'a' ? c.a : key[0] == 'x' ? c.x : c.p;
        Json arr = Json::array();
        for (cplx z : v) arr.push_back(complex_json(z));
        j[key] = arr;
    }
    j["tolerance_scale"] = num(c.tolerance_scale);
    return j;
}

SuiteConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    SuiteConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "suite") {
            if (!v.is_string()) throw ConfigError("suite must be a string");
            c.suite = v.get<std::string>();
        } else if (key == "n_colors") c.n_colors = int(parse_int(v));
        else if (key == "degree" || key == "order") c.degree = int(parse_int(v));
        else if (key == "window") c.window = int(parse_int(v));
        else if (key == "seed") {
            const long long s = parse_int(v);
            if (s < 0) throw ConfigError("seed must be non-negative");
            c.seed = std::uint64_t(s);
        } else if (key == "m") c.m = parse_complex(v);
        else if (key == "eps1") c.eps1 = parse_complex(v);
        else if (key == "eps2") c.eps2 = parse_complex(v);
        else if (key == "nome" || key == "q") c.nome = parse_complex(v);
        else if (key == "beta") c.beta = parse_complex(v);
        else if (key == "nome6d" || key == "p6d") c.nome6d = parse_complex(v);
        else if (key == "a") c.a = parse_complex_list(v);
        else if (key == "x") c.x = parse_complex_list(v);
        else if (key == "p") c.p = parse_complex_list(v);
        else if (key == "tolerance_scale") c.tolerance_scale = parse_num(v);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return c;
}

}  // namespace

void SuiteConfig::validate() const {
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw ConfigError("unknown suite '" + suite + "'");
    if (n_colors < 1 || n_colors > 8) throw ConfigError("n_colors must be in 1..8");
    if (degree < 0 || degree > 8) throw ConfigError("degree must be in 0..8");
    if (window < 2 || window > 40) throw ConfigError("window must be in 2..40");
    if (!(std::abs(nome) > 0.0 && std::abs(nome) < 1.0)) throw ConfigError("nome must satisfy 0 < |nome| < 1");
    if (!(std::abs(nome6d) < 1.0)) throw ConfigError("nome6d must satisfy |nome6d| < 1");
    if (m == cplx(0.0)) throw ConfigError("m must be nonzero");
    if (beta == cplx(0.0)) throw ConfigError("beta must be nonzero");
    if (!(tolerance_scale > 0.0 && std::isfinite(tolerance_scale))) throw ConfigError("tolerance_scale must be positive");
    if (!p.empty() && p.size() != x.size()) throw ConfigError("x and p must have the same length");
    if (!x.empty()) {
        PhaseSpacePoint pt;
        pt.x = x;
        pt.p = p.empty() ? std::vector<cplx>(x.size(), 0.0) : p;
        pt.m = m;
        pt.nome = nome;
        pt.beta = beta;
        try {
            pt.validate();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        if (!pt.in_chamber()) throw ConfigError("x lies outside the stability chamber");
    }
    for (cplx v : {m, eps1, eps2, nome, beta, nome6d})
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ConfigError("parameters must be finite");
}

SuiteConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

bool Report::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

Report run_suite(const SuiteConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Job> jobs;
    collect_jobs(cfg.suite, cfg, jobs);
    std::vector<std::future<Rows>> running;
    for (Job& j : jobs) running.push_back(std::async(std::launch::async, j));
    Report rep;
    // every future is drained before rethrowing so no job outlives the call
    std::exception_ptr first;
    for (auto& f : running) {
        try {
            for (CheckResult& c : f.get()) rep.checks.push_back(std::move(c));
        } catch (...) {
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
    std::stable_sort(rep.checks.begin(), rep.checks.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    rep.suite = cfg.suite;
    rep.seed = cfg.seed;
    rep.version = QQLAX_VERSION;
    rep.config = cfg;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string emit_report(const Report& r, ReportFormat format, bool with_timing) {
    if (format == ReportFormat::Text) {
        std::string out = "suite " + r.suite + "  seed " + std::to_string(r.seed) + "  version " + r.version + "\n";
        for (const CheckResult& c : r.checks) {
            char line[512];
            std::snprintf(line, sizeof line, "%-4s %-48s err %-12.4g tol %-10.3g %s\n", c.pass ? "PASS" : "FAIL",
                          c.name.c_str(), c.max_rel_error, c.tolerance, c.anchor.c_str());
            out += line;
        }
        const std::size_t failed = std::count_if(r.checks.begin(), r.checks.end(), [](const CheckResult& c) { return !c.pass; });
        out += "result: " + std::to_string(r.checks.size() - failed) + "/" + std::to_string(r.checks.size()) + " passed";
        if (with_timing) {
            char t[48];
            std::snprintf(t, sizeof t, ", wall time %.3f s", r.wall_time);
            out += t;
        }
        return out + "\n";
    }
    Json j;
    j["suite"] = r.suite;
    j["version"] = r.version;
    j["seed"] = std::to_string(r.seed);
    j["pass"] = r.pass();
    j["wall_time"] = with_timing ? Json(num(r.wall_time)) : Json(nullptr);
    j["config"] = config_json(r.config);
    Json checks = Json::array();
    for (const CheckResult& c : r.checks) {
        Json e;
        e["name"] = c.name;
        e["anchor"] = c.anchor;
        e["max_rel_error"] = num(c.max_rel_error);
        e["tolerance"] = num(c.tolerance);
        e["pass"] = c.pass;
        e["cells"] = std::to_string(c.cells);
        e["failures"] = c.failures;
        checks.push_back(e);
    }
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

Report parse_report(const std::string& text) {
    const Json j = Json::parse(text);
    Report r;
    r.suite = j.at("suite").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.seed = std::uint64_t(parse_int(j.at("seed")));
    if (!j.at("wall_time").is_null()) r.wall_time = parse_num(j.at("wall_time"));
    r.config = config_from_json(j.at("config"));
    for (const Json& e : j.at("checks")) {
        CheckResult c;
        c.name = e.at("name").get<std::string>();
        c.anchor = e.at("anchor").get<std::string>();
        c.max_rel_error = parse_num(e.at("max_rel_error"));
        c.tolerance = parse_num(e.at("tolerance"));
        c.pass = e.at("pass").get<bool>();
        c.cells = int(parse_int(e.at("cells")));
        c.failures = e.at("failures").get<std::vector<std::string>>();
        r.checks.push_back(c);
    }
    return r;
}

}  // namespace qqlax
