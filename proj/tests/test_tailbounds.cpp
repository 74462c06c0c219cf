#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <random>

#include "valdet/tailbounds.hpp"

using namespace valdet;

namespace {

bool near(const Interval& iv, double v, double tol = 1e-12) {
    return iv.lo_d() <= v + tol && iv.hi_d() >= v - tol;
}

// brute force: all k-subsets of {t_1..t_L}
double subset_sum_oracle(const std::vector<double>& t, int k) {
    int L = (int)t.size();
    double total = 0;
    for (unsigned mask = 0; mask < (1u << L); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        double prod = 1;
        for (int i = 0; i < L; ++i)
            if (mask & (1u << i)) prod *= t[(size_t)i];
        total += prod;
    }
    return total;
}

} // namespace

TEST_CASE("tail_eps2 trivial plug-ins") {
    const mpfr_prec_t p = 128;
    auto r1 = tail_eps2(Interval::point(1.0, p), Interval::point(0.5, p), 10);
    CHECK(near(r1, std::ldexp(1.0, -9), 1e-30));  // 2^-10 * 2 = 2^-9
    auto r2 = tail_eps2(Interval::point(2.0, p),
                        Interval::ratio(2, 3, p), 0);
    CHECK(near(r2, 6.0, 1e-30));
}

TEST_CASE("t_sequence: exact geometric beta") {
    // beta_k = 4^{-k}, eps = 0: t_m = sqrt(sum_{k>=m-1} 4^{-k})
    //        = sqrt(4^{-(m-1)} * 4/3) (up to the finite-L truncation, which
    //        is absorbed by eps2 = the true tail beyond L)
    const mpfr_prec_t p = 160;
    const int L = 20;
    std::vector<Interval> beta;
    for (int k = 0; k < L; ++k)
        beta.push_back(Interval::point(1.0, p).pow_int(0) *
                       Interval::ratio(1, 1, p) / Interval::ratio(4, 1, p).pow_int(k));
    Interval eps2 = tail_eps2(Interval::ratio(1, 1, p), Interval::ratio(1, 4, p), L);
    Interval eps3 = Interval::point(0.0, p);
    auto t = t_sequence(beta, eps2, eps3, Interval::ratio(1, 2, p),
                        Interval::ratio(1, 1, p), L);
    for (int m = 1; m <= 6; ++m) {
        double expect = std::sqrt(std::pow(4.0, -(m - 1)) * 4.0 / 3.0);
        CHECK(near(t[(size_t)m - 1], expect, 1e-12));
    }
    // monotone decreasing
    for (int m = 1; m < L; ++m)
        CHECK(t[(size_t)m].hi_d() <= t[(size_t)m - 1].hi_d() + 1e-30);
}

TEST_CASE("t_sequence: zero betas give sqrt-of-eps floors only") {
    const mpfr_prec_t p = 128;
    std::vector<Interval> beta(8, Interval::point(0.0, p));
    auto t = t_sequence(beta, Interval::point(0.0, p), Interval::point(0.0, p),
                        Interval::ratio(1, 2, p), Interval::ratio(1, 1, p), 8);
    for (auto& tm : t) CHECK(near(tm, 0.0, 1e-60));
}

TEST_CASE("elementary symmetric: 0.5, 0.25, 0.125 exact") {
    const mpfr_prec_t p = 128;
    std::vector<Interval> t{Interval::point(0.5, p), Interval::point(0.25, p),
                            Interval::point(0.125, p)};
    Interval eps4(p);
    auto B = elementary_symmetric(t, 3, &eps4);
    CHECK(near(B[1], 0.875, 1e-30));
    CHECK(near(B[2], 0.21875, 1e-30));
    CHECK(near(B[3], 0.015625, 1e-30));
    CHECK(eps4.hi_d() < 1e-30);
}

TEST_CASE("elementary symmetric matches brute-force subset sums, L <= 12") {
    const mpfr_prec_t p = 128;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 0.9);
    for (int trial = 0; trial < 4; ++trial) {
        int L = 8 + (int)(rng() % 5);
        std::vector<double> td;
        std::vector<Interval> t;
        for (int i = 0; i < L; ++i) {
            td.push_back(u(rng));
            t.push_back(Interval::point(td.back(), p));
        }
        auto B = elementary_symmetric(t, L, nullptr);
        for (int k = 1; k <= L; ++k)
            CHECK(near(B[(size_t)k], subset_sum_oracle(td, k), 1e-10));
    }
}

TEST_CASE("geometric t: q-binomial structure (cross-check at small L)") {
    const mpfr_prec_t p = 160;
    const double q = 0.5;
    const int L = 10;
    std::vector<double> td;
    std::vector<Interval> t;
    for (int m = 1; m <= L; ++m) {
        td.push_back(std::pow(q, m));
        t.push_back(Interval::point(td.back(), p));
    }
    auto B = elementary_symmetric(t, L, nullptr);
    for (int k = 1; k <= 5; ++k)
        CHECK(near(B[(size_t)k], subset_sum_oracle(td, k), 1e-12));
    // leading behavior q^{k(k+1)/2}
    for (int k = 1; k <= 5; ++k)
        CHECK(B[(size_t)k].hi_d() >= std::pow(q, k * (k + 1) / 2.0));
}

TEST_CASE("euler_bound plug-ins: 1, 1/3, 1/21") {
    const mpfr_prec_t p = 128;
    Interval C = Interval::point(1.0, p);
    Interval r = Interval::point(0.5, p);
    CHECK(near(euler_bound(C, r, 1), 1.0, 1e-30));
    CHECK(near(euler_bound(C, r, 2), 1.0 / 3.0, 1e-30));
    CHECK(near(euler_bound(C, r, 3), 1.0 / 21.0, 1e-30));
}

TEST_CASE("single branch z/2 with zero weight family: beta_k = 2^{-2k}") {
    // L q_k(z) = (z/2)^k on the unit disc at 0, with weight 1: the plan
    // weight |psi'|^t at t = 0 is identically 1.
    const mpfr_prec_t p = 192;
    auto sys = load_system(
        "system=custom\nbranch.0.moebius=1,0,0,2\ndisc.center=0\ndisc.radius=1\n", p);
    auto plan = WeightPlan::dimension(Interval::point(0.0, p));
    Interval eps3(p);
    auto beta = basis_image_norms(sys, plan, Interval::point(0.0, p), 2, 12, &eps3);
    for (int k = 0; k < 12; ++k)
        CHECK(near(beta[(size_t)k], std::pow(2.0, -2.0 * k), 1e-9));
    CHECK(eps3.hi_d() < 1e-8);
}

TEST_CASE("E2 certificate: theta 2/3, decaying beta, sound bounds") {
    const mpfr_prec_t p = 256;
    auto sys = load_builtin("e2", p);
    Interval s_star = Interval::from_decimal("0.5312805062772051", p);
    Interval box = Interval::from_decimal("0.531", "0.532", p);
    auto plan = WeightPlan::dimension(box.mid());

    const int N = 8, L = 60;
    auto traces = trace_sums(sys, WeightPlan::dimension(s_star), N + 4);
    auto series = coefficients_from_traces(traces, N + 4, p);
    auto seriesN = coefficients_from_traces(traces, N, p);

    auto cert = build_certificate(sys, plan, box, seriesN.eps1, N, L);
    CHECK(cert.theta.hi_d() < 0.6677);
    CHECK(cert.theta.hi_d() > 0.666);
    CHECK(cert.geo.hi_d() < 1e-9);

    // beta decays like theta^{2k}
    CHECK(cert.beta[20].hi_d() < cert.beta[0].hi_d() * std::pow(0.67, 38));

    // soundness: the bound dominates the directly computed coefficients
    for (int n = N + 1; n <= N + 4; ++n) {
        Interval g = coefficient_bound(cert, n);
        double an = std::abs(series.a[(size_t)n - 1].mid_d());
        CHECK(g.hi_d() >= an);
    }

    // monotone beyond L
    Interval gL1 = coefficient_bound(cert, L + 1);
    Interval gL2 = coefficient_bound(cert, L + 5);
    CHECK(gL2.hi_d() <= gL1.hi_d());

    // remainder at z = 1 small, and rejects |z| geo >= 1
    Interval R = determinant_remainder(cert, seriesN, Interval::point(1.0, p));
    CHECK(R.hi_d() < 1e-4);
    CHECK(R.hi_d() > 0.0);
    CHECK_THROWS_AS(
        determinant_remainder(cert, seriesN, Interval::point(1e12, p)),
        RadiusExceeded);
}

TEST_CASE("euler bound dominates affine-cantor coefficients (exact eigenvalues)") {
    const mpfr_prec_t p = 192;
    auto sys = load_builtin("affine_cantor", p);
    Interval t = Interval::point(2.0, p).log() / Interval::point(3.0, p).log();
    auto series = coefficients_from_traces(
        trace_sums(sys, WeightPlan::dimension(t), 12), 12, p);
    // s_l <= C r^l with r = theta = 2/3 on the radius-1 disc; C from the
    // certificate model sqrt(C2/(1-th^2))/th with C2 = (K max|w|)^2
    auto plan = WeightPlan::dimension(t);
    Interval box = Interval::hull(t, t);
    auto cert = build_certificate(sys, plan, box, series.eps1, 4, 40);
    Interval Ceff = (cert.C / (Interval::ratio(1, 1, p) - cert.theta.sqr())).sqrt() /
                    cert.theta;
    for (int n = 2; n <= 12; ++n) {
        Interval eb = euler_bound(Ceff, cert.theta, n);
        CHECK(eb.hi_d() >= std::abs(series.a[(size_t)n - 1].mid_d()));
    }
}

TEST_CASE("weighted tails: closed forms match brute force") {
    const mpfr_prec_t p = 160;
    auto sys = load_builtin("e2", p);
    Interval box = Interval::from_decimal("0.531", "0.532", p);
    auto plan = WeightPlan::dimension(box.mid());
    auto series = coefficients_from_traces(
        trace_sums(sys, WeightPlan::dimension(box.mid()), 6), 6, p);
    auto cert = build_certificate(sys, plan, box, series.eps1, 6, 30);
    for (int pow = 0; pow <= 2; ++pow) {
        Interval closed = coefficient_tail_weighted(cert, pow);
        double brute = 0;
        for (int n = cert.N + 1; n <= cert.L + 400; ++n) {
            double g = n <= cert.L ? coefficient_bound(cert, n).hi_d()
                                   : cert.xi.hi_d() * std::pow(cert.geo.hi_d(), n);
            brute += std::pow((double)n, pow) * g;
        }
        CHECK(closed.hi_d() >= brute * (1 - 1e-9));
        CHECK(closed.hi_d() <= brute * 1.05 + 1e-290);
    }
}

TEST_CASE("certificate JSON carries the expected fields") {
    const mpfr_prec_t p = 160;
    auto sys = load_builtin("affine_cantor", p);
    Interval t = Interval::from_decimal("0.6309", p);
    auto series = coefficients_from_traces(
        trace_sums(sys, WeightPlan::dimension(t), 4), 4, p);
    auto cert = build_certificate(sys, WeightPlan::dimension(t),
                                  Interval::hull(t, t), series.eps1, 4, 24);
    auto j = certificate_to_json(cert);
    for (const char* key : {"theta", "\"C\"", "\"N\"", "\"L\"", "eps", "gamma_max", "xi"})
        CHECK(j.find(key) != std::string::npos);
}
