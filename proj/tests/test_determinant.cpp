#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "valdet/determinant.hpp"

using namespace valdet;

namespace {

bool near(const Interval& iv, double v, double tol = 1e-12) {
    return iv.lo_d() <= v + tol && iv.hi_d() >= v - tol;
}

// Brute-force oracle: coefficients of exp(-sum_{n<=N} tr_n z^n / n) by
// composing the exponential power series term by term (interval arithmetic,
// independent of the production recursion).
std::vector<Interval> exp_series_oracle(const std::vector<Interval>& tr, int N,
                                        mpfr_prec_t prec) {
    // u(z) = -sum tr_n z^n / n ; exp(u) = sum u^k / k!
    std::vector<Interval> u((size_t)N + 1, Interval::point(0.0, prec));
    for (int n = 1; n <= N; ++n)
        u[(size_t)n] = -(tr[(size_t)n - 1] * Interval::ratio(1, n, prec));
    std::vector<Interval> acc((size_t)N + 1, Interval::point(0.0, prec));
    acc[0] = Interval::ratio(1, 1, prec);  // u^0
    std::vector<Interval> out = acc;
    std::vector<Interval> upow = acc;
    Interval factorial = Interval::ratio(1, 1, prec);
    for (int k = 1; k <= N; ++k) {
        // upow = upow * u (truncated)
        std::vector<Interval> next((size_t)N + 1, Interval::point(0.0, prec));
        for (int i = 0; i <= N; ++i)
            for (int j = 0; i + j <= N; ++j)
                next[(size_t)(i + j)] += upow[(size_t)i] * u[(size_t)j];
        upow = next;
        factorial = factorial * Interval::ratio(k, 1, prec);
        for (int i = 0; i <= N; ++i) out[(size_t)i] += upow[(size_t)i] / factorial;
    }
    return out;  // out[n] = a_n, out[0] = 1
}

std::vector<TraceVector> make_traces(const std::vector<double>& tr,
                                     mpfr_prec_t prec) {
    std::vector<TraceVector> out;
    for (size_t i = 0; i < tr.size(); ++i) {
        TraceVector t;
        t.n = (int)i + 1;
        t.tr = Interval::point(tr[i], prec);
        t.tr_dt = Interval::point(0.0, prec);
        t.tr_dtt = Interval::point(0.0, prec);
        out.push_back(t);
    }
    return out;
}

} // namespace

TEST_CASE("a1 = -tr1 and a2 = (tr1^2 - tr2)/2") {
    const mpfr_prec_t p = 128;
    auto traces = make_traces({3.0, 5.0}, p);
    auto s = coefficients_from_traces(traces, 2, p);
    CHECK(near(s.a[0], -3.0, 1e-30));
    CHECK(near(s.a[1], (9.0 - 5.0) / 2, 1e-30));
}

TEST_CASE("recursion matches the exponential-series oracle on random traces") {
    const mpfr_prec_t p = 160;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<double> tr;
        for (int n = 0; n < 6; ++n) tr.push_back(u(rng));
        auto s = coefficients_from_traces(make_traces(tr, p), 6, p);
        std::vector<Interval> trv;
        for (double v : tr) trv.push_back(Interval::point(v, p));
        auto oracle = exp_series_oracle(trv, 6, p);
        for (int n = 1; n <= 6; ++n)
            CHECK(s.a[(size_t)n - 1].intersects(oracle[(size_t)n]));
    }
}

TEST_CASE("exact doubling traces: geometric identity with one point removed") {
    // mixing plan: weight |psi'| and denominator 1-psi'; the 2^n words
    // contain the identified boundary pair counted once, so
    // tr_n = (2^n - 1) 2^-n / (1 - 2^-n) = 1.
    auto sys = load_builtin("doubling", 192);
    auto table = build_orbit_table(sys, 6);
    auto plan = WeightPlan::mixing(192);
    for (int n = 1; n <= 6; ++n) {
        auto t = trace_sum(sys, table, plan, n);
        CHECK(near(t.tr, 1.0, 1e-40));
    }
    // determinant 1 - z: a_1 = -1, a_n = 0 beyond
    auto traces = trace_sums(sys, plan, 6);
    auto s = coefficients_from_traces(traces, 6, 192);
    CHECK(near(s.a[0], -1.0, 1e-40));
    for (int n = 2; n <= 6; ++n) CHECK(near(s.a[(size_t)n - 1], 0.0, 1e-40));
}

TEST_CASE("exact doubling lyapunov plan: tr_dt(0) = -n log 2 and sums") {
    // weight family g0 = -log|T'|, direction -log|T'|: tr_n(t) = 2^{-nt},
    // so tr(0) = 1, tr_dt(0) = -n log 2; the series terminates at n = 1 with
    // a_1(t) = -2^{-t}, giving A_N = -1, C_N = log 2 and -C/A = log 2.
    auto sys = load_builtin("doubling", 256);
    auto plan = WeightPlan::lyapunov(256);
    auto traces = trace_sums(sys, plan, 5);
    double log2 = std::log(2.0);
    for (int n = 1; n <= 5; ++n) {
        CHECK(near(traces[(size_t)n - 1].tr, 1.0, 1e-40));
        CHECK(near(traces[(size_t)n - 1].tr_dt, -n * log2, 1e-13));
    }
    auto s = coefficients_from_traces(traces, 5, 256);
    CHECK(near(s.a[0], -1.0, 1e-40));
    CHECK(near(s.a_dt[0], log2, 1e-13));
    auto q = quantity_sums(s);
    CHECK(near(q.A, -1.0, 1e-40));
    CHECK(near(q.C, log2, 1e-13));

    // second derivatives are produced in variance mode only
    auto vplan = WeightPlan::variance(Observable::log_deriv, 256);
    auto vs = coefficients_from_traces(trace_sums(sys, vplan, 5), 5, 256);
    CHECK(near(quantity_sums(vs).E, -(log2 * log2), 1e-13));  // a1''(0)
}

TEST_CASE("affine cantor dimension plan: tr1 = 3^(1-t)") {
    const mpfr_prec_t p = 192;
    auto sys = load_builtin("affine_cantor", p);
    auto table = build_orbit_table(sys, 3);
    double t0 = 0.4;
    auto plan = WeightPlan::dimension(Interval::from_decimal("0.4", p));
    auto t1 = trace_sum(sys, table, plan, 1);
    CHECK(near(t1.tr, 2.0 * std::pow(3.0, -t0) / (1 - 1.0 / 3.0), 1e-13));
}

TEST_CASE("affine cantor coefficients match the eigenvalue-product oracle") {
    // L_t has eigenvalues 2*3^{-t-k}, k >= 0, so d(z,t) = prod (1 - 2 3^{-t-k} z).
    const mpfr_prec_t p = 256;
    auto sys = load_builtin("affine_cantor", p);
    Interval t = Interval::point(2.0, p).log() / Interval::point(3.0, p).log();
    auto plan = WeightPlan::dimension(t);
    auto traces = trace_sums(sys, plan, 10);
    auto s = coefficients_from_traces(traces, 10, p);

    // oracle: expand the finite product over k = 0..150 (tail ~ 3^-151,
    // negligible against the comparison tolerance)
    std::vector<Interval> poly((size_t)11, Interval::point(0.0, p));
    poly[0] = Interval::ratio(1, 1, p);
    Interval lam = Interval::ratio(2, 1, p) * Interval::point(3.0, p).pow(-t);
    for (int k = 0; k <= 150; ++k) {
        Interval lk = lam * Interval::point(3.0, p).pow_int(-k);
        for (int i = 10; i >= 1; --i)
            poly[(size_t)i] = poly[(size_t)i] - lk * poly[(size_t)i - 1];
    }
    for (int n = 1; n <= 10; ++n) {
        Interval diff = s.a[(size_t)n - 1] - poly[(size_t)n];
        CHECK(diff.mag().hi_d() < 1e-40);
    }
    // d(1, log2/log3) = 0: the truncated value goes to 0 with N
    auto v6 = evaluate_truncated_real(
        coefficients_from_traces(traces, 6, p), Interval::ratio(1, 1, p));
    auto v10 = evaluate_truncated_real(s, Interval::ratio(1, 1, p));
    CHECK(std::abs(v10.mid_d()) < std::abs(v6.mid_d()));
    CHECK(std::abs(v10.mid_d()) < 1e-12);
}

TEST_CASE("derivative coefficients agree with central finite differences") {
    // a_n'(t0) vs (a_n(t0+h) - a_n(t0-h)) / 2h at 512 bits, h = 1e-20
    const mpfr_prec_t p = 512;
    auto sys = load_builtin("e2", p);
    const int N = 5;
    Interval t0 = Interval::from_decimal("0.5", p);
    Interval h = Interval::from_decimal("1e-20", p);
    auto at = [&](const Interval& t) {
        auto plan = WeightPlan::dimension(t);
        return coefficients_from_traces(trace_sums(sys, plan, N), N, p);
    };
    auto mid = at(t0), up = at(t0 + h), dn = at(t0 - h);
    for (int n = 1; n <= N; ++n) {
        Interval fd = (up.a[(size_t)n - 1] - dn.a[(size_t)n - 1]) /
                      (Interval::ratio(2, 1, p) * h);
        Interval diff = fd - mid.a_dt[(size_t)n - 1];
        CHECK(diff.mag().hi_d() < 1e-35);  // O(h^2) dominates
    }
}

TEST_CASE("variance-mode second derivatives: centering transform identity") {
    const mpfr_prec_t p = 192;
    auto sys = load_builtin("lanford", p);
    auto plan = WeightPlan::variance(Observable::log_deriv, p);
    auto traces = trace_sums(sys, plan, 4);
    Interval m = Interval::from_decimal("0.65766", p);
    auto centered = center_traces(traces, m);
    // centering subtracts n*m from the orbit sum: check first trace by hand
    // tr_dt' = tr_dt + n m tr
    for (int n = 1; n <= 4; ++n) {
        Interval expect = traces[(size_t)n - 1].tr_dt +
                          Interval::ratio(n, 1, p) * m * traces[(size_t)n - 1].tr;
        CHECK(centered[(size_t)n - 1].tr_dt.intersects(expect));
    }
}

TEST_CASE("super-exponential decay of E2 coefficients (dimension plan)") {
    const mpfr_prec_t p = 256;
    auto sys = load_builtin("e2", p);
    Interval t = Interval::from_decimal("0.5312805062772051", p);
    auto s = coefficients_from_traces(trace_sums(sys, WeightPlan::dimension(t), 12),
                                      12, p);
    // |a_n| <= c * theta^(n(n+1)/2) with theta = 2/3 for some moderate c:
    // check the midpoint inequality with c = 40 (covers the constant)
    double th = 2.0 / 3.0;
    for (int n = 2; n <= 12; ++n) {
        double an = std::abs(s.a[(size_t)n - 1].mid_d());
        double bound = 40.0 * std::pow(th, 0.5 * n * (n + 1));
        CHECK(an <= bound);
    }
    // truncation differences at z=1 shrink super-exponentially
    double prev = 1e300;
    for (int N = 4; N <= 12; N += 2) {
        auto sN = coefficients_from_traces(trace_sums(sys, WeightPlan::dimension(t), N),
                                           N, p);
        auto sN1 = coefficients_from_traces(
            trace_sums(sys, WeightPlan::dimension(t), N - 1), N - 1, p);
        double d = std::abs(evaluate_truncated_real(sN, Interval::ratio(1, 1, p)).mid_d() -
                            evaluate_truncated_real(sN1, Interval::ratio(1, 1, p)).mid_d());
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("evaluate_truncated: value, dz, dt and trivial points") {
    const mpfr_prec_t p = 160;
    auto traces = make_traces({2.0}, p);  // d(z) = 1 - 2z
    auto s = coefficients_from_traces(traces, 1, p);
    CHECK(near(evaluate_truncated_real(s, Interval::point(0.5, p)), 0.0, 1e-40));
    CHECK(near(evaluate_truncated_real(s, Interval::point(0.0, p)), 1.0, 1e-40));
    CHECK(near(evaluate_truncated_real(s, Interval::point(0.3, p), SeriesPart::dz),
               -2.0, 1e-40));
}

TEST_CASE("all-zero series gives zero sums") {
    const mpfr_prec_t p = 128;
    auto s = coefficients_from_traces(make_traces({0.0, 0.0, 0.0}, p), 3, p);
    auto q = quantity_sums(s);
    CHECK(near(q.A, 0.0, 1e-60));
    CHECK(near(q.B, 0.0, 1e-60));
    CHECK(near(q.C, 0.0, 1e-60));
    CHECK(near(q.E, 0.0, 1e-60));
}

TEST_CASE("streamed traces equal table traces and are thread independent") {
    auto sys = load_builtin("lanford", 192);
    auto plan = WeightPlan::mixing(192);
    auto t1 = trace_sums(sys, plan, 7, 1);
    auto t4 = trace_sums(sys, plan, 7, 4);
    auto table = build_orbit_table(sys, 7);
    for (int n = 1; n <= 7; ++n) {
        CHECK(mpfr_cmp(t1[(size_t)n - 1].tr.lo(), t4[(size_t)n - 1].tr.lo()) == 0);
        CHECK(mpfr_cmp(t1[(size_t)n - 1].tr.hi(), t4[(size_t)n - 1].tr.hi()) == 0);
        auto tt = trace_sum(sys, table, plan, n);
        CHECK(tt.tr.intersects(t1[(size_t)n - 1].tr));
    }
}

TEST_CASE("degenerate denominator is rejected") {
    const mpfr_prec_t p = 128;
    auto sys = load_builtin("e2", p);
    OrbitTable t;
    t.max_period = 1;
    OrbitRecord r;
    r.word.letters = {0};
    r.fixed_point = Interval::point(0.5, p);
    r.orbit_derivative = Interval::of(0.99, 1.01, p);
    r.sum_points = Interval::point(0.5, p);
    t.records.push_back({r});
    CHECK_THROWS_AS(trace_sum(sys, t, WeightPlan::mixing(p), 1),
                    DegenerateDenominator);
}

TEST_CASE("coefficient series serializes to JSON with interval strings") {
    const mpfr_prec_t p = 128;
    auto s = coefficients_from_traces(make_traces({1.0, 0.5}, p), 2, p);
    auto j = coefficient_series_to_json(s);
    CHECK(j.find("\"N\":2") != std::string::npos);
    CHECK(j.find("\"a\"") != std::string::npos);
    CHECK(j.find("\"eps1\"") != std::string::npos);
}
