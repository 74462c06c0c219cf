#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "valdet/systems.hpp"

using namespace valdet;

namespace {
bool near(const Interval& iv, double v, double tol = 1e-13) {
    return iv.lo_d() <= v + tol && iv.hi_d() >= v - tol;
}
}

TEST_CASE("builtins load and verify disc invariance") {
    for (const char* name : {"e2", "lanford", "doubling", "affine_cantor"}) {
        auto sys = load_builtin(name, 192);
        CHECK(sys.branches.size() == 2);
        CHECK(sys.bernoulli);
        for (auto& th : sys.Theta) CHECK(th.hi_d() < 1.0);
    }
    auto e5 = load_system("system=cf_digits\ndigits=[1,2,3,4,5]\n", 192);
    CHECK(e5.branches.size() == 5);
}

TEST_CASE("lanford config example") {
    auto sys = load_builtin("lanford", 192);
    CHECK(sys.branches.size() == 2);
    CHECK(sys.bernoulli == true);
}

TEST_CASE("doubling eps outside the admissible range is rejected") {
    CHECK_THROWS_AS(load_system("system=doubling_eps\neps=0.3\n", 128), ParseError);
    // 0.0795 < 1/(4 pi) = 0.07957... : admissible but disc may be tight;
    // 0.08 > bound: rejected
    CHECK_THROWS_AS(load_system("system=doubling_eps\neps=0.08\n", 128), ParseError);
}

TEST_CASE("unknown keys and bad grammar are parse errors") {
    CHECK_THROWS_AS(load_system("system=e2\nbogus=1\n", 128), ParseError);
    CHECK_THROWS_AS(load_system("system=nosuch\n", 128), ParseError);
    CHECK_THROWS_AS(load_system("system=e2\nsystem=e2\n", 128), ParseError);
}

TEST_CASE("branch evaluation: golden ratio fixed point of 1/(1+x)") {
    auto sys = load_builtin("e2", 256);
    // x = (sqrt 5 - 1)/2 solves x = 1/(1+x)
    Interval x = (Interval::point(5.0, 256).sqrt() - Interval::ratio(1, 1, 256)) *
                 Interval::ratio(1, 2, 256);
    Interval img = branch_eval_real(sys, sys.branches[0], x);
    CHECK(img.intersects(x));
    // psi'(x) = -1/(1+x)^2 = -x^2 at the fixed point
    Interval d = branch_derivative_real(sys, sys.branches[0], x);
    CHECK(d.intersects(-x.sqr()));
    CHECK(near(d, -0.3819660112501051));
}

TEST_CASE("branch evaluation: affine and second cf branch") {
    auto sys = load_builtin("affine_cantor", 192);
    Interval one = Interval::ratio(1, 1, 192);
    Interval img = branch_eval_real(sys, sys.branches[0], one);
    CHECK(near(img, 1.0 / 3.0, 1e-30));
    Interval d = branch_derivative_real(sys, sys.branches[0], one);
    CHECK(near(d, 1.0 / 3.0, 1e-30));

    auto e2 = load_builtin("e2", 192);
    Interval at0 = branch_eval_real(e2, e2.branches[1], Interval::point(0.0, 192));
    CHECK(near(at0, 0.5, 1e-30));
}

TEST_CASE("lanford inverse branch derivative at 0 is 1/T'(0) = 0.4") {
    auto sys = load_builtin("lanford", 256);
    Interval d = branch_derivative_real(sys, sys.branches[0], Interval::point(0.0, 256));
    CHECK(near(d, 0.4, 1e-40));
    // branch value at 0 is the fixed point 0
    Interval v = branch_eval_real(sys, sys.branches[0], Interval::point(0.0, 256));
    CHECK(near(v, 0.0, 1e-40));
}

TEST_CASE("doubling branches evaluate and contract") {
    auto sys = load_system("system=doubling_eps\neps=0.02\n", 192);
    CHECK(sys.circle_identified);
    // psi_0(0) = 0, psi_1(1) = 1
    Interval v0 = branch_eval_real(sys, sys.branches[0], Interval::point(0.0, 192));
    CHECK(near(v0, 0.0, 1e-30));
    Interval v1 = branch_eval_real(sys, sys.branches[1], Interval::point(1.0, 192));
    CHECK(near(v1, 1.0, 1e-30));
    // derivative at the fixed point: 1/(2 + 2 pi eps)
    Interval d = branch_derivative_real(sys, sys.branches[0], Interval::point(0.0, 192));
    double expect = 1.0 / (2.0 + 2.0 * M_PI * 0.02);
    CHECK(near(d, expect));
}

TEST_CASE("inverse consistency: forward map undoes the branch") {
    // T(psi_k(x)) = x + shift for the lanford forward map
    auto sys = load_builtin("lanford", 192);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        double x = u(rng);
        Interval xi = Interval::point(x, 192);
        for (int k = 0; k < 2; ++k) {
            Interval y = branch_eval_real(sys, sys.branches[k], xi);
            // T(y) = (5y - y^2)/2 - k
            Interval T = (Interval::ratio(5, 1, 192) * y - y.sqr()) *
                             Interval::ratio(1, 2, 192) -
                         Interval::ratio(k, 1, 192);
            CHECK(T.intersects(xi));
        }
    }
}

TEST_CASE("composition derivative equals product along the orbit") {
    auto sys = load_builtin("e2", 192);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    for (int i = 0; i < 20; ++i) {
        Interval x = Interval::point(u(rng), 192);
        // psi_1 o psi_2 at x
        Interval inner = branch_eval_real(sys, sys.branches[1], x);
        Interval d_chain = branch_derivative_real(sys, sys.branches[0], inner) *
                           branch_derivative_real(sys, sys.branches[1], x);
        // finite-difference on midpoints as a sanity cross-check
        double h = 1e-8;
        auto comp = [&](double t) {
            Interval v = branch_eval_real(
                sys, sys.branches[1], Interval::point(t, 192));
            return branch_eval_real(sys, sys.branches[0], v).mid_d();
        };
        double fd = (comp(x.mid_d() + h) - comp(x.mid_d() - h)) / (2 * h);
        CHECK(std::abs(d_chain.mid_d() - fd) < 1e-6);
    }
}

TEST_CASE("contraction ratio: E2 disc gives theta = 2/3") {
    auto sys = load_builtin("e2", 192);
    std::string rule;
    Interval th = contraction_ratio(sys, &rule);
    CHECK(rule == "bernoulli-max");
    // Moebius image-of-disc closed form: psi_1 image has Theta_1 = 2/3 exactly
    CHECK(th.hi_d() >= 2.0 / 3.0 - 1e-9);
    CHECK(th.hi_d() <= 2.0 / 3.0 + 2e-3);
}

TEST_CASE("contraction ratio: affine cantor on the radius-1 disc is 2/3") {
    auto sys = load_builtin("affine_cantor", 192);
    Interval th = contraction_ratio(sys);
    CHECK(th.hi_d() >= 2.0 / 3.0 - 1e-9);
    CHECK(th.hi_d() <= 2.0 / 3.0 + 2e-3);
}

TEST_CASE("custom single contraction z/2 on the unit disc: theta = 1/2") {
    auto sys = load_system(
        "system=custom\nbranch.0.moebius=1,0,0,2\ndisc.center=0\ndisc.radius=1\n", 160);
    Interval th = contraction_ratio(sys);
    CHECK(th.hi_d() >= 0.5 - 1e-9);
    CHECK(th.hi_d() <= 0.5 + 2e-3);
}

TEST_CASE("julia catalog entry carries c and rejects IFS use") {
    auto sys = load_system("system=quadratic_julia\nc=0.05+0i\n", 128);
    CHECK(sys.is_julia);
    CHECK(near(sys.julia_c.re, 0.05, 1e-12));
    CHECK_THROWS_AS(load_system("system=quadratic_julia\nc=0.3+0i\n", 128), ParseError);
}
