#include "valdet/determinant.hpp"

#include <nlohmann/json.hpp>

namespace valdet {

WeightPlan WeightPlan::dimension(const Interval& t) {
    WeightPlan p;
    p.mode = Mode::dimension;
    p.base_t = t;
    p.center = Interval::point(0.0, t.precision());
    return p;
}

WeightPlan WeightPlan::lyapunov(mpfr_prec_t prec) {
    WeightPlan p;
    p.mode = Mode::lyapunov;
    p.base_t = Interval::point(0.0, prec);
    p.phi = Observable::log_deriv;
    p.center = Interval::point(0.0, prec);
    return p;
}

WeightPlan WeightPlan::mixing(mpfr_prec_t prec) {
    WeightPlan p;
    p.mode = Mode::mixing;
    p.base_t = Interval::point(0.0, prec);
    p.center = Interval::point(0.0, prec);
    return p;
}

WeightPlan WeightPlan::gibbs(Observable phi, mpfr_prec_t prec) {
    WeightPlan p;
    p.mode = Mode::gibbs;
    p.base_t = Interval::point(0.0, prec);
    p.phi = phi;
    p.center = Interval::point(0.0, prec);
    return p;
}

WeightPlan WeightPlan::variance(Observable phi, mpfr_prec_t prec) {
    WeightPlan p = gibbs(phi, prec);
    p.mode = Mode::variance;
    return p;
}

bool word_counted_in_traces(const SystemSpec& sys, const Word& w) {
    if (!sys.circle_identified) return true;
    uint8_t last = (uint8_t)(sys.branches.size() - 1);
    for (uint8_t l : w.letters)
        if (l != last) return true;
    return false;  // all-last-branch word: duplicate of the all-first word
}

namespace {

// One record's contribution to (tr, tr_dt, tr_dtt) under the plan.
void accumulate_term(const SystemSpec& sys, const WeightPlan& plan,
                     const OrbitRecord& rec, Interval& tr, Interval& tr_dt,
                     Interval& tr_dtt) {
    const mpfr_prec_t p = sys.prec;
    const int n = rec.word.length();
    if (!word_counted_in_traces(sys, rec.word)) return;

    Interval one = Interval::ratio(1, 1, p);
    Interval den = one - rec.orbit_derivative;
    if (den.contains_zero())
        throw DegenerateDenominator(
            "trace denominator 1 - psi_w' contains zero (expansion violated)");

    Interval abs_dpsi = rec.orbit_derivative.abs();
    Interval log_abs = abs_dpsi.log();  // < 0; log|T^n'| = -log_abs

    if (plan.mode == WeightPlan::Mode::dimension) {
        Interval w = (plan.base_t * log_abs).exp();  // |psi'|^t
        Interval term = w / den;
        tr += term;
        tr_dt += log_abs * term;
        tr_dtt += log_abs.sqr() * term;
        return;
    }

    // g0 = -log|T'| weight: |psi_w'|
    Interval w0 = abs_dpsi / den;
    tr += w0;
    if (plan.mode == WeightPlan::Mode::mixing) return;

    Interval S(p);
    switch (plan.phi) {
        case Observable::one:
            S = Interval::ratio(n, 1, p);
            break;
        case Observable::coordinate:
            S = rec.sum_points;
            break;
        case Observable::log_deriv:
            S = -log_abs;  // sum over orbit of log|T'|
            break;
        case Observable::none:
            S = Interval::point(0.0, p);
            break;
    }
    S = S - Interval::ratio(n, 1, p) * plan.center;
    tr_dt += -(S * w0);
    if (plan.mode == WeightPlan::Mode::variance) tr_dtt += S.sqr() * w0;
}

struct TraceAccumulator : OrbitAccumulator {
    const SystemSpec& sys;
    const WeightPlan& plan;
    std::vector<Interval> tr, tr_dt, tr_dtt;
    TraceAccumulator(const SystemSpec& s, const WeightPlan& pl, int N)
        : sys(s), plan(pl) {
        tr.assign((size_t)N, Interval::point(0.0, s.prec));
        tr_dt.assign((size_t)N, Interval::point(0.0, s.prec));
        tr_dtt.assign((size_t)N, Interval::point(0.0, s.prec));
    }
    void on_record(int period, const OrbitRecord& rec) override {
        accumulate_term(sys, plan, rec, tr[(size_t)period - 1],
                        tr_dt[(size_t)period - 1], tr_dtt[(size_t)period - 1]);
    }
    void absorb(OrbitAccumulator& other) override {
        auto& o = static_cast<TraceAccumulator&>(other);
        for (size_t i = 0; i < tr.size(); ++i) {
            tr[i] += o.tr[i];
            tr_dt[i] += o.tr_dt[i];
            tr_dtt[i] += o.tr_dtt[i];
        }
    }
};

} // namespace

TraceVector trace_sum(const SystemSpec& sys, const OrbitTable& table,
                      const WeightPlan& plan, int n) {
    if (n < 1 || n > table.max_period)
        throw DomainError("trace_sum: period outside the table range");
    TraceVector out;
    out.n = n;
    out.tr = Interval::point(0.0, sys.prec);
    out.tr_dt = Interval::point(0.0, sys.prec);
    out.tr_dtt = Interval::point(0.0, sys.prec);
    for (const auto& rec : table.period(n))
        accumulate_term(sys, plan, rec, out.tr, out.tr_dt, out.tr_dtt);
    return out;
}

std::vector<TraceVector> trace_sums(const SystemSpec& sys, const WeightPlan& plan,
                                    int N, unsigned threads) {
    TraceAccumulator root(sys, plan, N);
    FoldOptions opt;
    opt.threads = threads;
    opt.need_orbit_sum = plan.needs_orbit_sum();
    fold_orbits(sys, N, opt,
                [&]() { return std::make_unique<TraceAccumulator>(sys, plan, N); },
                root);
    std::vector<TraceVector> out((size_t)N);
    for (int n = 1; n <= N; ++n) {
        out[(size_t)n - 1].n = n;
        out[(size_t)n - 1].tr = root.tr[(size_t)n - 1];
        out[(size_t)n - 1].tr_dt = root.tr_dt[(size_t)n - 1];
        out[(size_t)n - 1].tr_dtt = root.tr_dtt[(size_t)n - 1];
    }
    return out;
}

std::vector<TraceVector> center_traces(const std::vector<TraceVector>& traces,
                                       const Interval& m) {
    std::vector<TraceVector> out = traces;
    const mpfr_prec_t p = m.precision();
    for (auto& t : out) {
        Interval nm = Interval::ratio(t.n, 1, p) * m;
        Interval dt_old = t.tr_dt;
        t.tr_dt = dt_old + nm * t.tr;
        t.tr_dtt = t.tr_dtt + Interval::ratio(2, 1, p) * nm * dt_old + nm.sqr() * t.tr;
    }
    return out;
}

CoefficientSeries coefficients_from_traces(const std::vector<TraceVector>& traces,
                                           int N, mpfr_prec_t prec) {
    if ((int)traces.size() < N)
        throw DomainError("coefficients_from_traces: traces do not cover 1..N");
    CoefficientSeries s;
    s.N = N;
    s.prec = prec;
    s.has_dt = true;
    s.has_dtt = true;
    Interval one = Interval::ratio(1, 1, prec);
    std::vector<Interval> a{one}, a1{Interval::point(0.0, prec)},
        a2{Interval::point(0.0, prec)};
    for (int n = 1; n <= N; ++n) {
        Interval acc = Interval::point(0.0, prec);
        Interval acc1 = Interval::point(0.0, prec);
        Interval acc2 = Interval::point(0.0, prec);
        for (int k = 1; k <= n; ++k) {
            const TraceVector& t = traces[(size_t)k - 1];
            const Interval& am = a[(size_t)(n - k)];
            const Interval& am1 = a1[(size_t)(n - k)];
            const Interval& am2 = a2[(size_t)(n - k)];
            acc += t.tr * am;
            acc1 += t.tr_dt * am + t.tr * am1;
            acc2 += t.tr_dtt * am + Interval::ratio(2, 1, prec) * (t.tr_dt * am1) +
                    t.tr * am2;
        }
        Interval inv_n = Interval::ratio(-1, n, prec);
        a.push_back(acc * inv_n);
        a1.push_back(acc1 * inv_n);
        a2.push_back(acc2 * inv_n);
    }
    s.a.assign(a.begin() + 1, a.end());
    s.a_dt.assign(a1.begin() + 1, a1.end());
    s.a_dtt.assign(a2.begin() + 1, a2.end());

    Interval w = Interval::point(0.0, prec);
    for (int n = 0; n < N; ++n) {
        w = w.max_with(s.a[(size_t)n].width());
        w = w.max_with(s.a_dt[(size_t)n].width());
        w = w.max_with(s.a_dtt[(size_t)n].width());
    }
    s.eps1 = w;

    s.A = Interval::point(0.0, prec);
    s.B = Interval::point(0.0, prec);
    s.C = Interval::point(0.0, prec);
    s.D = Interval::point(0.0, prec);
    s.E = Interval::point(0.0, prec);
    for (int n = 1; n <= N; ++n) {
        Interval nn = Interval::ratio(n, 1, prec);
        s.A += nn * s.a[(size_t)n - 1];
        s.B += Interval::ratio((long)n * (n - 1), 1, prec) * s.a[(size_t)n - 1];
        s.C += s.a_dt[(size_t)n - 1];
        s.D += nn * s.a_dt[(size_t)n - 1];
        s.E += s.a_dtt[(size_t)n - 1];
    }
    return s;
}

CInterval evaluate_truncated(const CoefficientSeries& s, const CInterval& z,
                             SeriesPart part) {
    const mpfr_prec_t p = s.prec;
    const std::vector<Interval>* coef = &s.a;
    if (part == SeriesPart::dt) coef = &s.a_dt;
    if (part == SeriesPart::dtt) coef = &s.a_dtt;
    CInterval acc(p);
    if (part == SeriesPart::dz) {
        // d/dz (1 + sum a_n z^n) = sum n a_n z^{n-1}
        for (int n = s.N; n >= 1; --n) {
            acc = acc * z + CInterval::real(Interval::ratio(n, 1, p) * s.a[(size_t)n - 1]);
        }
        return acc;
    }
    for (int n = s.N; n >= 1; --n) {
        acc = acc * z + CInterval::real((*coef)[(size_t)n - 1]);
    }
    acc = acc * z;
    if (part == SeriesPart::value)
        acc = acc + CInterval::real(Interval::ratio(1, 1, p));
    return acc;
}

Interval evaluate_truncated_real(const CoefficientSeries& s, const Interval& z,
                                 SeriesPart part) {
    return evaluate_truncated(s, CInterval::real(z), part).re;
}

QuantitySums quantity_sums(const CoefficientSeries& s) {
    return QuantitySums{s.A, s.B, s.C, s.D, s.E};
}

std::string coefficient_series_to_json(const CoefficientSeries& s) {
    nlohmann::json j;
    const int digits = honest_digits(s.prec);
    auto iv = [&](const Interval& x) {
        return nlohmann::json::array({x.lo_string(digits), x.hi_string(digits)});
    };
    j["N"] = s.N;
    j["a"] = nlohmann::json::array();
    j["a_dt"] = nlohmann::json::array();
    j["a_dtt"] = nlohmann::json::array();
    for (int n = 0; n < s.N; ++n) {
        j["a"].push_back(iv(s.a[(size_t)n]));
        j["a_dt"].push_back(iv(s.a_dt[(size_t)n]));
        j["a_dtt"].push_back(iv(s.a_dtt[(size_t)n]));
    }
    j["eps1"] = iv(s.eps1);
    return j.dump();
}

} // namespace valdet
