#include "valdet/quantities.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace valdet {

int resolve_L(const RunOptions& opt) {
    if (opt.L > 0) return opt.L;
    return std::max(4 * opt.N, 200);
}

namespace {

Interval point_iv(double v, mpfr_prec_t p) { return Interval::point(v, p); }

// certified tails of the quantity sums from a certificate over a parameter
// box of half-width h around the base point (Cauchy estimates for the
// derivative coefficients)
struct QuantityTails {
    Interval A, B, C, D, E;
};

QuantityTails quantity_tails(const TailCertificate& cert, double h) {
    const mpfr_prec_t p = cert.prec();
    Interval t0 = coefficient_tail_weighted(cert, 0);
    Interval t1 = coefficient_tail_weighted(cert, 1);
    Interval t2 = coefficient_tail_weighted(cert, 2);
    Interval hi = point_iv(h, p);
    QuantityTails out;
    auto sym = [&](const Interval& m) {
        return Interval::hull(-m, m);
    };
    out.A = sym(t1);
    out.B = sym(t2);  // n(n-1) <= n^2
    out.C = sym(t0 / hi);
    out.D = sym(t1 / hi);
    out.E = sym(point_iv(2.0, p) * t0 / hi.sqr());
    return out;
}

} // namespace

CertifiedValue quotient_quantity(const char* name, const CoefficientSeries& s,
                                 const TailCertificate* cert, const RunOptions& opt) {
    const mpfr_prec_t p = s.prec;
    CertifiedValue out;
    out.name = name;
    out.order_N = s.N;
    Interval A = s.A, C = s.C;
    if (cert) {
        QuantityTails tails = quantity_tails(*cert, opt.deriv_box_halfwidth);
        A = A + tails.A;
        C = C + tails.C;
    }
    if (A.contains_zero())
        throw DenominatorContainsZero(
            std::string(name) + ": certified A-interval contains zero");
    Interval val = -(C / A);
    out.bounds = val;
    out.estimate = val.mid();
    out.uncertified = cert == nullptr;
    if (cert) out.certificate_json = certificate_to_json(*cert);
    return out;
}

CertifiedValue variance_from_series(const CoefficientSeries& s,
                                    const TailCertificate* cert, const RunOptions& opt) {
    const mpfr_prec_t p = s.prec;
    CertifiedValue out;
    out.name = "variance";
    out.order_N = s.N;
    Interval A = s.A, B = s.B, C = s.C, D = s.D, E = s.E;
    if (cert) {
        QuantityTails tails = quantity_tails(*cert, opt.deriv_box_halfwidth);
        A = A + tails.A;
        B = B + tails.B;
        C = C + tails.C;
        D = D + tails.D;
        E = E + tails.E;
    }
    if (A.contains_zero())
        throw DenominatorContainsZero("variance: A-interval contains zero");
    Interval r = C / A;
    Interval val = r.sqr() + (B * r.sqr() - point_iv(2.0, p) * D * B * r + E) / A;
    out.bounds = val;
    out.estimate = val.mid();
    out.uncertified = cert == nullptr;
    if (cert) out.certificate_json = certificate_to_json(*cert);
    return out;
}

namespace {

// coefficients for a gibbs-family plan; with m_out set the observable is
// auto-centered (second derivatives are produced in variance mode only)
CoefficientSeries gibbs_series(const SystemSpec& sys, Observable phi, int N,
                               unsigned threads, Interval* m_out) {
    const mpfr_prec_t p = sys.prec;
    auto plan = m_out ? WeightPlan::variance(phi, p) : WeightPlan::gibbs(phi, p);
    auto traces = trace_sums(sys, plan, N, threads);
    auto s = coefficients_from_traces(traces, N, p);
    if (m_out) {
        if (s.A.contains_zero())
            throw DenominatorContainsZero("gibbs centering: A contains zero");
        Interval m = -(s.C / s.A);
        auto centered = center_traces(traces, m);
        s = coefficients_from_traces(centered, N, p);
        *m_out = m;
    }
    return s;
}

} // namespace

CertifiedValue lyapunov_exponent(const SystemSpec& sys, const RunOptions& opt) {
    const mpfr_prec_t p = sys.prec;
    auto s = gibbs_series(sys, Observable::log_deriv, opt.N, opt.threads, nullptr);
    if (!opt.validate) return quotient_quantity("lyapunov", s, nullptr, opt);
    double h = opt.deriv_box_halfwidth;
    Interval box = Interval::of(-h, h, p);
    auto plan = WeightPlan::lyapunov(p);
    auto cert = build_certificate(sys, plan, box, s.eps1, opt.N, resolve_L(opt),
                                  opt.threads);
    return quotient_quantity("lyapunov", s, &cert, opt);
}

CertifiedValue gibbs_integral(const SystemSpec& sys, Observable phi,
                              const RunOptions& opt) {
    const mpfr_prec_t p = sys.prec;
    auto s = gibbs_series(sys, phi, opt.N, opt.threads, nullptr);
    if (!opt.validate) return quotient_quantity("integral", s, nullptr, opt);
    double h = opt.deriv_box_halfwidth;
    Interval box = Interval::of(-h, h, p);
    WeightPlan plan = WeightPlan::gibbs(phi, p);
    auto cert = build_certificate(sys, plan, box, s.eps1, opt.N, resolve_L(opt),
                                  opt.threads);
    return quotient_quantity("integral", s, &cert, opt);
}

CertifiedValue variance(const SystemSpec& sys, Observable phi, const RunOptions& opt) {
    const mpfr_prec_t p = sys.prec;
    Interval m(p);
    auto s = gibbs_series(sys, phi, opt.N, opt.threads, &m);
    CertifiedValue out;
    if (!opt.validate) {
        out = variance_from_series(s, nullptr, opt);
    } else {
        double h = opt.deriv_box_halfwidth;
        Interval box = Interval::of(-h, h, p);
        WeightPlan plan = WeightPlan::variance(phi, p);
        plan.center = m.mid();
        auto cert = build_certificate(sys, plan, box, s.eps1, opt.N, resolve_L(opt),
                                      opt.threads);
        out = variance_from_series(s, &cert, opt);
    }
    out.note = "observable auto-centered; centering interval folded into bounds";
    return out;
}

RootBracket validated_root(const std::function<Interval(const Interval&)>& f,
                           double lo, double hi, double target_width) {
    if (!(lo < hi)) throw DomainError("validated_root: empty bracket");
    mpfr_prec_t p = 256;
    auto eval = [&](double t) { return f(Interval::point(t, p)); };
    Interval flo = eval(lo), fhi = eval(hi);
    auto sign_of = [](const Interval& v) {
        if (v.strictly_positive()) return 1;
        if (v.strictly_negative()) return -1;
        return 0;
    };
    int slo = sign_of(flo), shi = sign_of(fhi);
    if (slo == 0 || shi == 0 || slo == shi)
        throw NoSignChange("validated_root: endpoints do not certify a sign change");

    double a = lo, b = hi;
    Interval fa = flo, fb = fhi;
    for (int it = 0; it < 4096; ++it) {
        if (target_width > 0 && b - a <= target_width) break;
        bool progressed = false;
        for (double frac : {0.5, 0.25, 0.75}) {
            double m = a + (b - a) * frac;
            Interval fm = eval(m);
            int sm = sign_of(fm);
            if (sm == 0) continue;
            if (sm == slo) {
              a = m;
              fa = fm;
            } else {
              b = m;
              fb = fm;
            }
            progressed = true;
            break;
        }
        if (!progressed) {
            if (target_width > 0 && b - a > target_width)
                throw PrecisionExhausted(
                    "validated_root: sign certification failed before target width");
            break;
        }
    }
    RootBracket out;
    out.lo = Interval::point(a, p);
    out.hi = Interval::point(b, p);
    out.f_lo = fa;
    out.f_hi = fb;
    Interval ma = fa.abs(), mb = fb.abs();
    out.margin = ma.min_with(mb);
    return out;
}

namespace {

// midpoint secant root of g (double precision control flow)
double secant_root(const std::function<double(double)>& g, double x0, double x1,
                   int iters = 60) {
    double f0 = g(x0), f1 = g(x1);
    for (int i = 0; i < iters; ++i) {
        if (f1 == f0) break;
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!std::isfinite(x2)) break;
        x0 = x1; f0 = f1;
        x1 = x2; f1 = g(x2);
        if (std::abs(x1 - x0) < 1e-15 * std::max(1.0, std::abs(x1))) break;
    }
    return x1;
}

struct DimensionEval {
    const SystemSpec& sys;
    int N;
    unsigned threads;

    CoefficientSeries series_at(const Interval& t) const {
        auto plan = WeightPlan::dimension(t);
        return coefficients_from_traces(trace_sums(sys, plan, N, threads), N,
                                        sys.prec);
    }
    Interval value_at(const Interval& t) const {
        return evaluate_truncated_real(series_at(t),
                                       Interval::ratio(1, 1, sys.prec));
    }
};

} // namespace

CertifiedValue hausdorff_dimension(const SystemSpec& sys, const RunOptions& opt) {
    if (sys.is_julia)
        throw DomainError("hausdorff_dimension: use the julia pipeline for z^2+c");
    const mpfr_prec_t p = sys.prec;

    // heuristic root at reduced precision: t_N and t_{N-1}
    SystemSpec low = load_system(sys.config_text, 96);
    DimensionEval evN{low, opt.N, opt.threads};
    DimensionEval evN1{low, opt.N - 1, opt.threads};
    double seed0 = opt.bracket_lo > 0 ? opt.bracket_lo : 0.3;
    double seed1 = opt.bracket_hi > 0 ? opt.bracket_hi : 0.9;
    auto heur = [&](const DimensionEval& ev) {
        return secant_root(
            [&](double t) { return ev.value_at(Interval::point(t, 96)).mid_d(); },
            seed0, seed1);
    };
    double tN = heur(evN);
    double tN1 = opt.N >= 2 ? heur(evN1) : tN;
    double herr = std::abs(tN - tN1);

    CertifiedValue out;
    out.name = "hausdorff_dimension";
    out.order_N = opt.N;
    out.heuristic_error = herr;
    out.estimate = Interval::point(tN, p);

    if (!opt.validate) {
        out.uncertified = true;
        out.bounds = Interval::of(tN - 10 * herr - 1e-15, tN + 10 * herr + 1e-15, p);
        out.note = "heuristic estimate; error indicator |t_N - t_{N-1}|";
        return out;
    }

    // certificate over a box around the heuristic root, then certified signs
    // at t_N +- w for the smallest certifiable w
    DimensionEval ev{sys, opt.N, opt.threads};
    double box_half = std::max(1e6 * herr + 1e-12, 1e-9);
    Interval box = Interval::of(tN - box_half, tN + box_half, p);
    auto plan = WeightPlan::dimension(box.mid());
    auto series_mid = ev.series_at(box.mid());
    auto cert = build_certificate(sys, plan, box, series_mid.eps1, opt.N,
                                  resolve_L(opt), opt.threads);
    Interval one = Interval::ratio(1, 1, p);
    Interval R = determinant_remainder(cert, series_mid, one);

    // slope estimate for the initial half-width guess
    double slope;
    {
        double dh = std::max(1e4 * herr, 1e-9);
        double v1 = ev.value_at(Interval::point(tN + dh, p)).mid_d();
        double v0 = ev.value_at(Interval::point(tN - dh, p)).mid_d();
        slope = std::abs((v1 - v0) / (2 * dh));
        if (!(slope > 0)) slope = 1.0;
    }

    auto certified_f = [&](const Interval& t) -> Interval {
        if (mpfr_cmp(t.lo(), box.lo()) < 0 || mpfr_cmp(t.hi(), box.hi()) > 0)
            throw DomainError("dimension eval outside certificate box");
        Interval v = ev.value_at(t);
        return v + Interval::hull(-R, R);
    };

    double w = std::max({16 * R.hi_d() / slope, 4 * herr, 1e-30});
    for (int attempt = 0; attempt < 40; ++attempt) {
        if (w > box_half) break;
        Interval fl = certified_f(Interval::point(tN - w, p));
        Interval fr = certified_f(Interval::point(tN + w, p));
        bool ok = (fl.strictly_positive() && fr.strictly_negative()) ||
                  (fl.strictly_negative() && fr.strictly_positive());
        if (ok) {
            out.uncertified = false;
            out.bounds = Interval::of(tN - w, tN + w, p);
            out.certificate_json = certificate_to_json(cert);
            out.note = "IVT bracket with certified remainder";
            if (opt.target_width > 0 && 2 * w > opt.target_width)
                throw PrecisionExhausted(
                    "hausdorff_dimension: certified width exceeds the target");
            return out;
        }
        w *= 8;
    }
    throw PrecisionExhausted(
        "hausdorff_dimension: could not certify a sign change around t_N");
}

std::vector<ZeroResult> determinant_zeros(const SystemSpec& sys, int count,
                                          const RunOptions& opt) {
    const mpfr_prec_t p = sys.prec;
    auto plan = WeightPlan::mixing(p);
    auto series = coefficients_from_traces(trace_sums(sys, plan, opt.N, opt.threads),
                                           opt.N, p);

    std::optional<TailCertificate> cert;
    Interval R0(p);
    double radius_cap = 1e4;
    if (opt.validate) {
        Interval box = Interval::point(0.0, p);
        cert = build_certificate(sys, plan, box, series.eps1, opt.N, resolve_L(opt),
                                 opt.threads);
        double geo = cert->geo.hi_d();
        if (geo > 0) radius_cap = std::min(radius_cap, 0.99 / geo);
    }

    // midpoint polynomial scan on the positive real axis
    auto pmid = [&](double z) {
        Interval zi = Interval::point(z, p);
        return evaluate_truncated_real(series, zi).mid_d();
    };
    auto pmid_prec = [&](const Interval& z) {
        return evaluate_truncated_real(series, z);
    };

    std::vector<ZeroResult> out;
    double z = 1e-3, step = 1e-3;
    double fz = pmid(z);
    while ((int)out.size() < count && z < radius_cap) {
        double z2 = std::min(z * (1 + 0.02) + step * 0.1, radius_cap);
        double f2 = pmid(z2);
        if (fz == 0.0) fz = 1e-300;
        if (fz * f2 < 0) {
            // polish the truncation zero by interval Newton on midpoints
            Interval zi = Interval::point((z + z2) / 2, p);
            for (int it = 0; it < 80; ++it) {
                Interval val = pmid_prec(zi);
                Interval der = evaluate_truncated_real(series, zi, SeriesPart::dz);
                if (der.contains_zero()) break;
                Interval step_iv = val / der;
                zi = (zi - step_iv).mid();
                if (step_iv.mag().hi_d() <
                    std::ldexp(1.0, -(int)p + 10) * std::max(1.0, zi.mid_d()))
                    break;
            }
            ZeroResult zr;
            zr.value.name = "determinant_zero";
            zr.value.order_N = opt.N;
            zr.value.estimate = zi.mid();
            zr.value.uncertified = true;
            zr.value.bounds = Interval::of(z, z2, p);
            if (cert) {
                // certified IVT bracket around the estimate
                double zc = zi.mid_d();
                double w = std::max(1e-30, 4 * determinant_remainder(
                                               *cert, series,
                                               Interval::point(zc, p))
                                               .hi_d());
                for (int attempt = 0; attempt < 60; ++attempt) {
                    double a = zc - w, b = zc + w;
                    if (a <= 0 || b * cert->geo.hi_d() >= 1.0) break;
                    Interval Ra = determinant_remainder(*cert, series,
                                                        Interval::point(a, p));
                    Interval Rb = determinant_remainder(*cert, series,
                                                        Interval::point(b, p));
                    Interval fa = pmid_prec(Interval::point(a, p)) +
                                  Interval::hull(-Ra, Ra);
                    Interval fb = pmid_prec(Interval::point(b, p)) +
                                  Interval::hull(-Rb, Rb);
                    bool ok = (fa.strictly_positive() && fb.strictly_negative()) ||
                              (fa.strictly_negative() && fb.strictly_positive());
                    if (ok) {
                        zr.value.uncertified = false;
                        zr.value.bounds = Interval::of(a, b, p);
                        break;
                    }
                    w *= 8;
                }
                if (zi.mid_d() * cert->geo.hi_d() >= 1.0) zr.beyond_radius = true;
            }
            out.push_back(zr);
        }
        z = z2;
        fz = f2;
    }
    return out;
}

CertifiedValue mixing_rate(const SystemSpec& sys, const RunOptions& opt) {
    auto zeros = determinant_zeros(sys, 2, opt);
    if (zeros.size() < 2)
        throw NoSecondZero("mixing_rate: no second real zero within the scan radius");
    const mpfr_prec_t p = sys.prec;
    CertifiedValue out;
    out.name = "mixing_rate";
    out.order_N = opt.N;
    const CertifiedValue& z2 = zeros[1].value;
    Interval one = Interval::ratio(1, 1, p);
    out.estimate = (one / z2.estimate).mid();
    out.uncertified = z2.uncertified;
    out.bounds = z2.uncertified ? one / z2.estimate : one / z2.bounds;
    out.certificate_json = z2.certificate_json;
    return out;
}

std::string certified_value_to_json(const CertifiedValue& v, const std::string& system,
                                    double runtime_seconds, bool include_runtime) {
    nlohmann::json j;
    const int digits = honest_digits(v.estimate.precision());
    j["quantity"] = v.name;
    j["system"] = system;
    j["N"] = v.order_N;
    j["estimate"] = mpfr_to_decimal(v.estimate.lo(), digits, MPFR_RNDN);
    j["lower"] = v.bounds.lo_string(digits);
    j["upper"] = v.bounds.hi_string(digits);
    j["uncertified"] = v.uncertified;
    if (!v.certificate_json.empty())
        j["certificate"] = nlohmann::json::parse(v.certificate_json);
    if (v.heuristic_error > 0) j["heuristic_error"] = v.heuristic_error;
    if (!v.note.empty()) j["note"] = v.note;
    if (include_runtime) j["runtime_seconds"] = runtime_seconds;
    return j.dump(2);
}

} // namespace valdet
