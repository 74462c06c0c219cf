#include <algorithm>
#include <cmath>
#include <complex>

#include "valdet/quantities.hpp"

namespace valdet {

namespace {

// f_c^n(z) and its derivative, complex rectangles
CInterval fc_iter(const CInterval& z0, const CInterval& c, int n, CInterval* deriv) {
    const mpfr_prec_t p = z0.precision();
    CInterval z = z0;
    CInterval d = CInterval::real(Interval::ratio(1, 1, p));
    for (int i = 0; i < n; ++i) {
        d = d * z * Interval::ratio(2, 1, p);
        z = z.sqr() + c;
    }
    if (deriv) *deriv = d;
    return z;
}

std::complex<double> fc_iter_d(std::complex<double> z, std::complex<double> c, int n,
                               std::complex<double>* deriv) {
    std::complex<double> d = 1.0;
    for (int i = 0; i < n; ++i) {
        d *= 2.0 * z;
        z = z * z + c;
    }
    if (deriv) *deriv = d;
    return z;
}

struct JuliaPoint {
    Interval log_mult;   // log |(f^n)'(z)|
    Interval inv_gap2;   // 1 / |1 - 1/(f^n)'(z)|^2
};

// All repelling solutions of f_c^n(z) = z: continuation from the c = 0
// repelling family (the (2^n - 1)-th roots of unity), double precision first,
// then mpfr polish and an interval-Newton verification of each root with a
// pairwise-disjointness and count check.
std::vector<JuliaPoint> julia_period_points(const CInterval& c, int n,
                                            mpfr_prec_t p) {
    const long m = (1L << n) - 1;
    std::complex<double> cd(c.re.mid_d(), c.im.mid_d());
    int steps = std::max(4, (int)(std::abs(cd) / 0.004) + 1);

    std::vector<std::complex<double>> pts((size_t)m);
    for (long k = 0; k < m; ++k) {
        std::complex<double> z = std::polar(1.0, 2 * M_PI * (double)k / (double)m);
        for (int s = 1; s <= steps; ++s) {
            std::complex<double> cc = cd * ((double)s / steps);
            for (int it = 0; it < 80; ++it) {
                std::complex<double> dw;
                std::complex<double> F = fc_iter_d(z, cc, n, &dw) - z;
                std::complex<double> step = F / (dw - 1.0);
                z -= step;
                if (std::abs(step) < 1e-14) break;
            }
        }
        pts[(size_t)k] = z;
    }

    // pairwise disjointness at double resolution
    {
        std::vector<std::complex<double>> sorted = pts;
        std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        for (size_t i = 1; i < sorted.size(); ++i)
            if (std::abs(sorted[i] - sorted[i - 1]) < 1e-9)
                throw RootEnumerationIncomplete(
                    "julia: collision among period-" + std::to_string(n) + " points");
    }

    std::vector<JuliaPoint> out;
    out.reserve((size_t)m);
    Interval one = Interval::ratio(1, 1, p);
    for (long k = 0; k < m; ++k) {
        // mpfr polish
        CInterval z = CInterval::point(pts[(size_t)k].real(), pts[(size_t)k].imag(), p);
        for (int it = 0; it < 60; ++it) {
            CInterval dw(p);
            CInterval F = fc_iter(CInterval(z.re.mid(), z.im.mid()), c, n, &dw);
            F = F - CInterval(z.re.mid(), z.im.mid());
            CInterval step = F / (dw - CInterval::real(one));
            z = CInterval(z.re.mid() - step.re.mid(), z.im.mid() - step.im.mid());
            if (step.abs().hi_d() < std::ldexp(1.0, -(int)p + 8)) break;
        }
        // interval-Newton verification on a small rectangle
        double delta = std::ldexp(1.0, -(int)p / 2);
        bool verified = false;
        CInterval enc(p);
        for (int attempt = 0; attempt < 24 && !verified; ++attempt) {
            Interval dr = Interval::of(-delta, delta, p);
            CInterval X(z.re.mid() + dr, z.im.mid() + dr);
            CInterval dw(p);
            CInterval Fx = fc_iter(CInterval(z.re.mid(), z.im.mid()), c, n, &dw);
            Fx = Fx - CInterval(z.re.mid(), z.im.mid());
            CInterval dX(p);
            fc_iter(X, c, n, &dX);
            CInterval denom = dX - CInterval::real(one);
            if (!denom.contains_zero()) {
                CInterval Nz = CInterval(z.re.mid(), z.im.mid()) - Fx / denom;
                if (X.re.contains(Nz.re) && X.im.contains(Nz.im)) {
                    enc = Nz;
                    verified = true;
                }
            }
            delta *= 8;
        }
        if (!verified)
            throw RootEnumerationIncomplete(
                "julia: interval Newton failed on a period point");
        CInterval lam(p);
        fc_iter(enc, c, n, &lam);
        Interval mod2 = lam.abs2();
        if (!(mod2.lo_d() > 1.0))
            throw RootEnumerationIncomplete("julia: tracked point is not repelling");
        JuliaPoint jp{Interval(p), Interval(p)};
        jp.log_mult = mod2.log() * Interval::ratio(1, 2, p);
        // |1 - 1/lambda|^2 = det over R^2 of (I - [Df^n]^{-1})
        CInterval inv = CInterval::real(one) / lam;
        Interval gap2 = (CInterval::real(one) - inv).abs2();
        if (gap2.contains_zero())
            throw DegenerateDenominator("julia: 1 - 1/multiplier vanishes");
        jp.inv_gap2 = one / gap2;
        out.push_back(jp);
    }
    return out;
}

} // namespace

CertifiedValue julia_dimension(const CInterval& c, const RunOptions& opt) {
    const mpfr_prec_t p = opt.prec;
    if (!(c.abs().hi_d() <= 0.2))
        throw DomainError("julia_dimension: main-cardioid guard |c| <= 0.2");
    if (opt.N > 14) throw DomainError("julia_dimension: N <= 14");

    // period data reused across s-evaluations
    std::vector<std::vector<JuliaPoint>> data;
    for (int n = 1; n <= opt.N; ++n)
        data.push_back(julia_period_points(c, n, p));

    auto dN = [&](double s, int N) {
        Interval si = Interval::point(s, p);
        std::vector<Interval> tr;
        for (int n = 1; n <= N; ++n) {
            Interval acc = Interval::point(0.0, p);
            for (auto& jp : data[(size_t)n - 1])
                acc += (-(si * jp.log_mult)).exp() * jp.inv_gap2;
            tr.push_back(acc);
        }
        Interval a_sum = Interval::ratio(1, 1, p);
        std::vector<Interval> a{Interval::ratio(1, 1, p)};
        for (int n = 1; n <= N; ++n) {
            Interval acc = Interval::point(0.0, p);
            for (int k = 1; k <= n; ++k) acc += tr[(size_t)k - 1] * a[(size_t)(n - k)];
            a.push_back(acc * Interval::ratio(-1, n, p));
            a_sum += a.back();
        }
        return a_sum.mid_d();
    };

    auto root = [&](int N) {
        double lo = 0.7, hi = 1.45;
        double flo = dN(lo, N), fhi = dN(hi, N);
        if (flo * fhi > 0) throw NoSignChange("julia: no dimension bracket");
        for (int it = 0; it < 200; ++it) {
            double mid = (lo + hi) / 2;
            double fm = dN(mid, N);
            if ((fm < 0) == (flo < 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
            if (hi - lo < 1e-14) break;
        }
        return (lo + hi) / 2;
    };

    double tN = root(opt.N);
    double tN1 = root(opt.N - 1);

    CertifiedValue out;
    out.name = "julia_dimension";
    out.order_N = opt.N;
    out.estimate = Interval::point(tN, p);
    out.heuristic_error = std::abs(tN - tN1);
    out.uncertified = true;
    out.bounds = Interval::of(tN - 10 * out.heuristic_error - 1e-12,
                              tN + 10 * out.heuristic_error + 1e-12, p);
    out.note = "no tail certificate exists for this non-IFS presentation";
    return out;
}

} // namespace valdet
