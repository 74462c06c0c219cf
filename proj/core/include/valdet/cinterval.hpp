#pragma once

#include "valdet/interval.hpp"

namespace valdet {

// Axis-aligned rectangle enclosure of a complex value.  Rectangles may
// overestimate products; that is accepted (disc geometry is recovered by
// circumscription where radii are needed).
class CInterval {
public:
    Interval re, im;

    explicit CInterval(mpfr_prec_t prec = 256) : re(prec), im(prec) {}
    CInterval(Interval r, Interval i) : re(std::move(r)), im(std::move(i)) {}

    static CInterval real(const Interval& r) {
        return CInterval(r, Interval::point(0.0, r.precision()));
    }
    static CInterval point(double x, double y, mpfr_prec_t prec) {
        return CInterval(Interval::point(x, prec), Interval::point(y, prec));
    }

    mpfr_prec_t precision() const { return re.precision(); }

    bool contains_zero() const {
        return re.contains_zero() && im.contains_zero();
    }
    bool contains(const CInterval& o) const {
        return re.contains(o.re) && im.contains(o.im);
    }
    bool is_real() const {
        return mpfr_zero_p(im.lo()) && mpfr_zero_p(im.hi());
    }

    CInterval operator-() const { return CInterval(-re, -im); }
    CInterval operator+(const CInterval& b) const {
        return CInterval(re + b.re, im + b.im);
    }
    CInterval operator-(const CInterval& b) const {
        return CInterval(re - b.re, im - b.im);
    }
    CInterval operator*(const CInterval& b) const {
        return CInterval(re * b.re - im * b.im, re * b.im + im * b.re);
    }
    CInterval operator*(const Interval& s) const {
        return CInterval(re * s, im * s);
    }
    CInterval operator/(const CInterval& b) const;  // throws if 0 in |b|^2

    CInterval conj() const { return CInterval(re, -im); }
    Interval abs2() const { return re.sqr() + im.sqr(); }
    Interval abs() const { return abs2().sqrt(); }

    CInterval sqr() const {
        return CInterval(re.sqr() - im.sqr(),
                         Interval::ratio(2, 1, precision()) * (re * im));
    }

    // Principal branch functions; the rectangle must exclude (-inf, 0].
    Interval arg() const;
    CInterval log() const;
    CInterval exp() const;
    CInterval sqrt() const;
    CInterval pow_real(const Interval& s) const;  // exp(s*log z)

    static CInterval hull(const CInterval& a, const CInterval& b) {
        return CInterval(Interval::hull(a.re, b.re), Interval::hull(a.im, b.im));
    }

    std::string to_string(int digits = 20) const {
        return re.to_string(digits) + " + i*" + im.to_string(digits);
    }
};

} // namespace valdet
