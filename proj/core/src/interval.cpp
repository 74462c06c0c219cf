#include "valdet/interval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

namespace valdet {

Interval::Interval(mpfr_prec_t prec) : prec_(std::max(prec, kMinPrec)) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& o) : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept : prec_(o.prec_) {
    mpfr_init2(lo_, 64);
    mpfr_init2(hi_, 64);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
    if (this != &o) {
        set_prec(o.prec_);
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
    if (this != &o) {
        prec_ = o.prec_;
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }
    return *this;
}

Interval::~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

void Interval::set_prec(mpfr_prec_t p) {
    if (prec_ != p) {
        prec_ = p;
        mpfr_set_prec(lo_, p);
        mpfr_set_prec(hi_, p);
    }
}

Interval Interval::point(double v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, v, MPFR_RNDD);
    mpfr_set_d(r.hi_, v, MPFR_RNDU);
    return r;
}

Interval Interval::of(double lo, double hi, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, lo, MPFR_RNDD);
    mpfr_set_d(r.hi_, hi, MPFR_RNDU);
    return r;
}

Interval Interval::ratio(long num, long den, mpfr_prec_t prec) {
    if (den == 0) throw DomainError("ratio: zero denominator");
    Interval r(prec);
    mpfr_set_si(r.lo_, num, MPFR_RNDD);
    mpfr_set_si(r.hi_, num, MPFR_RNDU);
    mpfr_div_si(r.lo_, r.lo_, den, den > 0 ? MPFR_RNDD : MPFR_RNDU);
    mpfr_div_si(r.hi_, r.hi_, den, den > 0 ? MPFR_RNDU : MPFR_RNDD);
    if (mpfr_cmp(r.lo_, r.hi_) > 0) mpfr_swap(r.lo_, r.hi_);
    return r;
}

Interval Interval::from_decimal(const std::string& dec, mpfr_prec_t prec) {
    Interval r(prec);
    if (mpfr_set_str(r.lo_, dec.c_str(), 10, MPFR_RNDD) != 0 &&
        mpfr_nan_p(r.lo_))
        throw ParseError("bad decimal literal: " + dec);
    mpfr_set_str(r.hi_, dec.c_str(), 10, MPFR_RNDU);
    return r;
}

Interval Interval::from_decimal(const std::string& lo, const std::string& hi,
                                mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_str(r.lo_, lo.c_str(), 10, MPFR_RNDD);
    mpfr_set_str(r.hi_, hi.c_str(), 10, MPFR_RNDU);
    if (mpfr_cmp(r.lo_, r.hi_) > 0)
        throw DomainError("from_decimal: lo > hi");
    return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::from_mpfr(mpfr_srcptr v) {
    Interval r(mpfr_get_prec(v));
    mpfr_set(r.lo_, v, MPFR_RNDD);
    mpfr_set(r.hi_, v, MPFR_RNDU);
    return r;
}

Interval Interval::from_mpfr(mpfr_srcptr lo, mpfr_srcptr hi) {
    Interval r(std::max(mpfr_get_prec(lo), mpfr_get_prec(hi)));
    mpfr_set(r.lo_, lo, MPFR_RNDD);
    mpfr_set(r.hi_, hi, MPFR_RNDU);
    if (mpfr_cmp(r.lo_, r.hi_) > 0)
        throw DomainError("from_mpfr: lo > hi");
    return r;
}

Interval Interval::pi(mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_const_pi(r.lo_, MPFR_RNDD);
    mpfr_const_pi(r.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::log2c(mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_const_log2(r.lo_, MPFR_RNDD);
    mpfr_const_log2(r.hi_, MPFR_RNDU);
    return r;
}

bool Interval::contains_zero() const {
    return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

bool Interval::contains(const Interval& o) const {
    return mpfr_cmp(lo_, o.lo_) <= 0 && mpfr_cmp(hi_, o.hi_) >= 0;
}

bool Interval::contains(double v) const {
    return mpfr_cmp_d(lo_, v) <= 0 && mpfr_cmp_d(hi_, v) >= 0;
}

bool Interval::strictly_positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::strictly_negative() const { return mpfr_sgn(hi_) < 0; }

bool Interval::definitely_less(const Interval& o) const {
    return mpfr_cmp(hi_, o.lo_) < 0;
}

bool Interval::intersects(const Interval& o) const {
    return mpfr_cmp(lo_, o.hi_) <= 0 && mpfr_cmp(o.lo_, hi_) <= 0;
}

bool Interval::is_nan() const { return mpfr_nan_p(lo_) || mpfr_nan_p(hi_); }

double Interval::mid_d() const {
    return (lo_d() + hi_d()) / 2;
}

Interval Interval::mid() const {
    Interval r(prec_);
    mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(r.lo_, r.lo_, 1, MPFR_RNDN);
    mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
    return r;
}

Interval Interval::width() const {
    Interval r(prec_);
    mpfr_sub(r.hi_, hi_, lo_, MPFR_RNDU);
    mpfr_set(r.lo_, r.hi_, MPFR_RNDD);
    return r;
}

double Interval::width_d() const {
    mpfr_t w;
    mpfr_init2(w, 64);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
}

Interval Interval::mag() const {
    Interval r(prec_);
    mpfr_abs(r.lo_, lo_, MPFR_RNDU);
    mpfr_abs(r.hi_, hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.lo_, r.hi_, MPFR_RNDU);
    mpfr_set(r.lo_, r.hi_, MPFR_RNDD);
    return r;
}

Interval Interval::abs() const {
    Interval r(prec_);
    if (mpfr_sgn(lo_) >= 0) return *this;
    if (mpfr_sgn(hi_) <= 0) return -*this;
    mpfr_set_zero(r.lo_, 1);
    mpfr_abs(r.hi_, lo_, MPFR_RNDU);
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_abs(t, hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

Interval Interval::operator-() const {
    Interval r(prec_);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

Interval Interval::operator+(const Interval& b) const {
    Interval r(std::max(prec_, b.prec_));
    mpfr_add(r.lo_, lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, b.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::operator-(const Interval& b) const {
    Interval r(std::max(prec_, b.prec_));
    mpfr_sub(r.lo_, lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, b.lo_, MPFR_RNDU);
    return r;
}

Interval Interval::operator*(const Interval& b) const {
    Interval r(std::max(prec_, b.prec_));
    mpfr_t t;
    mpfr_init2(t, r.prec_);
    // lo: min of the four products rounded down
    mpfr_mul(r.lo_, lo_, b.lo_, MPFR_RNDD);
    mpfr_mul(t, lo_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(t, hi_, b.lo_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(t, hi_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    // hi: max of the four products rounded up
    mpfr_mul(r.hi_, lo_, b.lo_, MPFR_RNDU);
    mpfr_mul(t, lo_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_mul(t, hi_, b.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_mul(t, hi_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

Interval Interval::operator/(const Interval& b) const {
    if (b.contains_zero())
        throw DomainError("interval division by an interval containing zero");
    Interval r(std::max(prec_, b.prec_));
    mpfr_t t;
    mpfr_init2(t, r.prec_);
    mpfr_div(r.lo_, lo_, b.lo_, MPFR_RNDD);
    mpfr_div(t, lo_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(t, hi_, b.lo_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(t, hi_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(r.hi_, lo_, b.lo_, MPFR_RNDU);
    mpfr_div(t, lo_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_div(t, hi_, b.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_div(t, hi_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

Interval Interval::sqr() const {
    Interval r(prec_);
    if (contains_zero()) {
        mpfr_set_zero(r.lo_, 1);
        mpfr_t t;
        mpfr_init2(t, prec_);
        mpfr_sqr(r.hi_, lo_, MPFR_RNDU);
        mpfr_sqr(t, hi_, MPFR_RNDU);
        mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
        mpfr_clear(t);
    } else if (mpfr_sgn(lo_) > 0) {
        mpfr_sqr(r.lo_, lo_, MPFR_RNDD);
        mpfr_sqr(r.hi_, hi_, MPFR_RNDU);
    } else {
        mpfr_sqr(r.lo_, hi_, MPFR_RNDD);
        mpfr_sqr(r.hi_, lo_, MPFR_RNDU);
    }
    return r;
}

Interval Interval::sqrt() const {
    if (mpfr_sgn(hi_) < 0)
        throw NonPositiveArgument("sqrt of a negative interval");
    Interval r(prec_);
    if (mpfr_sgn(lo_) <= 0)
        mpfr_set_zero(r.lo_, 1);
    else
        mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::recip() const {
    return Interval::ratio(1, 1, prec_) / *this;
}

Interval Interval::pow_int(long n) const {
    Interval r(prec_);
    if (n == 0) {
        mpfr_set_si(r.lo_, 1, MPFR_RNDD);
        mpfr_set_si(r.hi_, 1, MPFR_RNDU);
        return r;
    }
    if (n < 0) return recip().pow_int(-n);
    if (n % 2 == 1 || mpfr_sgn(lo_) >= 0) {
        mpfr_pow_si(r.lo_, lo_, n, MPFR_RNDD);
        mpfr_pow_si(r.hi_, hi_, n, MPFR_RNDU);
        if (mpfr_cmp(r.lo_, r.hi_) > 0) mpfr_swap(r.lo_, r.hi_);
        return r;
    }
    // even power with lo < 0
    if (mpfr_sgn(hi_) <= 0) {
        mpfr_pow_si(r.lo_, hi_, n, MPFR_RNDD);
        mpfr_pow_si(r.hi_, lo_, n, MPFR_RNDU);
        return r;
    }
    mpfr_set_zero(r.lo_, 1);
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_pow_si(r.hi_, lo_, n, MPFR_RNDU);
    mpfr_pow_si(t, hi_, n, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

Interval Interval::exp() const {
    Interval r(prec_);
    mpfr_exp(r.lo_, lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::log() const {
    if (mpfr_sgn(lo_) <= 0)
        throw NonPositiveArgument("log of an interval with lo <= 0");
    Interval r(prec_);
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::pow(const Interval& t) const {
    return (t * log()).exp();
}

Interval operator*(long a, const Interval& b) {
    return Interval::ratio(a, 1, b.precision()) * b;
}
Interval operator+(long a, const Interval& b) {
    return Interval::ratio(a, 1, b.precision()) + b;
}
Interval operator-(long a, const Interval& b) {
    return Interval::ratio(a, 1, b.precision()) - b;
}

// sin/cos by endpoint evaluation plus +-1 whenever a critical point
// (pi/2 + k pi for sin, k pi for cos) may lie inside the argument.
Interval Interval::sin() const {
    const mpfr_prec_t p = prec_;
    Interval twopi = Interval::pi(p) * Interval::ratio(2, 1, p);
    if (mpfr_cmp(width().lo(), twopi.lo()) >= 0)
        return Interval::of(-1.0, 1.0, p);
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_sin(r.lo_, lo_, MPFR_RNDD);
    mpfr_sin(t, hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_sin(r.hi_, lo_, MPFR_RNDU);
    mpfr_sin(t, hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    Interval pi_ = Interval::pi(p);
    Interval c0 = pi_ * Interval::ratio(1, 2, p);
    Interval kr = (*this - c0) / pi_;
    long k0 = (long)std::floor(kr.lo_d()) - 1;
    long k1 = (long)std::ceil(kr.hi_d()) + 1;
    for (long k = k0; k <= k1 && k - k0 <= 8; ++k) {
        Interval c = c0 + k * pi_;
        if (c.intersects(*this)) {
            bool even = ((k % 2) + 2) % 2 == 0;
            if (even) mpfr_set_si(r.hi_, 1, MPFR_RNDU);
            else      mpfr_set_si(r.lo_, -1, MPFR_RNDD);
        }
    }
    mpfr_clear(t);
    return r;
}

Interval Interval::cos() const {
    const mpfr_prec_t p = prec_;
    Interval twopi = Interval::pi(p) * Interval::ratio(2, 1, p);
    if (mpfr_cmp(width().lo(), twopi.lo()) >= 0)
        return Interval::of(-1.0, 1.0, p);
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_cos(r.lo_, lo_, MPFR_RNDD);
    mpfr_cos(t, hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_cos(r.hi_, lo_, MPFR_RNDU);
    mpfr_cos(t, hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    Interval pi_ = Interval::pi(p);
    Interval kr = *this / pi_;
    long k0 = (long)std::floor(kr.lo_d()) - 1;
    long k1 = (long)std::ceil(kr.hi_d()) + 1;
    for (long k = k0; k <= k1 && k - k0 <= 8; ++k) {
        Interval c = k * pi_;
        if (c.intersects(*this)) {
            bool even = ((k % 2) + 2) % 2 == 0;
            if (even) mpfr_set_si(r.hi_, 1, MPFR_RNDU);
            else      mpfr_set_si(r.lo_, -1, MPFR_RNDD);
        }
    }
    mpfr_clear(t);
    return r;
}

Interval Interval::sinh() const {
    Interval r(prec_);
    mpfr_sinh(r.lo_, lo_, MPFR_RNDD);
    mpfr_sinh(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::cosh() const {
    Interval r(prec_);
    if (contains_zero()) {
        mpfr_set_si(r.lo_, 1, MPFR_RNDD);
        mpfr_t t;
        mpfr_init2(t, prec_);
        mpfr_cosh(r.hi_, lo_, MPFR_RNDU);
        mpfr_cosh(t, hi_, MPFR_RNDU);
        mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
        mpfr_clear(t);
    } else if (mpfr_sgn(lo_) > 0) {
        mpfr_cosh(r.lo_, lo_, MPFR_RNDD);
        mpfr_cosh(r.hi_, hi_, MPFR_RNDU);
    } else {
        mpfr_cosh(r.lo_, hi_, MPFR_RNDD);
        mpfr_cosh(r.hi_, lo_, MPFR_RNDU);
    }
    return r;
}

Interval Interval::atan() const {
    Interval r(prec_);
    mpfr_atan(r.lo_, lo_, MPFR_RNDD);
    mpfr_atan(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::min_with(const Interval& o) const {
    Interval r(std::max(prec_, o.prec_));
    mpfr_min(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::max_with(const Interval& o) const {
    Interval r(std::max(prec_, o.prec_));
    mpfr_max(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::inflated(double rel) const {
    // relative margin plus an absolute floor at unit scale, so enclosures of
    // values at or near zero still gain slack
    Interval m = mag().max_with(Interval::point(1.0, prec_)) *
                 Interval::point(rel, prec_);
    Interval r(prec_);
    mpfr_sub(r.lo_, lo_, m.hi(), MPFR_RNDD);
    mpfr_add(r.hi_, hi_, m.hi(), MPFR_RNDU);
    return r;
}

std::string mpfr_to_decimal(mpfr_srcptr v, int digits, mpfr_rnd_t rnd) {
    if (mpfr_nan_p(v)) return "nan";
    if (mpfr_inf_p(v)) return mpfr_sgn(v) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(v)) return "0";
    mpfr_exp_t e;
    char* s = mpfr_get_str(nullptr, &e, 10, (size_t)digits, v, rnd);
    std::string digs(s);
    mpfr_free_str(s);
    bool neg = false;
    if (!digs.empty() && digs[0] == '-') {
        neg = true;
        digs = digs.substr(1);
    }
    // mpfr_get_str gives digits d1 d2 ... with value 0.d1d2... * 10^e
    std::string out = neg ? "-" : "";
    out += digs.substr(0, 1) + "." + digs.substr(1) + "e" +
           std::to_string((long)(e - 1));
    return out;
}

std::string Interval::lo_string(int digits) const {
    return mpfr_to_decimal(lo_, digits, MPFR_RNDD);
}

std::string Interval::hi_string(int digits) const {
    return mpfr_to_decimal(hi_, digits, MPFR_RNDU);
}

std::string Interval::to_string(int digits) const {
    return "[" + lo_string(digits) + ", " + hi_string(digits) + "]";
}

int honest_digits(mpfr_prec_t prec) {
    return std::max(5, (int)((double)prec * 0.30102999566398) - 5);
}

} // namespace valdet
