#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

#include "valdet/errors.hpp"

namespace valdet {

// A closed interval [lo, hi] of MPFR big floats with outward rounding.
// Every operation returns an interval containing the exact image of its
// inputs.  Precision is a property of the endpoints; binary operations work
// at the larger of the two operand precisions.  Immutable in spirit: all
// operations produce new values, so instances can be shared across threads.
class Interval {
public:
    static constexpr mpfr_prec_t kMinPrec = 64;

    explicit Interval(mpfr_prec_t prec = 256);
    Interval(const Interval& o);
    Interval(Interval&& o) noexcept;
    Interval& operator=(const Interval& o);
    Interval& operator=(Interval&& o) noexcept;
    ~Interval();

    // Factories (all outward-rounded where the value is not representable).
    static Interval point(double v, mpfr_prec_t prec);
    static Interval of(double lo, double hi, mpfr_prec_t prec);
    static Interval ratio(long num, long den, mpfr_prec_t prec);
    static Interval from_decimal(const std::string& dec, mpfr_prec_t prec);
    static Interval from_decimal(const std::string& lo, const std::string& hi,
                                 mpfr_prec_t prec);
    static Interval hull(const Interval& a, const Interval& b);
    static Interval from_mpfr(mpfr_srcptr v);                    // point interval
    static Interval from_mpfr(mpfr_srcptr lo, mpfr_srcptr hi);
    static Interval pi(mpfr_prec_t prec);
    static Interval log2c(mpfr_prec_t prec);

    mpfr_prec_t precision() const { return prec_; }
    mpfr_srcptr lo() const { return lo_; }
    mpfr_srcptr hi() const { return hi_; }

    bool contains_zero() const;
    bool contains(const Interval& o) const;       // o subset of *this
    bool contains(double v) const;
    bool strictly_positive() const;               // lo > 0
    bool strictly_negative() const;               // hi < 0
    bool definitely_less(const Interval& o) const;  // hi < o.lo
    bool intersects(const Interval& o) const;
    bool is_nan() const;

    double lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double mid_d() const;

    Interval mid() const;        // point interval at the midpoint
    Interval width() const;      // hi - lo, rounded up (point interval)
    double width_d() const;
    Interval mag() const;        // sup |x| over the interval (point)
    Interval abs() const;        // enclosure of |x|

    Interval operator-() const;
    Interval operator+(const Interval& b) const;
    Interval operator-(const Interval& b) const;
    Interval operator*(const Interval& b) const;
    Interval operator/(const Interval& b) const;  // throws DomainError if 0 in b
    Interval& operator+=(const Interval& b) { *this = *this + b; return *this; }
    Interval& operator-=(const Interval& b) { *this = *this - b; return *this; }
    Interval& operator*=(const Interval& b) { *this = *this * b; return *this; }

    Interval sqr() const;                 // tighter than x*x
    Interval sqrt() const;                // of the nonnegative part; error if hi < 0
    Interval recip() const;
    Interval pow_int(long n) const;
    Interval exp() const;
    Interval log() const;                 // requires lo > 0
    Interval pow(const Interval& t) const;  // exp(t * log(*this)); requires lo > 0
    Interval sin() const;
    Interval cos() const;
    Interval sinh() const;
    Interval cosh() const;
    Interval atan() const;

    Interval min_with(const Interval& o) const;
    Interval max_with(const Interval& o) const;

    // widen both endpoints outward by rel * mag() plus a few ulps
    Interval inflated(double rel) const;

    // Decimal strings of the endpoints, rounded outward, `digits` significant.
    std::string lo_string(int digits) const;
    std::string hi_string(int digits) const;
    std::string to_string(int digits = 20) const;  // "[lo, hi]"

private:
    friend class CInterval;
    mpfr_t lo_, hi_;
    mpfr_prec_t prec_;
    void set_prec(mpfr_prec_t p);
};

Interval operator*(long a, const Interval& b);
Interval operator+(long a, const Interval& b);
Interval operator-(long a, const Interval& b);

// Number of decimal digits honestly represented at `prec` bits, minus slack.
int honest_digits(mpfr_prec_t prec);

std::string mpfr_to_decimal(mpfr_srcptr v, int digits, mpfr_rnd_t rnd);

} // namespace valdet
