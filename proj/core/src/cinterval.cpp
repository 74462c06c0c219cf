#include "valdet/cinterval.hpp"

namespace valdet {

CInterval CInterval::operator/(const CInterval& b) const {
    Interval d = b.abs2();
    if (d.contains_zero())
        throw DomainError("complex division by a rectangle containing zero");
    CInterval num = *this * b.conj();
    return CInterval(num.re / d, num.im / d);
}

// Argument of a rectangle that excludes the branch cut (-inf, 0].
// Cases by half-plane; combines atan of monotone quotients.
Interval CInterval::arg() const {
    const mpfr_prec_t p = precision();
    Interval pi_ = Interval::pi(p);
    Interval half_pi = pi_ * Interval::ratio(1, 2, p);
    if (re.strictly_positive()) {
        return (im / re).atan();
    }
    if (im.strictly_positive()) {
        // upper half plane: arg = pi/2 + atan(-re/im)
        return half_pi + ((-re) / im).atan();
    }
    if (im.strictly_negative()) {
        // lower half plane: arg = -pi/2 + atan(re/(-im)) ... = -pi/2 - atan(-re/-im)?
        // use arg(z) = -arg(conj z)
        CInterval c = conj();
        return -(half_pi + ((-c.re) / c.im).atan());
    }
    throw DomainError("complex arg: rectangle may cross the branch cut");
}

CInterval CInterval::log() const {
    Interval a2 = abs2();
    if (a2.contains_zero())
        throw DomainError("complex log: rectangle contains zero");
    const mpfr_prec_t p = precision();
    Interval half = Interval::ratio(1, 2, p);
    return CInterval(half * a2.log(), arg());
}

CInterval CInterval::exp() const {
    Interval m = re.exp();
    return CInterval(m * im.cos(), m * im.sin());
}

CInterval CInterval::sqrt() const {
    const mpfr_prec_t p = precision();
    return (log() * Interval::ratio(1, 2, p)).exp();
}

CInterval CInterval::pow_real(const Interval& s) const {
    return (log() * s).exp();
}

} // namespace valdet
