#pragma once

#include "pacil/errors.hpp"
#include "pacil/rational.hpp"

namespace pacil {

struct RationalBounds {
    Rational lo, hi;  // lo <= true value <= hi
};

namespace detail {

/// atanh series for ln(y) with y in (1, 2]: t = (y-1)/(y+1) <= 1/3,
/// ln(y) = 2 * sum_{j>=0} t^(2j+1)/(2j+1). The tail after N terms is
/// bounded by 2*t^(2N+1) / ((2N+1)(1-t^2)), which is exact in rationals.
inline RationalBounds ln_series_bounds(const Rational& y, int terms) {
    Rational t = (y - Rational(1)) / (y + Rational(1));
    Rational t2 = t * t;
    Rational sum(0);
    Rational power = t;  // t^(2j+1)
    for (int j = 0; j < terms; ++j) {
        sum += power / Rational(2 * j + 1);
        power *= t2;
    }
    Rational tail = power / (Rational(2 * terms + 1) * (Rational(1) - t2));
    Rational lo = Rational(2) * sum;
    return {lo, lo + Rational(2) * tail};
}

}  // namespace detail

/// Certified rational bounds on ln(x) for rational x > 0. The argument is
/// reduced to (1, 2] by exact halvings; the series tail bound makes the
/// bracket rigorous, so callers can take exact floors/ceilings once the
/// bracket is tight enough.
inline RationalBounds ln_bounds(const Rational& x, int terms) {
    if (x.sign() <= 0) throw OutOfRangeError("ln of non-positive value");
    if (x == Rational(1)) return {Rational(0), Rational(0)};
    if (x < Rational(1)) {
        RationalBounds b = ln_bounds(x.reciprocal(), terms);
        return {-b.hi, -b.lo};
    }
    long halvings = 0;
    Rational y = x;
    while (y > Rational(2)) {
        y /= Rational(2);
        ++halvings;
    }
    RationalBounds series = detail::ln_series_bounds(y, terms);
    if (halvings == 0) return series;
    RationalBounds ln2 = detail::ln_series_bounds(Rational(2), terms);
    Rational k(halvings);
    return {k * ln2.lo + series.lo, k * ln2.hi + series.hi};
}

}  // namespace pacil
