#pragma once

#include <optional>
#include <string>
#include <utility>

#include <gmpxx.h>

#include "opn/errors.hpp"

namespace opn {

using Rational = mpq_class;

// Closed interval with exact rational endpoints, lo <= hi.
//
// Arithmetic on intervals is exact (rationals); transcendental brackets are
// produced with directed rounding, so the true value always lies inside.
class RationalInterval {
public:
    RationalInterval() = default;
    RationalInterval(Rational lo, Rational hi);
    static RationalInterval point(const Rational& v) { return {v, v}; }

    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    Rational width() const { return hi_ - lo_; }
    Rational midpoint() const { return (lo_ + hi_) / 2; }
    bool contains(const Rational& v) const { return lo_ <= v && v <= hi_; }
    bool contains_zero() const { return lo_ <= 0 && hi_ >= 0; }

    // Outward rounding of both endpoints to dyadic rationals with `bits` fractional bits.
    RationalInterval rounded_outward(long bits) const;

    double lo_double() const { return lo_.get_d(); }
    double hi_double() const { return hi_.get_d(); }
    std::string to_string(int digits = 12) const;

    friend RationalInterval operator+(const RationalInterval& a, const RationalInterval& b);
    friend RationalInterval operator-(const RationalInterval& a, const RationalInterval& b);
    friend RationalInterval operator*(const RationalInterval& a, const RationalInterval& b);
    friend RationalInterval operator/(const RationalInterval& a, const RationalInterval& b);
    friend RationalInterval operator-(const RationalInterval& a);

private:
    Rational lo_{0};
    Rational hi_{0};
};

RationalInterval abs(const RationalInterval& a);

// Strict comparisons resolved only when the intervals do not overlap.
std::optional<bool> certified_less(const RationalInterval& a, const RationalInterval& b);
std::optional<bool> certified_greater(const RationalInterval& a, const RationalInterval& b);

RationalInterval sqrt_bracket(const Rational& x, long bits);
RationalInterval sqrt_bracket(const RationalInterval& x, long bits);
RationalInterval log_bracket(const RationalInterval& x, long bits);  // x.lo > 0
RationalInterval log_bracket(const Rational& x, long bits);
RationalInterval atan_bracket(const RationalInterval& x, long bits);
RationalInterval pi_bracket(long bits);

// Decimal literal as an exact rational ("0.3791" -> 3791/10000).
Rational decimal(const std::string& literal);

// Shortest decimal string of the lower endpoint rounded down (for reports).
std::string decimal_floor(const Rational& v, int digits);

struct PrecisionPolicy {
    long initial_bits = 64;
    long cap_bits = 1 << 14;
};

// Doubles precision until `attempt(bits)` returns a value; throws UndecidableError at the cap.
template <class Attempt>
auto refine(Attempt&& attempt, const PrecisionPolicy& policy, const std::string& what)
    -> typename decltype(attempt(0L))::value_type {
    for (long bits = policy.initial_bits; bits <= policy.cap_bits; bits *= 2) {
        if (auto r = attempt(bits)) return std::move(*r);
    }
    throw UndecidableError(what + ": comparison unresolved", policy.cap_bits);
}

}  // namespace opn
