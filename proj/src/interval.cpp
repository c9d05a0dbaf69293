#include "opn/interval.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <mpfr.h>

#include "opn/arith.hpp"

namespace opn {

namespace {

// RAII wrapper around an mpfr_t.
class Mpfr {
public:
    explicit Mpfr(long bits) { mpfr_init2(v_, std::max<long>(bits, MPFR_PREC_MIN)); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;

    mpfr_ptr get() { return v_; }

    Rational to_rational() const {
        Rational r;
        mpfr_get_q(r.get_mpq_t(), v_);
        return r;
    }

private:
    mpfr_t v_;
};

using UnaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

// Bracket of a monotone increasing function on [lo, hi].
RationalInterval monotone_bracket(UnaryFn fn, const RationalInterval& x, long bits) {
    const long work = bits + 16;
    Mpfr a(work), b(work);
    mpfr_set_q(a.get(), x.lo().get_mpq_t(), MPFR_RNDD);
    fn(a.get(), a.get(), MPFR_RNDD);
    mpfr_set_q(b.get(), x.hi().get_mpq_t(), MPFR_RNDU);
    fn(b.get(), b.get(), MPFR_RNDU);
    return {a.to_rational(), b.to_rational()};
}

Int floor_div(const Int& n, const Int& d) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    return q;
}

}  // namespace

RationalInterval::RationalInterval(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    lo_.canonicalize();
    hi_.canonicalize();
    if (lo_ > hi_) throw InternalError("RationalInterval with lo > hi");
}

RationalInterval RationalInterval::rounded_outward(long bits) const {
    const Int scale = Int(1) << bits;
    const Rational lo_scaled = lo_ * scale;
    const Rational hi_scaled = hi_ * scale;
    Int lo_num = floor_div(lo_scaled.get_num(), lo_scaled.get_den());
    Int hi_num = -floor_div(-hi_scaled.get_num(), hi_scaled.get_den());
    return {Rational(lo_num, scale), Rational(hi_num, scale)};
}

std::string RationalInterval::to_string(int digits) const {
    return "[" + decimal_floor(lo_, digits) + ", " + decimal_floor(hi_, digits) + "]";
}

RationalInterval operator+(const RationalInterval& a, const RationalInterval& b) {
    return {a.lo_ + b.lo_, a.hi_ + b.hi_};
}

RationalInterval operator-(const RationalInterval& a, const RationalInterval& b) {
    return {a.lo_ - b.hi_, a.hi_ - b.lo_};
}

RationalInterval operator-(const RationalInterval& a) { return {-a.hi_, -a.lo_}; }

RationalInterval operator*(const RationalInterval& a, const RationalInterval& b) {
    std::array<Rational, 4> p = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    auto [mn, mx] = std::minmax_element(p.begin(), p.end());
    return {*mn, *mx};
}

RationalInterval operator/(const RationalInterval& a, const RationalInterval& b) {
    if (b.contains_zero()) throw UndecidableError("interval division by an interval containing zero", 0);
    return a * RationalInterval(1 / b.hi_, 1 / b.lo_);
}

RationalInterval abs(const RationalInterval& a) {
    if (a.lo() >= 0) return a;
    if (a.hi() <= 0) return -a;
    return {Rational(0), std::max(Rational(-a.lo()), a.hi())};
}

std::optional<bool> certified_less(const RationalInterval& a, const RationalInterval& b) {
    if (a.hi() < b.lo()) return true;
    if (a.lo() >= b.hi()) return false;
    return std::nullopt;
}

std::optional<bool> certified_greater(const RationalInterval& a, const RationalInterval& b) {
    return certified_less(b, a);
}

RationalInterval sqrt_bracket(const Rational& x, long bits) {
    if (x < 0) throw DomainError("sqrt_bracket of a negative number");
    // sqrt(n/d) = sqrt(n d)/d, bracketed by integer square roots at 2^bits scale.
    const Int& n = x.get_num();
    const Int& d = x.get_den();
    const Int scale = Int(1) << bits;
    Int radicand = n * d * scale * scale;
    Int s;
    mpz_sqrt(s.get_mpz_t(), radicand.get_mpz_t());
    const Int denom = d * scale;
    if (s * s == radicand) return RationalInterval::point(Rational(s, denom));
    return {Rational(s, denom), Rational(s + 1, denom)};
}

RationalInterval sqrt_bracket(const RationalInterval& x, long bits) {
    return {sqrt_bracket(x.lo(), bits).lo(), sqrt_bracket(x.hi(), bits).hi()};
}

RationalInterval log_bracket(const RationalInterval& x, long bits) {
    if (x.lo() <= 0) throw DomainError("log_bracket of a non-positive interval");
    return monotone_bracket(&mpfr_log, x, bits);
}

RationalInterval log_bracket(const Rational& x, long bits) {
    return log_bracket(RationalInterval::point(x), bits);
}

RationalInterval atan_bracket(const RationalInterval& x, long bits) {
    return monotone_bracket(&mpfr_atan, x, bits);
}

RationalInterval pi_bracket(long bits) {
    const long work = bits + 16;
    Mpfr a(work), b(work);
    mpfr_const_pi(a.get(), MPFR_RNDD);
    mpfr_const_pi(b.get(), MPFR_RNDU);
    return {a.to_rational(), b.to_rational()};
}

Rational decimal(const std::string& literal) {
    const auto dot = literal.find('.');
    if (dot == std::string::npos) return Rational(Int(literal, 10));
    const std::string digits = literal.substr(0, dot) + literal.substr(dot + 1);
    const std::size_t frac = literal.size() - dot - 1;
    Rational r(Int(digits, 10), pow(Int(10), static_cast<unsigned long>(frac)));
    r.canonicalize();
    return r;
}

std::string decimal_floor(const Rational& v, int digits) {
    const Int scale = pow(Int(10), static_cast<unsigned long>(digits));
    const Rational scaled = v * scale;
    Int whole = floor_div(scaled.get_num(), scaled.get_den());
    const bool negative = whole < 0;
    Int mag = negative ? Int(-whole) : whole;
    std::string s = mag.get_str();
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return (negative ? "-" : "") + s;
}

}  // namespace opn
