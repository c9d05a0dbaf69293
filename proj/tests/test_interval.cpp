#include <doctest.h>

#include <cmath>

#include "opn/errors.hpp"
#include "opn/interval.hpp"

using namespace opn;

TEST_CASE("decimal literals are exact") {
    CHECK(decimal("0.3791") == Rational(3791, 10000));
    CHECK(decimal("1.2592") == Rational(787, 625));
    CHECK(decimal("3040000") == Rational(3040000));
    CHECK(decimal("-0.5") == Rational(-1, 2));
    CHECK(decimal_floor(Rational(2, 3), 4) == "0.6666");
}

TEST_CASE("interval arithmetic") {
    const RationalInterval a(Rational(1), Rational(2)), b(Rational(-3), Rational(5));
    CHECK((a + b).lo() == -2);
    CHECK((a * b).lo() == -6);
    CHECK((a * b).hi() == 10);
    CHECK((-a).hi() == -1);
    CHECK(abs(b).lo() == 0);
    CHECK_THROWS_AS(a / b, UndecidableError);
    CHECK((a / a).hi() == 2);
    CHECK_THROWS(RationalInterval(Rational(2), Rational(1)));
}

TEST_CASE("certified comparisons need disjoint intervals") {
    const RationalInterval a(Rational(1), Rational(2)), b(Rational(2), Rational(3)), c(Rational(5, 2), Rational(3));
    CHECK_FALSE(certified_less(a, b).has_value());
    CHECK(*certified_less(a, c));
    CHECK_FALSE(*certified_greater(a, c));
}

TEST_CASE("transcendental brackets contain the true value") {
    for (long bits : {32L, 64L, 256L}) {
        const auto l2 = log_bracket(Rational(2), bits);
        CHECK(l2.lo_double() <= std::log(2.0) + 1e-15);
        CHECK(l2.hi_double() >= std::log(2.0) - 1e-15);
        CHECK(l2.width() < Rational(1, 1ul << 30));
        const auto pi = pi_bracket(bits);
        CHECK(pi.lo() < Rational(355, 113));
        CHECK(pi.hi() > Rational(333, 106));
        const auto s = sqrt_bracket(Rational(19), bits);
        CHECK(s.lo() * s.lo() <= 19);
        CHECK(s.hi() * s.hi() >= 19);
        const auto at = atan_bracket(RationalInterval::point(Rational(1)), bits);
        CHECK(certified_less(at * RationalInterval::point(Rational(4)), pi_bracket(bits) + RationalInterval::point(Rational(1, 1000))).value());
    }
}

TEST_CASE("refinement doubles precision and stops at the cap") {
    long seen = 0;
    const long got = refine(
        [&](long bits) -> std::optional<long> {
            seen = bits;
            return bits >= 256 ? std::optional<long>(bits) : std::nullopt;
        },
        PrecisionPolicy{64, 1024}, "test");
    CHECK(got == 256);
    CHECK(seen == 256);
    CHECK_THROWS_AS(refine([](long) -> std::optional<int> { return std::nullopt; }, PrecisionPolicy{64, 256}, "never"),
                    UndecidableError);
    // log 2 versus a rational that agrees to many digits
    const Rational close = decimal("0.69314718055994530941");
    const bool below = refine([&](long bits) { return certified_less(RationalInterval::point(close), log_bracket(Rational(2), bits)); },
                              PrecisionPolicy{}, "log 2");
    CHECK(below);
}
