#include <doctest.h>

#include <random>
#include <set>

#include "opn/arith.hpp"
#include "opn/cyclotomic.hpp"
#include "opn/errors.hpp"
#include "opn/gap.hpp"

using namespace opn;

namespace {

std::vector<unsigned> primes_between(unsigned lo, unsigned hi) {
    std::vector<unsigned> out;
    for (unsigned n = lo; n <= hi; ++n)
        if (is_probable_prime(Int(n))) out.push_back(n);
    return out;
}

}  // namespace

TEST_CASE("root counts") {
    CHECK(root_count_mod(19, 191) == 19);
    CHECK(root_count_mod(19, 7) == 1);
    CHECK(root_count_mod(5, 11) == 5);
    CHECK(root_count_mod(2, 8) == 4);
    CHECK(root_count_mod(4, 16) == 8);
    CHECK_THROWS_AS(root_count_mod(5, 1), DomainError);
}

TEST_CASE("root count formula against brute force") {
    for (unsigned long l : {2ul, 3ul, 4ul, 5ul, 6ul, 7ul, 12ul, 19ul})
        for (unsigned long M = 2; M < 3000; ++M) {
            CAPTURE(l);
            CAPTURE(M);
            CHECK(root_count_formula(l, M) == root_count_mod(l, M));
        }
    // prime moduli: gcd(l, q - 1)
    for (unsigned long q = 3; q < 2000; q += 2) {
        if (!is_probable_prime(Int(q))) continue;
        for (unsigned long l : {5ul, 7ul, 19ul}) CHECK(root_count_mod(l, q) == Int(std::gcd(l, q - 1)));
    }
}

TEST_CASE("close-solution premises are reported field by field") {
    auto rep = lemma4_verify(19, 2, 3, 7, 1, 1, 11);
    CHECK_FALSE(rep.premises_ok());
    bool shape = false;
    for (const auto& e : rep.premise_errors) shape = shape || e.rfind("x1:", 0) == 0;
    CHECK(shape);

    rep = lemma4_verify(19, 4, 8, 7, 1, 1, 11);
    bool dep = false;
    for (const auto& e : rep.premise_errors) dep = dep || e.find("dependent") != std::string::npos;
    CHECK(dep);

    rep = lemma4_verify(17, 2, 3, 7, 1, 1, 11);
    REQUIRE_FALSE(rep.premises_ok());
    CHECK(rep.premise_errors.front().rfind("l:", 0) == 0);
    rep = lemma4_verify(19, 5, 3, 7, 1, 1, 12);
    CHECK(rep.premise_errors.size() == 2);
}

TEST_CASE("close-solution check accepts a prime value of Phi with m = 0") {
    // Phi_19(x) prime for some small x gives p^0 * q with q = Phi_19(x).
    std::vector<Int> xs;
    for (long x = 2; x < 200 && xs.size() < 2; ++x)
        if (is_probable_prime(phi_eval(19, x))) xs.push_back(x);
    REQUIRE(xs.size() == 2);
    const auto rep = lemma4_verify(19, xs[0], xs[1], 3, 0, 0, phi_eval(19, xs[0]));
    // the second value is a different prime, so the shape check fails on x2 only
    REQUIRE(rep.premise_errors.size() == 1);
    CHECK(rep.premise_errors[0].rfind("x2:", 0) == 0);
}

TEST_CASE("count lower bound identity") {
    for (unsigned l : primes_between(19, 997)) {
        CAPTURE(l);
        const long k = static_cast<long>(gap_exponent(l));
        CHECK(lemma4_count_lower_bound(l) == 3 * static_cast<long>(l + 1) / 2 - 3 * k);
        CHECK(lemma4_count_lower_bound(l) >= static_cast<long>(l) + 1);
        const auto pr = lemma4_power_residues(l, 2, 3, 1000003);
        CHECK(pr.pairs == static_cast<unsigned long>(lemma4_count_lower_bound(l)));
    }
    CHECK(lemma4_count_lower_bound(19) == 21);
}

TEST_CASE("close independent pairs give distinct residues") {
    // x1^f1 x2^f2 <= x1^((l-1)/2) < q, so the residues are distinct integers below q.
    std::mt19937_64 rng(19);
    for (unsigned l : {19u, 23u, 29u}) {
        const unsigned long k = gap_exponent(l);
        int tried = 0;
        while (tried < 40) {
            const Int x1 = Int(static_cast<unsigned long>(rng() % 40 + 2));
            const Int top = pow(x1, k);
            Int x2 = x1 + 1 + Int(static_cast<unsigned long>(rng() % 1000)) % (top - x1);
            if (x2 > top) x2 = top;
            if (multiplicative_dependence(x1, x2)) continue;
            ++tried;
            Int q = pow(x1, (l - 1) / 2) + 1;
            q += (Int(l) - q % l + 1) % l;
            while (!is_probable_prime(q)) q += l;
            REQUIRE(q % l == 1);
            const auto pr = lemma4_power_residues(l, x1, x2, q);
            CAPTURE(l);
            CAPTURE(x1);
            CAPTURE(x2);
            CHECK(pr.distinct == pr.pairs);
            CHECK(pr.distinct >= l + 1);
        }
    }
}

TEST_CASE("three-solution gap conclusion") {
    const auto rep = lemma5_verify(19, {{2, 0}, {3, 0}}, 3, 5);
    CHECK_FALSE(rep.premises_ok());
    CHECK_THROWS_AS(make_gap_witness(19, {{2, 0}, {3, 0}, {5, 0}}, 3, 5), DomainError);
    // |R| = pi for l = 19; 0.397 * pi * 28 = 34.92...
    CHECK(lemma5_conclusion(19, 28, 35));
    CHECK_FALSE(lemma5_conclusion(19, 28, 34));
    CHECK_THROWS_AS(lemma5_conclusion(17, 28, 35), DomainError);
    CHECK(lemma5_constant() == Rational(397, 1000));
}

TEST_CASE("branch constants of the three-solution gap") {
    const auto c19 = lemma5_branch_constant(19);
    CHECK(c19.lhs == Rational(81, 20));  // 4.05 > 3.8
    CHECK(c19.holds);
    const auto c29 = lemma5_branch_constant(29);
    CHECK(c29.lhs == Rational(729, 20));
    CHECK(c29.holds);
    for (unsigned l : primes_between(19, 97)) {
        CAPTURE(l);
        CHECK(lemma5_branch_constant(l).holds);
    }
}

TEST_CASE("bound chain for l = 19") {
    const auto r = bound_chain(19);
    CHECK(r.p_min == 191);
    CHECK(*r.bound("q2").exact == 29);
    CHECK(*r.bound("q3").exact == 24391);
    CHECK(r.bound("log q5").value.lo() > 8876);
    CHECK(r.bound("log q5").value.hi() < 8877);
    CHECK(r.bound("log q5 (p >= 2l+1)").informational);
    CHECK(r.bound("log q5 (p >= 2l+1)").value.hi() < 6238);
    CHECK(r.check("log q5 > 6238").certified);
    CHECK(r.check("loglog q7 > 6000").certified);
    CHECK(r.check("(log q7)/log 2 > 4^(l^2)").certified);
    CHECK(r.bound("loglog q7").scale == Scale::loglog);
    CHECK(r.exceeds_classical);
    CHECK_THROWS_AS(r.bound("q4"), DomainError);
}

TEST_CASE("bound chain for 23 <= l <= 53") {
    for (unsigned l : primes_between(23, 53)) {
        CAPTURE(l);
        const auto r = bound_chain(l);
        CHECK(r.check("log q5 > 3040000").certified);
        CHECK(r.all_checks_pass());
        CHECK(r.bound("log q5").value.lo() >= 3040000);
    }
    CHECK(bound_chain(23).bound("log q5").value.lo() > Rational(10358758));
}

TEST_CASE("bound chain for l >= 59") {
    const auto r = bound_chain(59);
    CHECK(r.p_min == 709);
    CHECK(r.bound("log q3").informational);
    CHECK(r.bound("log q4").value.lo() > 8334);
    CHECK(r.check("(log q6)/log 2 > 4^(l^2)").certified);
    CHECK_THROWS_AS(r.bound("q3"), DomainError);
}

TEST_CASE("solution-count verdicts") {
    CHECK(lemma0_verdict(19) == 6);
    CHECK(lemma0_verdict(53) == 6);
    CHECK(lemma0_verdict(59) == 5);
    CHECK(lemma0_verdict(61) == 5);
    CHECK_THROWS_AS(lemma0_verdict(17), DomainError);
    CHECK_THROWS_AS(lemma0_verdict(21), DomainError);
}

TEST_CASE("scales never mix") {
    const NamedBound b{"log q5", Scale::log, RationalInterval::point(Rational(10)), std::nullopt, false};
    CHECK_THROWS_AS(compare_in_scale(b, Scale::loglog, RationalInterval::point(Rational(1)), "x"), DomainError);
    const auto c = compare_in_scale(b, Scale::log, RationalInterval::point(Rational(9)), "x");
    REQUIRE(c);
    CHECK(c->certified);
    CHECK_FALSE(compare_in_scale(b, Scale::log, RationalInterval(Rational(9), Rational(11)), "x").has_value());
    const auto up = raise_scale(b, "loglog q5", 64);
    CHECK(up.scale == Scale::loglog);
    CHECK_THROWS_AS(raise_scale(up, "no", 64), DomainError);
}

TEST_CASE("monotone parts of the chain over 59..499") {
    // k, q2 and the l^2 log 4 threshold grow with l, and every l clears it. log q4 itself
    // is not monotone: |R| and p_min jump around (e.g. it drops from 97 to 101).
    Int prev_q2 = 0;
    unsigned long prev_k = 0;
    Rational prev_thr = 0;
    for (unsigned l : primes_between(59, 499)) {
        CAPTURE(l);
        const auto r = bound_chain(l);
        const auto& chk = r.check("(log q6)/log 2 > 4^(l^2)");
        CHECK(chk.certified);
        CHECK(gap_exponent(l) >= prev_k);
        CHECK(*r.bound("q2").exact >= prev_q2);
        CHECK(chk.threshold.lo() > prev_thr);
        prev_k = gap_exponent(l);
        prev_q2 = *r.bound("q2").exact;
        prev_thr = chk.threshold.lo();
    }
    const auto a = bound_chain(97).bound("log q4").value, b = bound_chain(101).bound("log q4").value;
    CHECK(a.lo() > b.hi());
    CHECK(a.lo() > 9898000);
    CHECK(b.hi() < 9851000);
}
