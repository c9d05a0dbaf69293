#include <doctest.h>

#include <algorithm>
#include <random>

#include "opn/arith.hpp"
#include "opn/errors.hpp"
#include "opn/opn.hpp"

using namespace opn;

namespace {

std::vector<Int> odd_primes_below(unsigned long n) {
    std::vector<Int> out;
    for (unsigned long k = 3; k < n; k += 2)
        if (is_probable_prime(Int(k))) out.push_back(Int(k));
    return out;
}

unsigned long val(Int n, const Int& p) {
    unsigned long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

}  // namespace

TEST_CASE("Euler form invariants") {
    CHECK_NOTHROW(make_euler_form(5, 1, {3, 11}, 1));
    CHECK_THROWS_AS(make_euler_form(7, 1, {3}, 1), DomainError);
    CHECK_THROWS_AS(make_euler_form(5, 3, {3}, 1), DomainError);
    CHECK_THROWS_AS(make_euler_form(5, 1, {3, 3}, 1), DomainError);
    CHECK_THROWS_AS(make_euler_form(5, 1, {5}, 1), DomainError);
    CHECK_THROWS_AS(make_euler_form(5, 1, {9}, 1), DomainError);
    const auto errs = euler_form_errors(EulerFormNumber{7, 3, {4, 9}, 1});
    CHECK(errs.size() == 4);
    const auto f = make_euler_form(5, 1, {3, 11}, 1);
    CHECK(f.value() == 5 * 9 * 121);
    CHECK(f.r() == 2);
    CHECK(f.omega() == 3);
    CHECK_FALSE(f.meets_beta_gate());
    CHECK(make_euler_form(13, 5, {19}, 9).meets_beta_gate());
    CHECK(f.factorization() == Factorization{{3, 2}, {5, 1}, {11, 2}});
}

TEST_CASE("choice of l") {
    auto c = choose_l(make_euler_form(5, 1, {3, 11}, 1));
    REQUIRE(c);
    CHECK(c->l == 3);
    CHECK(c->i0 == 0);
    c = choose_l(make_euler_form(13, 1, {3, 7, 19}, 9));
    REQUIRE(c);
    CHECK(c->l == 19);
    CHECK(c->i0 == 2);
    c = choose_l(make_euler_form(13, 1, {7, 5}, 7));
    REQUIRE(c);
    CHECK(c->l == 5);
    CHECK(c->i0 == 1);
    c = choose_l(make_euler_form(13, 1, {3, 5}, 7));
    CHECK(c->l == 5);
    CHECK_FALSE(choose_l(make_euler_form(13, 1, {7, 11}, 7)).has_value());
}

TEST_CASE("partition of 5 * 3^2 * 11^2") {
    const auto form = make_euler_form(5, 1, {3, 11}, 1);
    const auto res = partition_STU(form, 3, 0);
    CHECK(res.S.empty());
    CHECK(res.T.empty());
    CHECK(res.U == std::vector<std::size_t>{1});
    CHECK(res.gamma == 1);
    CHECK(res.s == 1);
    CHECK_FALSE(res.composite_r_bound.has_value());
    CHECK(res.structure_errors(2).empty());
    CHECK(t_bound_check(res, 1).pass());
    CHECK_THROWS_AS(partition_STU(form, 3, 1), DomainError);
}

TEST_CASE("composite 2 beta + 1") {
    // beta = 7, 2beta+1 = 15, l = 5. sigma(q^14) = Phi_3(q) Phi_5(q) Phi_15(q).
    // Phi_5(7) = 2801, Phi_5(13) = 30941, 31 | Phi_15(7).
    const auto form = make_euler_form(17, 1, {5, 7, 13, 31, 2801, 30941}, 7);
    const auto c = choose_l(form);
    REQUIRE(c);
    CHECK(c->l == 5);
    const auto res = partition_STU(form, c->l, c->i0);
    CHECK(res.structure_errors(form.r()).empty());
    CHECK(res.S == std::vector<std::size_t>{3, 4, 5});
    CHECK(res.T == std::vector<std::size_t>{1, 2});
    CHECK(res.U.empty());
    CHECK(res.f.at(1) == 2);
    CHECK(res.f.at(2) == 1);
    CHECK(res.delta == 1);
    CHECK(res.s == 2);
    CHECK(res.gamma == 1);
    CHECK(*res.composite_r_bound == 42);
    const auto tb = t_bound_check(res, 7);
    CHECK(tb.pass());
    CHECK(tb.delta_bound);
    CHECK(tb.sum_f == 3);
    for (unsigned long qi : {7ul, 13ul})
        for (unsigned long d : {3ul, 5ul, 15ul}) {
            const auto P = zsigmondy_primitive_factor(Int(qi), d);
            REQUIRE(P);
            CHECK(*P % d == 1);
            CHECK(sigma_pp(Int(qi), 14) % *P == 0);
        }
    CHECK(*zsigmondy_primitive_factor(7, 15) == 31);
    CHECK(*zsigmondy_primitive_factor(7, 5) == 2801);
}

TEST_CASE("order criterion agrees with exact sigma for large exponents") {
    // 2*beta*log2(q) above kExactSigmaBits forces the order path.
    const unsigned long beta = 20004;
    const auto form = make_euler_form(13, 1, {3, 7, 40009}, beta);
    const auto res = partition_STU(form, 40009, 2);
    CHECK(res.structure_errors(3).empty());
    for (auto i : res.T) {
        bool hit = false;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != i) hit = hit || lemma1_divides(form.q[j], form.q[i], 2 * beta);
        CHECK(hit);
    }
    // 7 = 1 (mod 3): 3 | sigma(7^c) iff 3 | c + 1
    CHECK_FALSE(lemma1_divides(3, 7, 2 * beta));
    CHECK(lemma1_divides(3, 7, 2 * beta + 2));
}

TEST_CASE("random synthetic forms partition completely") {
    std::mt19937_64 rng(2024);
    const auto pool = odd_primes_below(400);
    const std::vector<unsigned long> betas{1, 2, 3, 4, 6, 7, 9, 12};
    for (int it = 0; it < 1000; ++it) {
        const unsigned long beta = betas[rng() % betas.size()];
        const auto fb = factorize(Int(2 * beta + 1));
        std::vector<Int> q{fb.back().prime};
        const std::size_t r = 2 + rng() % 7;
        while (q.size() < r) {
            const Int c = pool[rng() % pool.size()];
            if (c != 17 && std::find(q.begin(), q.end(), c) == q.end()) q.push_back(c);
        }
        std::shuffle(q.begin(), q.end(), rng);
        const auto form = make_euler_form(17, 1, q, beta);
        const auto lc = choose_l(form);
        REQUIRE(lc);
        CHECK(lc->l == fb.back().prime);
        const auto res = partition_STU(form, lc->l, lc->i0);
        CHECK(res.structure_errors(form.r()).empty());
        CHECK(res.S.size() + res.T.size() + res.U.size() + 1 == form.r());
        // f against a direct factorization of sigma
        unsigned long delta = 0;
        for (auto i : res.T) {
            const Int sig = sigma_pp(form.q[i], 2 * beta);
            unsigned long f = 0;
            for (auto j : res.S) f += val(sig, form.q[j]);
            CHECK(res.f.at(i) == f);
            delta += f == 1;
            bool hit = false;
            for (std::size_t j = 0; j < form.r(); ++j) hit = hit || (j != i && sig % form.q[j] == 0);
            CHECK(hit);
        }
        for (auto i : res.U)
            for (std::size_t j = 0; j < form.r(); ++j)
                if (j != i) CHECK(sigma_pp(form.q[i], 2 * beta) % form.q[j] != 0);
        for (auto i : res.S) CHECK(form.q[i] % lc->l == 1);
        CHECK(res.delta == delta);
        const auto tb = t_bound_check(res, beta);
        if (res.f_zero.empty()) CHECK(tb.chain_low);
        CHECK(tb.chain_top == (res.S.size() <= 2 * beta));
    }
}

TEST_CASE("r and N bounds") {
    CHECK(r_bound(9) == 236);
    CHECK(r_bound(10) == 282);
    CHECK(r_bound(29, RVariant::seven) == 1887);
    CHECK(r_bound(12, RVariant::seven) == 374);
    CHECK_THROWS_AS(r_bound(9, RVariant::seven), DomainError);
    CHECK_THROWS_AS(r_bound(0), DomainError);
    CHECK(classical_r_bound(9) == 344);
    CHECK(n_bound_exponents(9).improved == 237);
    CHECK(n_bound_exponents(9).classical == 345);
    CHECK(n_bound_exponents(1).improved == 13);
    CHECK(n_bound_exponents(1).classical == 9);
    CHECK(n_bound_loglog2(237) == 474);
}

TEST_CASE("bounds are consistent for beta <= 1000") {
    for (unsigned long b = 1; b <= 1000; ++b) {
        const auto e = n_bound_exponents(b);
        CHECK(e.improved == r_bound(b) + 1);
        CHECK(e.classical == classical_r_bound(b) + 1);
        if (b >= 4) {
            CHECK(r_bound(b) < classical_r_bound(b));
            CHECK(n_bound_loglog2(e.improved) < n_bound_loglog2(e.classical));
        }
        if (!is_probable_prime(Int(2 * b + 1)) || b >= 29) CHECK(r_bound(b, RVariant::seven) == r_bound(b) - b);
    }
}

TEST_CASE("abundancy") {
    CHECK(abundancy_is_two(Int(28)));
    CHECK(abundancy_is_two(Int(6)));
    CHECK(abundancy_is_two(Int(8128)));
    CHECK_FALSE(abundancy_is_two(Int(12)));
    CHECK_FALSE(abundancy_is_two(Int(1)));
    CHECK(abundancy_is_two(Factorization{{2, 12}, {8191, 1}}));
    CHECK_THROWS_AS(abundancy_is_two(Int("1000000000001", 10)), ResourceError);
    CHECK_THROWS_AS(abundancy_is_two(Factorization{{4, 1}}), DomainError);
    CHECK(sigma(Factorization{{2, 2}, {7, 1}}) == 56);
}
