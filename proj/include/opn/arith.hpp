#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace opn {

using Int = mpz_class;

// Work limits for factoring. Exhausting any of them raises ResourceError.
struct FactorBudget {
    unsigned long trial_limit = 1ul << 16;
    std::uint64_t rho_iterations = 4'000'000;
};

enum class Primality { composite, probable_prime, prime };

// Deterministic below 2^64 (Miller-Rabin on the first twelve prime bases);
// above that a BPSW-style test that only ever answers composite or probable_prime.
Primality primality(const Int& n);
bool is_probable_prime(const Int& n);

// Tries to upgrade a probable prime to a proven one with a Pocklington-Lehmer
// certificate built from a budgeted factorization of n-1.
bool is_certified_prime(const Int& n, const FactorBudget& budget = {});

struct PrimeFactor {
    Int prime;
    unsigned long exponent = 0;
    bool operator==(const PrimeFactor&) const = default;
};
using Factorization = std::vector<PrimeFactor>;  // sorted by prime

struct PartialFactorization {
    Factorization factors;
    std::vector<Int> unfactored;  // composite leftovers when the budget ran out
    bool complete() const { return unfactored.empty(); }
};

PartialFactorization factor_partial(const Int& n, const FactorBudget& budget = {});
Factorization factorize(const Int& n, const FactorBudget& budget = {});

// p^a with p an odd prime.
struct PrimePower {
    Int p;
    unsigned long a = 0;

    PrimePower(Int prime, unsigned long exponent);
    Int value() const;
};

// (p^{a+1}-1)/(p-1).
Int sigma_pp(const Int& p, unsigned long a);

Int mult_order(const Int& a, const Int& m, const FactorBudget& budget = {});

// Whether q | sigma(p^c), decided from the order of p modulo q without forming sigma.
// Note the direction: it is the order of p mod q that must divide c+1. The reading
// "order of q mod p" disagrees with direct computation (e.g. q=3, p=7, c=2).
bool lemma1_divides(const Int& q, const Int& p, unsigned long c, const FactorBudget& budget = {});

// Exact q-adic valuation of sigma(p^c) by lifting the exponent; q odd prime, q != p.
unsigned long sigma_pp_valuation(const Int& q, const Int& p, unsigned long c,
                                 const FactorBudget& budget = {});

// Smallest prime factor of Phi_n(a) that divides no a^m - 1 with m < n, if any.
std::optional<Int> zsigmondy_primitive_factor(const Int& a, unsigned long n,
                                              const FactorBudget& budget = {});

// Least (probable) prime strictly greater than x. Every skipped candidate is
// proven composite, so the result is always a valid lower bound for the next prime.
Int next_prime_above(const Int& x);

// Least prime congruent to 1 modulo m.
Int least_prime_1_mod(const Int& m);

struct PerfectPower {
    Int base;  // not itself a perfect power
    unsigned long exponent = 1;
};
PerfectPower perfect_power_decompose(const Int& x);

struct Dependence {
    Int base;
    unsigned long a = 0;
    unsigned long b = 0;
    bool operator==(const Dependence&) const = default;
};
// Maximal common base g with x1 = g^a, x2 = g^b, or nullopt when independent.
std::optional<Dependence> multiplicative_dependence(const Int& x1, const Int& x2);

// Tonelli-Shanks; p odd prime and a a quadratic residue mod p.
Int sqrt_mod_prime(const Int& a, const Int& p);

Int pow(const Int& base, unsigned long exp);
unsigned long to_ulong_checked(const Int& v, const char* what);

}  // namespace opn
