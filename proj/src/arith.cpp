#include "opn/arith.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "opn/cyclotomic.hpp"
#include "opn/errors.hpp"

namespace opn {

namespace {

const Int kTwoTo64 = Int(1) << 64;

constexpr std::array<unsigned, 12> kMrBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool strong_probable_prime(const Int& n, const Int& base, const Int& d, unsigned long s) {
    Int x;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    const Int n_minus_1 = n - 1;
    if (x == 1 || x == n_minus_1) return true;
    for (unsigned long r = 1; r < s; ++r) {
        x = (x * x) % n;
        if (x == n_minus_1) return true;
        if (x == 1) return false;
    }
    return false;
}

bool miller_rabin_deterministic(const Int& n) {
    Int d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    for (unsigned b : kMrBases) {
        if (n == b) return true;
        if (!strong_probable_prime(n, Int(b), d, s)) return false;
    }
    return true;
}

struct Budget {
    std::uint64_t rho_left;
};

// Brent's variant of Pollard rho. Returns a nontrivial factor or 0 when the budget runs out.
Int rho_factor(const Int& n, Budget& budget) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    for (unsigned long c = 1; budget.rho_left > 0; ++c) {
        Int y = 2, x, ys, q = 1, g = 1;
        unsigned long r = 1;
        const unsigned long m = 128;
        while (g == 1 && budget.rho_left > 0) {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
            unsigned long k = 0;
            while (k < r && g == 1) {
                ys = y;
                const unsigned long steps = std::min(m, r - k);
                for (unsigned long i = 0; i < steps; ++i) {
                    y = (y * y + c) % n;
                    q = (q * abs(x - y)) % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += steps;
                budget.rho_left = budget.rho_left > steps ? budget.rho_left - steps : 0;
                if (budget.rho_left == 0) break;
            }
            r *= 2;
        }
        if (g == n) {
            // Backtrack one step at a time from the last saved point.
            do {
                ys = (ys * ys + c) % n;
                Int diff = abs(x - ys);
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != 1 && g != n) return g;
    }
    return 0;
}

void add_factor(std::map<Int, unsigned long>& acc, const Int& p, unsigned long e) {
    acc[p] += e;
}

Factorization to_factorization(const std::map<Int, unsigned long>& acc) {
    Factorization out;
    out.reserve(acc.size());
    for (const auto& [p, e] : acc) out.push_back({p, e});
    return out;
}

// Pocklington-Lehmer with recursion into the factored part of n-1.
bool pocklington(const Int& n, const FactorBudget& budget, int depth) {
    if (n < kTwoTo64) return primality(n) == Primality::prime;
    if (depth > 8 || primality(n) == Primality::composite) return false;

    const Int n_minus_1 = n - 1;
    PartialFactorization pf = factor_partial(n_minus_1, budget);

    Int f = 1;
    std::vector<Int> used;
    for (const auto& [p, e] : pf.factors) {
        if (!pocklington(p, budget, depth + 1)) continue;
        Int pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
        f *= pe;
        used.push_back(p);
    }
    if (f * f <= n) return false;

    for (const Int& q : used) {
        const Int exp_q = n_minus_1 / q;
        bool witnessed = false;
        for (unsigned a = 2; a < 200 && !witnessed; ++a) {
            Int t;
            mpz_powm(t.get_mpz_t(), Int(a).get_mpz_t(), n_minus_1.get_mpz_t(), n.get_mpz_t());
            if (t != 1) return false;  // Fermat witness: composite
            mpz_powm(t.get_mpz_t(), Int(a).get_mpz_t(), exp_q.get_mpz_t(), n.get_mpz_t());
            Int g;
            t -= 1;
            mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
            witnessed = (g == 1);
        }
        if (!witnessed) return false;
    }
    return true;
}

// v_q(p^d - 1), working modulo growing powers of q instead of forming p^d.
unsigned long pow_minus_one_valuation(const Int& p, const Int& d, const Int& q) {
    for (unsigned long k = 4;; k *= 2) {
        Int qk;
        mpz_pow_ui(qk.get_mpz_t(), q.get_mpz_t(), k);
        Int r;
        mpz_powm(r.get_mpz_t(), p.get_mpz_t(), d.get_mpz_t(), qk.get_mpz_t());
        r -= 1;
        if (r < 0) r += qk;
        if (r == 0) continue;
        unsigned long v = 0;
        while (mpz_divisible_p(r.get_mpz_t(), q.get_mpz_t())) {
            r /= q;
            ++v;
        }
        return v;
    }
}

}  // namespace

Int pow(const Int& base, unsigned long exp) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

unsigned long to_ulong_checked(const Int& v, const char* what) {
    if (v < 0 || !v.fits_ulong_p()) throw DomainError(std::string(what) + " out of machine range");
    return v.get_ui();
}

Primality primality(const Int& n) {
    if (n < 2) return Primality::composite;
    for (unsigned b : kMrBases) {
        if (n == b) return Primality::prime;
        if (mpz_divisible_ui_p(n.get_mpz_t(), b)) return Primality::composite;
    }
    if (n < kTwoTo64) return miller_rabin_deterministic(n) ? Primality::prime : Primality::composite;
    return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0 ? Primality::probable_prime
                                                      : Primality::composite;
}

bool is_probable_prime(const Int& n) { return primality(n) != Primality::composite; }

bool is_certified_prime(const Int& n, const FactorBudget& budget) {
    return pocklington(n, budget, 0);
}

PartialFactorization factor_partial(const Int& n_in, const FactorBudget& budget) {
    if (n_in <= 0) throw DomainError("factorization of a non-positive integer");
    std::map<Int, unsigned long> acc;
    Int n = n_in;

    unsigned long twos = mpz_scan1(n.get_mpz_t(), 0);
    if (twos > 0) {
        add_factor(acc, 2, twos);
        mpz_tdiv_q_2exp(n.get_mpz_t(), n.get_mpz_t(), twos);
    }
    for (unsigned long d = 3; d <= budget.trial_limit && n > 1; d += 2) {
        if (Int(d) * d > n) break;
        unsigned long e = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
            ++e;
        }
        if (e > 0) add_factor(acc, d, e);
    }

    PartialFactorization out;
    Budget b{budget.rho_iterations};
    std::vector<std::pair<Int, unsigned long>> work;
    if (n > 1) work.emplace_back(n, 1);
    while (!work.empty()) {
        auto [m, mult] = work.back();
        work.pop_back();
        if (m == 1) continue;
        if (Int(budget.trial_limit) * budget.trial_limit >= m || is_probable_prime(m)) {
            // Below trial_limit^2 with no factor up to trial_limit means prime.
            add_factor(acc, m, mult);
            continue;
        }
        if (mpz_perfect_power_p(m.get_mpz_t())) {
            PerfectPower pp = perfect_power_decompose(m);
            work.emplace_back(pp.base, mult * pp.exponent);
            continue;
        }
        Int d = rho_factor(m, b);
        if (d == 0) {
            for (unsigned long i = 0; i < mult; ++i) out.unfactored.push_back(m);
            continue;
        }
        work.emplace_back(d, mult);
        work.emplace_back(m / d, mult);
    }
    out.factors = to_factorization(acc);
    std::sort(out.unfactored.begin(), out.unfactored.end());
    return out;
}

Factorization factorize(const Int& n, const FactorBudget& budget) {
    PartialFactorization pf = factor_partial(n, budget);
    if (!pf.complete()) {
        throw ResourceError("factorization budget exhausted; unfactored cofactor " +
                            pf.unfactored.front().get_str());
    }
    return pf.factors;
}

PrimePower::PrimePower(Int prime, unsigned long exponent) : p(std::move(prime)), a(exponent) {
    if (p == 2 || !is_probable_prime(p)) throw DomainError("PrimePower needs an odd prime, got " + p.get_str());
}

Int PrimePower::value() const { return pow(p, a); }

Int sigma_pp(const Int& p, unsigned long a) {
    if (!is_probable_prime(p)) throw DomainError("sigma_pp: " + p.get_str() + " is not prime");
    return (pow(p, a + 1) - 1) / (p - 1);
}

Int mult_order(const Int& a_in, const Int& m, const FactorBudget& budget) {
    if (m < 2) throw DomainError("mult_order: modulus must be at least 2");
    Int a = a_in % m;
    if (a < 0) a += m;
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    if (g != 1) throw DomainError("mult_order: gcd(" + a_in.get_str() + ", " + m.get_str() + ") > 1");

    // phi(m) and its factorization, assembled from the factorization of m.
    std::map<Int, unsigned long> phi_factors;
    Int phi = 1;
    for (const auto& [p, e] : factorize(m, budget)) {
        phi *= pow(p, e - 1) * (p - 1);
        if (e > 1) phi_factors[p] += e - 1;
        for (const auto& [r, f] : factorize(p - 1, budget)) phi_factors[r] += f;
    }

    Int order = phi;
    for (const auto& [r, f] : phi_factors) {
        for (unsigned long i = 0; i < f; ++i) {
            Int candidate = order / r;
            Int t;
            mpz_powm(t.get_mpz_t(), a.get_mpz_t(), candidate.get_mpz_t(), m.get_mpz_t());
            if (t != 1) break;
            order = candidate;
        }
    }
    return order;
}

bool lemma1_divides(const Int& q, const Int& p, unsigned long c, const FactorBudget& budget) {
    if (q == p) throw DomainError("lemma1_divides: p and q must be distinct");
    if (q == 2) throw DomainError("lemma1_divides: q must be odd");
    if (!is_probable_prime(q) || !is_probable_prime(p)) throw DomainError("lemma1_divides: p and q must be prime");
    const Int c1 = Int(c) + 1;
    if (p % q == 1) return mpz_divisible_p(c1.get_mpz_t(), q.get_mpz_t()) != 0;
    const Int ord = mult_order(p, q, budget);
    return ord > 1 && mpz_divisible_p(c1.get_mpz_t(), ord.get_mpz_t()) != 0;
}

unsigned long sigma_pp_valuation(const Int& q, const Int& p, unsigned long c, const FactorBudget& budget) {
    if (!lemma1_divides(q, p, c, budget)) return 0;
    auto vq = [&q](Int v) {
        unsigned long k = 0;
        while (v != 0 && mpz_divisible_p(v.get_mpz_t(), q.get_mpz_t())) {
            v /= q;
            ++k;
        }
        return k;
    };
    const Int c1 = Int(c) + 1;
    if (p % q == 1) return vq(c1);
    // v_q((p^{c+1}-1)/(p-1)) = v_q(p^d - 1) + v_q((c+1)/d) with d the order of p mod q.
    const Int d = mult_order(p, q, budget);
    return pow_minus_one_valuation(p, d, q) + vq(c1 / d);
}

std::optional<Int> zsigmondy_primitive_factor(const Int& a, unsigned long n, const FactorBudget& budget) {
    if (a < 2) throw DomainError("zsigmondy_primitive_factor: a must be at least 2");
    if (n < 1) throw DomainError("zsigmondy_primitive_factor: n must be at least 1");
    // Non-primitive prime factors of Phi_n(a) divide n; primitive ones are 1 mod n.
    Int c = phi_eval(n, a);
    for (const auto& [r, e] : factorize(Int(n), budget)) {
        (void)e;
        while (c != 0 && mpz_divisible_p(c.get_mpz_t(), r.get_mpz_t())) c /= r;
    }
    if (c <= 1) return std::nullopt;
    return factorize(c, budget).front().prime;
}

Int next_prime_above(const Int& x) {
    if (x < 2) return 2;
    Int n = x + 1;
    if (n > 2 && mpz_even_p(n.get_mpz_t())) ++n;
    while (!is_probable_prime(n)) n += 2;
    return n;
}

Int least_prime_1_mod(const Int& m) {
    if (m < 1) throw DomainError("least_prime_1_mod: modulus must be positive");
    Int n = m + 1;
    while (!is_probable_prime(n)) n += m;
    return n;
}

PerfectPower perfect_power_decompose(const Int& x) {
    if (x < 2) throw DomainError("perfect_power_decompose: argument must exceed 1");
    const unsigned long bits = mpz_sizeinbase(x.get_mpz_t(), 2);
    for (unsigned long e = bits; e >= 2; --e) {
        Int r;
        if (mpz_root(r.get_mpz_t(), x.get_mpz_t(), e) != 0) {
            // The largest exponent gives a base that is not a perfect power.
            return {r, e};
        }
    }
    return {x, 1};
}

std::optional<Dependence> multiplicative_dependence(const Int& x1, const Int& x2) {
    if (x1 < 2 || x2 < 2) throw DomainError("multiplicative_dependence: arguments must exceed 1");
    PerfectPower a = perfect_power_decompose(x1);
    PerfectPower b = perfect_power_decompose(x2);
    if (a.base != b.base) return std::nullopt;
    return Dependence{a.base, a.exponent, b.exponent};
}

Int sqrt_mod_prime(const Int& a_in, const Int& p) {
    Int a = a_in % p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    if (mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) != 1) throw DomainError("sqrt_mod_prime: not a residue");
    Int q = p - 1;
    unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
    Int z = 2;
    while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;

    Int c, r, t;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    Int qp1 = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), qp1.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    unsigned long m = s;
    while (t != 1) {
        unsigned long i = 0;
        Int tt = t;
        while (tt != 1) {
            tt = (tt * tt) % p;
            ++i;
        }
        Int b = c;
        for (unsigned long j = 0; j + i + 1 < m; ++j) b = (b * b) % p;
        r = (r * b) % p;
        c = (b * b) % p;
        t = (t * c) % p;
        m = i;
    }
    return r;
}

}  // namespace opn
