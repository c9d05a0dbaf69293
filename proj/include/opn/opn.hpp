#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opn/arith.hpp"
#include "opn/interval.hpp"

namespace opn {

// N = p^alpha * prod q_i^{2 beta}. Indices into q are 0-based throughout.
struct EulerFormNumber {
    Int p;
    unsigned long alpha = 1;
    std::vector<Int> q;
    unsigned long beta = 1;

    std::size_t r() const { return q.size(); }
    std::size_t omega() const { return q.size() + 1; }
    Factorization factorization() const;  // sorted by prime
    Int value() const;
    // Prior work settles beta < 9; the reduction assumes beta >= 9 but never enforces it.
    bool meets_beta_gate() const { return beta >= 9; }
};

std::vector<std::string> euler_form_errors(const EulerFormNumber& form);
// Throws DomainError listing every violated invariant.
EulerFormNumber make_euler_form(Int p, unsigned long alpha, std::vector<Int> q, unsigned long beta);

struct LChoice {
    Int l;
    std::size_t i0 = 0;
};

// Largest prime factor of 2*beta+1 that occurs among the q_i.
std::optional<LChoice> choose_l(const EulerFormNumber& form);

struct PartitionResult {
    Int l;
    std::size_t i0 = 0;
    std::vector<std::size_t> S, T, U;
    std::map<std::size_t, unsigned long> f;  // on T
    unsigned long delta = 0;                 // #{i in T : f(i) = 1}
    unsigned long gamma = 0;                 // l-adic valuation of 2*beta+1
    unsigned long s = 0;                     // distinct prime factors of 2*beta+1
    // 2*beta*#S / (2^{s-1} - 1), when s > 1.
    std::optional<Rational> composite_r_bound;
    // T indices with f(i) = 0. Impossible for a perfect N, possible for synthetic input.
    std::vector<std::size_t> f_zero;

    std::vector<std::string> structure_errors(std::size_t r) const;
};

// Decides q_j | sigma(q_i^{2beta}) exactly when sigma has at most this many bits,
// by the order criterion otherwise.
inline constexpr unsigned long kExactSigmaBits = 1 << 16;

PartitionResult partition_STU(const EulerFormNumber& form, const Int& l, std::size_t i0,
                              const FactorBudget& budget = {});

struct TBoundCheck {
    unsigned long t = 0, s = 0, delta = 0, sum_f = 0, beta = 0;
    bool t_bound = false;      // #T <= 2 beta^2 + delta/2
    bool chain_low = false;    // 2#T - delta <= sum f
    bool chain_mid = false;    // sum f <= 2 beta #S
    bool chain_top = false;    // 2 beta #S <= 4 beta^2
    bool delta_bound = false;  // delta <= 2#S
    bool pass() const { return t_bound && chain_low && chain_mid && chain_top; }
    std::string detail() const;
};

TBoundCheck t_bound_check(const PartitionResult& res, unsigned long beta);

enum class RVariant { standard, seven };

Int r_bound(unsigned long beta, RVariant variant = RVariant::standard);
Int classical_r_bound(unsigned long beta);

struct NBoundExponents {
    Int improved;   // 2 beta^2 + 8 beta + 3
    Int classical;  // 4 beta^2 + 2 beta + 3
};

// Inner exponents e of N < 2^{4^e}.
NBoundExponents n_bound_exponents(unsigned long beta);

// log2 log2 of 2^{4^e}, i.e. e * log2(4) = 2e. Comparisons of N bounds happen here.
Int n_bound_loglog2(const Int& exponent);

Int sigma(const Factorization& f);
inline constexpr unsigned long long kAbundancyFactorLimit = 1'000'000'000'000ULL;
bool abundancy_is_two(const Factorization& f);
// Factors n itself; ResourceError above kAbundancyFactorLimit.
bool abundancy_is_two(const Int& n);

}  // namespace opn
