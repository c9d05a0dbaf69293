#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opn/arith.hpp"
#include "opn/interval.hpp"

namespace opn {

// Number of X in [1, M) with X^l = 1 (mod M). Brute force up to kRootCountBruteLimit,
// otherwise the product of gcd(l, order) over the cyclic factors of (Z/MZ)^*.
inline constexpr unsigned long kRootCountBruteLimit = 10'000'000;
Int root_count_mod(unsigned long l, const Int& M, const FactorBudget& budget = {});
Int root_count_formula(unsigned long l, const Int& M, const FactorBudget& budget = {});

// 3(l+1)/2 - 3*floor((l+1)/6): distinct l-th roots of unity forced by two close solutions.
long lemma4_count_lower_bound(unsigned l);

struct PowerResidueCount {
    unsigned long pairs = 0;     // exponent pairs (f1, f2) enumerated
    unsigned long distinct = 0;  // distinct residues x1^f1 x2^f2 mod modulus
    bool all_roots = false;      // every residue satisfies X^l = 1 (mod modulus)
};

// Enumerates x1^f1 x2^f2 for f2 = 0, 1, 2 and 0 <= f1 <= (l-1)/2 - f2*floor((l+1)/6).
PowerResidueCount lemma4_power_residues(unsigned l, const Int& x1, const Int& x2, const Int& modulus);

struct Lemma4Report {
    std::vector<std::string> premise_errors;
    Int threshold;            // x1^floor((l+1)/6)
    bool conclusion = false;  // x2 > threshold
    Int modulus;              // the larger of p^m1 and q
    PowerResidueCount residues;
    long count_lower_bound = 0;
    bool premises_ok() const { return premise_errors.empty(); }
};

Lemma4Report lemma4_verify(unsigned l, const Int& x1, const Int& x2, const Int& p, unsigned long m1,
                           unsigned long m2, const Int& q);

struct Solution {
    Int x;
    unsigned long m = 0;
};

// Phi_l(x_i) = p^{m_i} q for increasing x_i, checked on construction.
struct GapWitness {
    unsigned l = 0;
    std::vector<Solution> solutions;
    Int p;
    Int q;
};

// Throws DomainError listing every failed premise.
GapWitness make_gap_witness(unsigned l, std::vector<Solution> solutions, Int p, Int q);
std::vector<std::string> gap_witness_errors(unsigned l, const std::vector<Solution>& solutions, const Int& p,
                                            const Int& q);

Rational lemma5_constant();  // 0.397

// Certifies m3 > 0.397 |R| x1 (true) or its negation (false).
bool lemma5_conclusion(unsigned l, const Int& x1, const Int& m3, const PrecisionPolicy& policy = {});

struct Lemma5Report {
    std::vector<std::string> premise_errors;
    RationalInterval abs_R;
    RationalInterval threshold;  // 0.397 |R| x1
    bool conclusion = false;
    // 2.5184 m3 (1/x1 + 1/x2 + 1/x3) > |R|
    bool branch_b_nonzero = false;
    // 0.15/x1 < m3 (1/x2 + 1/x3)
    bool branch_b_zero = false;
    bool premises_ok() const { return premise_errors.empty(); }
};

Lemma5Report lemma5_verify(const GapWitness& w, const PrecisionPolicy& policy = {});
// Same, but premise failures are reported instead of thrown.
Lemma5Report lemma5_verify(unsigned l, const std::vector<Solution>& solutions, const Int& p, const Int& q,
                           const PrecisionPolicy& policy = {});

struct BranchConstantCheck {
    unsigned l = 0;
    Rational lhs;  // 0.15 * 3^floor((l+1)/6)
    bool holds = false;
    std::string detail;
};

// 0.15*3^k > 0.2 l > pi for l = 3 (mod 4); 0.15*3^k > l > sqrt(l) log(4l) > R for l = 1 (mod 4).
BranchConstantCheck lemma5_branch_constant(unsigned l, const PrecisionPolicy& policy = {});

enum class Scale { linear, log, loglog };
std::string to_string(Scale s);

// A certified lower bound "quantity > value" in a tagged scale.
struct NamedBound {
    std::string name;
    Scale scale = Scale::linear;
    RationalInterval value;      // bracket of the bound itself; the lower endpoint is what is certified
    std::optional<Int> exact;    // exact integer bounds (prime chain)
    bool informational = false;  // reported but not part of the verdict
};

// Log of a positive bound, moving it one scale up; the only scale conversion offered.
NamedBound raise_scale(const NamedBound& b, std::string name, long bits);

struct BoundCheck {
    std::string name;
    Scale scale = Scale::linear;
    RationalInterval lhs;
    RationalInterval threshold;
    bool certified = false;  // lhs > threshold, strictly and with no overlap
};

// Compares a bound with a threshold expressed in the same scale; throws on mismatch.
std::optional<BoundCheck> compare_in_scale(const NamedBound& b, Scale threshold_scale,
                                           const RationalInterval& threshold, std::string name);

struct BoundReport {
    unsigned l = 0;
    Int D;
    RationalInterval abs_R;
    RationalInterval r_prime;  // 0.397 |R|
    Int p_min;                 // least prime = 1 (mod 2l)
    std::vector<NamedBound> chain;
    std::vector<BoundCheck> checks;
    bool exceeds_classical = false;
    long bits = 0;

    const NamedBound& bound(const std::string& name) const;
    const BoundCheck& check(const std::string& name) const;
    bool all_checks_pass() const;
};

BoundReport bound_chain(unsigned l, const PrecisionPolicy& policy = {});

// At most five (l >= 59) or six (19 <= l <= 53) solutions per q, justified by bound_chain.
unsigned lemma0_verdict(unsigned l, const PrecisionPolicy& policy = {});

}  // namespace opn
