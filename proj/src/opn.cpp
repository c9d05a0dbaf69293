#include "opn/opn.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "opn/errors.hpp"

namespace opn {

Factorization EulerFormNumber::factorization() const {
    Factorization f;
    f.push_back({p, alpha});
    for (const auto& qi : q) f.push_back({qi, 2 * beta});
    std::sort(f.begin(), f.end(), [](const PrimeFactor& a, const PrimeFactor& b) { return a.prime < b.prime; });
    return f;
}

Int EulerFormNumber::value() const {
    Int n = pow(p, alpha);
    for (const auto& qi : q) n *= pow(qi, 2 * beta);
    return n;
}

std::vector<std::string> euler_form_errors(const EulerFormNumber& form) {
    std::vector<std::string> errs;
    if (form.beta < 1) errs.push_back("beta: must be positive");
    if (form.p % 4 != 1) errs.push_back("p: must be 1 mod 4");
    if (form.alpha % 4 != 1) errs.push_back("alpha: must be 1 mod 4");
    if (!is_probable_prime(form.p)) errs.push_back("p: not prime");
    std::set<Int> seen{form.p};
    for (std::size_t i = 0; i < form.q.size(); ++i) {
        const Int& qi = form.q[i];
        const std::string tag = "q[" + std::to_string(i) + "]";
        if (qi % 2 == 0) errs.push_back(tag + ": must be odd");
        else if (!is_probable_prime(qi)) errs.push_back(tag + ": not prime");
        if (!seen.insert(qi).second) errs.push_back(tag + ": repeated prime " + qi.get_str());
    }
    return errs;
}

EulerFormNumber make_euler_form(Int p, unsigned long alpha, std::vector<Int> q, unsigned long beta) {
    EulerFormNumber form{std::move(p), alpha, std::move(q), beta};
    const auto errs = euler_form_errors(form);
    if (!errs.empty()) {
        std::string msg = "invalid Euler form";
        for (const auto& e : errs) msg += "; " + e;
        throw DomainError(msg);
    }
    return form;
}

std::optional<LChoice> choose_l(const EulerFormNumber& form) {
    const Factorization f = factorize(Int(2 * form.beta + 1));
    for (auto it = f.rbegin(); it != f.rend(); ++it) {
        for (std::size_t i = 0; i < form.q.size(); ++i) {
            if (form.q[i] == it->prime) return LChoice{it->prime, i};
        }
    }
    return std::nullopt;
}

std::vector<std::string> PartitionResult::structure_errors(std::size_t r) const {
    std::vector<std::string> errs;
    std::vector<int> hits(r, 0);
    auto mark = [&](std::size_t i, const char* set) {
        if (i >= r) errs.push_back(std::string(set) + ": index " + std::to_string(i) + " out of range");
        else ++hits[i];
    };
    for (auto i : S) mark(i, "S");
    for (auto i : T) mark(i, "T");
    for (auto i : U) mark(i, "U");
    mark(i0, "i0");
    for (std::size_t i = 0; i < r; ++i) {
        if (hits[i] == 0) errs.push_back("index " + std::to_string(i) + " in no set");
        if (hits[i] > 1) errs.push_back("index " + std::to_string(i) + " in several sets");
    }
    for (auto i : T) {
        if (!f.count(i)) errs.push_back("f missing on T index " + std::to_string(i));
    }
    return errs;
}

PartitionResult partition_STU(const EulerFormNumber& form, const Int& l, std::size_t i0,
                              const FactorBudget& budget) {
    if (i0 >= form.q.size() || form.q[i0] != l) {
        throw DomainError("partition_STU: q[" + std::to_string(i0) + "] is not l = " + l.get_str());
    }
    PartitionResult res;
    res.l = l;
    res.i0 = i0;
    const unsigned long c = 2 * form.beta;
    const Factorization f2b1 = factorize(Int(c + 1));
    res.s = f2b1.size();
    for (const auto& [pr, e] : f2b1) {
        if (pr == l) res.gamma = e;
    }

    const std::size_t r = form.q.size();
    for (std::size_t i = 0; i < r; ++i) {
        if (i != i0 && form.q[i] % l == 1) res.S.push_back(i);
    }
    for (std::size_t i = 0; i < r; ++i) {
        if (i == i0 || form.q[i] % l == 1) continue;
        const Int& qi = form.q[i];
        const bool exact = mpz_sizeinbase(qi.get_mpz_t(), 2) * c <= kExactSigmaBits;
        const Int sig = exact ? sigma_pp(qi, c) : Int(0);
        bool in_t = false;
        for (std::size_t j = 0; j < r && !in_t; ++j) {
            if (j == i) continue;
            in_t = exact ? mpz_divisible_p(sig.get_mpz_t(), form.q[j].get_mpz_t()) != 0
                         : lemma1_divides(form.q[j], qi, c, budget);
        }
        if (!in_t) {
            res.U.push_back(i);
            continue;
        }
        res.T.push_back(i);
        unsigned long fi = 0;
        for (auto j : res.S) fi += sigma_pp_valuation(form.q[j], qi, c, budget);
        res.f[i] = fi;
        if (fi == 1) ++res.delta;
        if (fi == 0) res.f_zero.push_back(i);
    }
    if (res.s > 1) {
        res.composite_r_bound = Rational(Int(2 * form.beta * res.S.size()), (Int(1) << (res.s - 1)) - 1);
        res.composite_r_bound->canonicalize();
    }
    return res;
}

std::string TBoundCheck::detail() const {
    std::ostringstream os;
    os << "#T=" << t << " #S=" << s << " delta=" << delta << " sum_f=" << sum_f << " beta=" << beta
       << "; #T<=2b^2+delta/2:" << t_bound << " 2#T-delta<=sum_f:" << chain_low << " sum_f<=2b#S:" << chain_mid
       << " 2b#S<=4b^2:" << chain_top << " delta<=2#S:" << delta_bound;
    return os.str();
}

TBoundCheck t_bound_check(const PartitionResult& res, unsigned long beta) {
    TBoundCheck c;
    c.t = res.T.size();
    c.s = res.S.size();
    c.delta = res.delta;
    c.beta = beta;
    for (const auto& [i, fi] : res.f) c.sum_f += fi;
    const Int b(beta), t(c.t), s(c.s), d(c.delta), sf(c.sum_f);
    c.t_bound = Rational(t) <= Rational(2 * b * b) + Rational(d, 2);
    c.chain_low = 2 * t - d <= sf;
    c.chain_mid = sf <= 2 * b * s;
    c.chain_top = 2 * b * s <= 4 * b * b;
    c.delta_bound = d <= 2 * s;
    return c;
}

Int r_bound(unsigned long beta, RVariant variant) {
    if (beta < 1) throw DomainError("r_bound: beta must be positive");
    const Int b(beta);
    if (variant == RVariant::seven) {
        if (is_probable_prime(2 * b + 1) && beta < 29) {
            throw DomainError("r_bound: coefficient 7 needs 2*beta+1 composite or beta >= 29, got beta = " +
                              std::to_string(beta));
        }
        return 2 * b * b + 7 * b + 2;
    }
    return 2 * b * b + 8 * b + 2;
}

Int classical_r_bound(unsigned long beta) {
    if (beta < 1) throw DomainError("classical_r_bound: beta must be positive");
    const Int b(beta);
    return 4 * b * b + 2 * b + 2;
}

NBoundExponents n_bound_exponents(unsigned long beta) {
    if (beta < 1) throw DomainError("n_bound_exponents: beta must be positive");
    const Int b(beta);
    return {2 * b * b + 8 * b + 3, 4 * b * b + 2 * b + 3};
}

Int n_bound_loglog2(const Int& exponent) { return 2 * exponent; }

Int sigma(const Factorization& f) {
    Int s = 1;
    for (const auto& [p, e] : f) {
        s *= (pow(p, e + 1) - 1) / (p - 1);
    }
    return s;
}

bool abundancy_is_two(const Factorization& f) {
    Int n = 1;
    for (const auto& [p, e] : f) {
        if (!is_probable_prime(p)) throw DomainError("abundancy_is_two: " + p.get_str() + " is not prime");
        n *= pow(p, e);
    }
    return sigma(f) == 2 * n;
}

bool abundancy_is_two(const Int& n) {
    if (n < 1) throw DomainError("abundancy_is_two: n must be positive");
    if (n > Int(std::to_string(kAbundancyFactorLimit), 10)) {
        throw ResourceError("abundancy_is_two: " + n.get_str() + " exceeds 10^12; supply its factorization");
    }
    if (n == 1) return false;
    return abundancy_is_two(factorize(n));
}

}  // namespace opn
