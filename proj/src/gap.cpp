#include "opn/gap.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "opn/cyclotomic.hpp"
#include "opn/errors.hpp"
#include "opn/quadfield.hpp"

namespace opn {

namespace {

void require_gap_prime(unsigned l, const char* op) {
    if (l < 19 || !is_probable_prime(Int(l))) {
        throw DomainError(std::string(op) + ": l must be a prime >= 19, got " + std::to_string(l));
    }
}

Int signed_discriminant(unsigned l) {
    return ((l - 1) / 2) % 2 == 0 ? Int(l) : Int(-static_cast<long>(l));
}

Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

RationalInterval point(const Rational& r) { return RationalInterval::point(r); }
RationalInterval point(const Int& n) { return RationalInterval::point(Rational(n)); }

void check_solution(unsigned l, const Solution& s, const Int& p, const Int& q, std::vector<std::string>& errs,
                    const std::string& tag) {
    if (s.x <= 0) {
        errs.push_back(tag + ": x must be positive");
        return;
    }
    const Int phi = phi_eval(l, s.x);
    if (phi != pow(p, s.m) * q) {
        errs.push_back(tag + ": Phi_" + std::to_string(l) + "(" + s.x.get_str() + ") = " + phi.get_str() +
                       " is not " + p.get_str() + "^" + std::to_string(s.m) + " * " + q.get_str());
    }
}

}  // namespace

Int root_count_formula(unsigned long l, const Int& M, const FactorBudget& budget) {
    if (M < 2) throw DomainError("root_count_mod: modulus must be at least 2");
    const Int L(l);
    Int count = 1;
    for (const auto& [p, e] : factorize(M, budget)) {
        if (p == 2) {
            // (Z/2^e)^* is trivial, C2, or C2 x C_{2^{e-2}}.
            if (e >= 2) count *= gcd(L, 2);
            if (e >= 3) count *= gcd(L, pow(Int(2), e - 2));
        } else {
            count *= gcd(L, pow(p, e - 1) * (p - 1));
        }
    }
    return count;
}

Int root_count_mod(unsigned long l, const Int& M, const FactorBudget& budget) {
    if (M < 2) throw DomainError("root_count_mod: modulus must be at least 2");
    if (M > kRootCountBruteLimit) return root_count_formula(l, M, budget);
    const unsigned long m = M.get_ui();
    unsigned long count = 0;
    for (unsigned long x = 1; x < m; ++x) {
        // Square-and-multiply in 128-bit arithmetic; m < 2^24 keeps products in range.
        unsigned long long r = 1, b = x % m;
        for (unsigned long e = l; e > 0; e >>= 1) {
            if (e & 1) r = r * b % m;
            b = b * b % m;
        }
        if (r == 1 % m) ++count;
    }
    return count;
}

long lemma4_count_lower_bound(unsigned l) {
    const long k = static_cast<long>(gap_exponent(l));
    return 3 * static_cast<long>(l + 1) / 2 - 3 * k;
}

PowerResidueCount lemma4_power_residues(unsigned l, const Int& x1, const Int& x2, const Int& modulus) {
    const long k = static_cast<long>(gap_exponent(l));
    const long half = static_cast<long>(l - 1) / 2;
    PowerResidueCount out;
    out.all_roots = true;
    std::set<Int> seen;
    const Int L(l);
    for (long f2 = 0; f2 <= 2; ++f2) {
        Int base;
        mpz_powm_ui(base.get_mpz_t(), x2.get_mpz_t(), static_cast<unsigned long>(f2), modulus.get_mpz_t());
        Int value = base;
        for (long f1 = 0; f1 <= half - f2 * k; ++f1) {
            ++out.pairs;
            seen.insert(value);
            Int r;
            mpz_powm(r.get_mpz_t(), value.get_mpz_t(), L.get_mpz_t(), modulus.get_mpz_t());
            if (r != 1 % modulus) out.all_roots = false;
            value = (value * x1) % modulus;
        }
    }
    out.distinct = seen.size();
    return out;
}

Lemma4Report lemma4_verify(unsigned l, const Int& x1, const Int& x2, const Int& p, unsigned long m1,
                           unsigned long m2, const Int& q) {
    Lemma4Report rep;
    auto& errs = rep.premise_errors;
    if (l < 19 || !is_probable_prime(Int(l))) errs.push_back("l: must be a prime >= 19");
    if (x1 <= 0) errs.push_back("x1: must be positive");
    if (x2 <= x1) errs.push_back("x2: must exceed x1");
    if (!is_probable_prime(q)) errs.push_back("q: must be prime");
    if ((m1 > 0 || m2 > 0) && !is_probable_prime(p)) errs.push_back("p: must be prime");
    if (!errs.empty()) return rep;
    if (x1 > 1 && multiplicative_dependence(x1, x2)) {
        errs.push_back("x1, x2: multiplicatively dependent");
    }
    check_solution(l, {x1, m1}, p, q, errs, "x1");
    check_solution(l, {x2, m2}, p, q, errs, "x2");

    rep.threshold = pow(x1, gap_exponent(l));
    rep.conclusion = x2 > rep.threshold;
    rep.count_lower_bound = lemma4_count_lower_bound(l);
    const Int pm = pow(p, m1);
    rep.modulus = pm > q ? pm : q;
    if (rep.modulus > 1) rep.residues = lemma4_power_residues(l, x1, x2, rep.modulus);
    return rep;
}

std::vector<std::string> gap_witness_errors(unsigned l, const std::vector<Solution>& solutions, const Int& p,
                                            const Int& q) {
    std::vector<std::string> errs;
    if (l < 19 || !is_probable_prime(Int(l))) errs.push_back("l: must be a prime >= 19");
    if (solutions.size() != 3) errs.push_back("solutions: exactly three are required");
    if (!is_probable_prime(p)) errs.push_back("p: must be prime");
    if (!is_probable_prime(q)) errs.push_back("q: must be prime");
    if (!errs.empty()) return errs;
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        check_solution(l, solutions[i], p, q, errs, "x" + std::to_string(i + 1));
    }
    const unsigned long k = gap_exponent(l);
    for (std::size_t i = 1; i < solutions.size(); ++i) {
        const Int& prev = solutions[i - 1].x;
        const Int& cur = solutions[i].x;
        const std::string tag = "x" + std::to_string(i + 1);
        if (cur <= prev) errs.push_back(tag + ": must exceed x" + std::to_string(i));
        else if (prev > 0 && cur <= pow(prev, k)) {
            errs.push_back(tag + ": must exceed x" + std::to_string(i) + "^" + std::to_string(k));
        }
    }
    return errs;
}

GapWitness make_gap_witness(unsigned l, std::vector<Solution> solutions, Int p, Int q) {
    const auto errs = gap_witness_errors(l, solutions, p, q);
    if (!errs.empty()) {
        std::string msg = "invalid gap witness";
        for (const auto& e : errs) msg += "; " + e;
        throw DomainError(msg);
    }
    return GapWitness{l, std::move(solutions), std::move(p), std::move(q)};
}

Rational lemma5_constant() { return decimal("0.397"); }

bool lemma5_conclusion(unsigned l, const Int& x1, const Int& m3, const PrecisionPolicy& policy) {
    require_gap_prime(l, "lemma5_conclusion");
    const Int D = signed_discriminant(l);
    return refine(
        [&](long bits) -> std::optional<bool> {
            const RationalInterval R = abs_regulator(D, static_cast<int>(bits / 4), policy);
            const RationalInterval threshold = point(lemma5_constant() * Rational(x1)) * R;
            return certified_greater(point(m3), threshold);
        },
        policy, "lemma5_conclusion");
}

Lemma5Report lemma5_verify(unsigned l, const std::vector<Solution>& solutions, const Int& p, const Int& q,
                           const PrecisionPolicy& policy) {
    Lemma5Report rep;
    rep.premise_errors = gap_witness_errors(l, solutions, p, q);
    if (!rep.premises_ok()) return rep;
    return lemma5_verify(GapWitness{l, solutions, p, q}, policy);
}

Lemma5Report lemma5_verify(const GapWitness& w, const PrecisionPolicy& policy) {
    Lemma5Report rep;
    const Int D = signed_discriminant(w.l);
    const Rational x1(w.solutions[0].x), x2(w.solutions[1].x), x3(w.solutions[2].x);
    const Int m3(w.solutions[2].m);
    const Rational m1(Int(w.solutions[0].m)), m2(Int(w.solutions[1].m));
    (void)m1;
    (void)m2;

    rep.conclusion = lemma5_conclusion(w.l, w.solutions[0].x, m3, policy);
    rep.abs_R = abs_regulator(D, 30, policy);
    rep.threshold = point(lemma5_constant() * x1) * rep.abs_R;

    const Rational sum_inv = 1 / x1 + 1 / x2 + 1 / x3;
    rep.branch_b_nonzero = refine(
        [&](long bits) -> std::optional<bool> {
            const RationalInterval R = abs_regulator(D, static_cast<int>(bits / 4), policy);
            return certified_greater(point(decimal("2.5184") * Rational(m3) * sum_inv), R);
        },
        policy, "lemma5 b != 0 branch");
    rep.branch_b_zero = decimal("0.15") / x1 < Rational(m3) * (1 / x2 + 1 / x3);
    return rep;
}

BranchConstantCheck lemma5_branch_constant(unsigned l, const PrecisionPolicy& policy) {
    require_gap_prime(l, "lemma5_branch_constant");
    BranchConstantCheck c;
    c.l = l;
    c.lhs = decimal("0.15") * Rational(lemma3_threshold(l));
    const Rational L(l);
    if (l % 4 == 3) {
        const Rational fifth = decimal("0.2") * L;
        const bool pi_ok = refine(
            [&](long bits) { return certified_less(pi_bracket(bits), point(fifth)); }, policy, "pi < 0.2 l");
        c.holds = c.lhs > fifth && pi_ok;
        c.detail = "0.15*3^k = " + decimal_floor(c.lhs, 4) + ", 0.2l = " + decimal_floor(fifth, 4) + ", |R| = pi";
        return c;
    }
    const Int D(l);
    const bool faiziev = faiziev_check(D, policy);
    const bool estimate_below_l = refine(
        [&](long bits) {
            return certified_less(sqrt_bracket(L, bits) * log_bracket(Rational(4 * D), bits), point(L));
        },
        policy, "sqrt(l) log(4l) < l");
    const RationalInterval R = abs_regulator(D, 20, policy);
    c.holds = c.lhs > L && faiziev && estimate_below_l && R.hi() < L;
    c.detail = "0.15*3^k = " + decimal_floor(c.lhs, 4) + ", l = " + std::to_string(l) + ", R in " + R.to_string(6);
    return c;
}

std::string to_string(Scale s) {
    switch (s) {
        case Scale::linear: return "linear";
        case Scale::log: return "log";
        case Scale::loglog: return "loglog";
    }
    return "?";
}

NamedBound raise_scale(const NamedBound& b, std::string name, long bits) {
    if (b.scale == Scale::loglog) throw DomainError("raise_scale: no scale above loglog");
    if (b.value.lo() <= 0) throw DomainError("raise_scale: bound must be positive to take its log");
    NamedBound out;
    out.name = std::move(name);
    out.scale = b.scale == Scale::linear ? Scale::log : Scale::loglog;
    out.value = log_bracket(b.value, bits);
    return out;
}

std::optional<BoundCheck> compare_in_scale(const NamedBound& b, Scale threshold_scale,
                                           const RationalInterval& threshold, std::string name) {
    if (b.scale != threshold_scale) {
        throw DomainError("compare_in_scale: " + b.name + " is in " + to_string(b.scale) +
                          " scale, threshold in " + to_string(threshold_scale));
    }
    auto verdict = certified_greater(b.value, threshold);
    if (!verdict) return std::nullopt;
    return BoundCheck{std::move(name), b.scale, b.value, threshold, *verdict};
}

const NamedBound& BoundReport::bound(const std::string& name) const {
    auto it = std::find_if(chain.begin(), chain.end(), [&](const NamedBound& b) { return b.name == name; });
    if (it == chain.end()) throw DomainError("BoundReport: no bound named " + name);
    return *it;
}

const BoundCheck& BoundReport::check(const std::string& name) const {
    auto it = std::find_if(checks.begin(), checks.end(), [&](const BoundCheck& c) { return c.name == name; });
    if (it == checks.end()) throw DomainError("BoundReport: no check named " + name);
    return *it;
}

bool BoundReport::all_checks_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.certified; });
}

BoundReport bound_chain(unsigned l, const PrecisionPolicy& policy) {
    require_gap_prime(l, "bound_chain");
    const unsigned long k = gap_exponent(l);
    const bool short_chain = l >= 59;

    // Prime chain from the first gap principle: q_{i+1} > q_i^k.
    const Int q1 = 3;
    const Int q2 = next_prime_above(pow(q1, k));
    const std::optional<Int> q3 = short_chain ? std::nullopt : std::optional<Int>(next_prime_above(pow(q2, k)));

    BoundReport rep;
    rep.l = l;
    rep.D = signed_discriminant(l);
    // p divides Phi_l(q_i) with q_i != 1 (mod l), so p = 1 (mod l); p is odd, hence p = 1 (mod 2l).
    rep.p_min = least_prime_1_mod(Int(2 * l));

    return refine(
        [&](long bits) -> std::optional<BoundReport> {
            BoundReport r = rep;
            r.bits = bits;
            r.abs_R = abs_regulator(r.D, static_cast<int>(bits / 4), policy);
            r.r_prime = point(lemma5_constant()) * r.abs_R;
            const RationalInterval inv_l1 = point(Rational(1, l - 1));
            // c = R' log(p)/(l-1): one application of the second gap principle turns
            // a lower bound x1 into log x3 > x1 * c.
            const RationalInterval c = r.r_prime * log_bracket(Rational(r.p_min), bits) * inv_l1;
            const RationalInterval c_weak = r.r_prime * log_bracket(Rational(2 * l + 1), bits) * inv_l1;
            const RationalInterval log_c = log_bracket(c, bits);
            const RationalInterval loglog2 = log_bracket(log_bracket(Rational(2), bits), bits);
            const RationalInterval classical = point(Rational(Int(l) * l)) * log_bracket(Rational(4), bits);

            auto add_exact = [&](const std::string& name, const Int& v) {
                r.chain.push_back({name, Scale::linear, point(v), v, false});
            };
            add_exact("q1", q1);
            add_exact("q2", q2);

            std::optional<BoundCheck> chk;
            auto require = [&](std::optional<BoundCheck> c_opt) {
                if (!c_opt) return false;
                r.checks.push_back(std::move(*c_opt));
                return true;
            };

            if (short_chain) {
                r.chain.push_back({"log q3", Scale::log, point(Rational(Int(k))) * log_bracket(Rational(q2), bits),
                                   std::nullopt, true});
                const RationalInterval log_q4 = point(q2) * c;
                r.chain.push_back({"log q4", Scale::log, log_q4, std::nullopt, false});
                const RationalInterval loglog_q6 = log_q4 + log_c;
                r.chain.push_back({"loglog q6", Scale::loglog, loglog_q6, std::nullopt, false});
                r.chain.push_back({"log(log q6 / log 2)", Scale::loglog, loglog_q6 - loglog2, std::nullopt, false});
                if (!require(compare_in_scale(r.chain.back(), Scale::loglog, classical,
                                              "(log q6)/log 2 > 4^(l^2)")))
                    return std::nullopt;
            } else {
                add_exact("q3", *q3);
                const RationalInterval log_q5 = point(*q3) * c;
                r.chain.push_back({"log q5", Scale::log, log_q5, std::nullopt, false});
                r.chain.push_back({"log q5 (p >= 2l+1)", Scale::log, point(*q3) * c_weak, std::nullopt, true});
                const RationalInterval loglog_q7 = log_q5 + log_c;
                r.chain.push_back({"loglog q7", Scale::loglog, loglog_q7, std::nullopt, false});
                r.chain.push_back({"log(log q7 / log 2)", Scale::loglog, loglog_q7 - loglog2, std::nullopt, false});
                if (l == 19) {
                    if (!require(compare_in_scale(r.bound("log q5"), Scale::log, point(Rational(6238)),
                                                  "log q5 > 6238")))
                        return std::nullopt;
                    if (!require(compare_in_scale(r.bound("loglog q7"), Scale::loglog, point(Rational(6000)),
                                                  "loglog q7 > 6000")))
                        return std::nullopt;
                } else {
                    if (!require(compare_in_scale(r.bound("log q5"), Scale::log, point(Rational(3040000)),
                                                  "log q5 > 3040000")))
                        return std::nullopt;
                }
                if (!require(compare_in_scale(r.bound("log(log q7 / log 2)"), Scale::loglog, classical,
                                              "(log q7)/log 2 > 4^(l^2)")))
                    return std::nullopt;
            }
            r.exceeds_classical = r.checks.back().certified;
            return r;
        },
        policy, "bound_chain l=" + std::to_string(l));
}

unsigned lemma0_verdict(unsigned l, const PrecisionPolicy& policy) {
    require_gap_prime(l, "lemma0_verdict");
    if (l < 59 && l > 53) throw DomainError("lemma0_verdict: no prime lies strictly between 53 and 59");
    const BoundReport rep = bound_chain(l, policy);
    if (!rep.exceeds_classical || !rep.all_checks_pass()) {
        throw InternalError("lemma0_verdict: bound chain for l=" + std::to_string(l) +
                            " does not exceed the classical bound; the solution count is unsupported");
    }
    return l >= 59 ? 5u : 6u;
}

}  // namespace opn
