#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opn/arith.hpp"
#include "opn/interval.hpp"

namespace opn {

// (u + v sqrt(D))/2 in the ring of integers of Q(sqrt(D)), D = 1 (mod 4).
struct QuadElem {
    Int u;
    Int v;
    Int D;

    QuadElem(Int u_, Int v_, Int D_);
    static QuadElem one(const Int& D) { return {2, 0, D}; }

    QuadElem conjugate() const { return {u, -v, D}; }
    bool is_zero() const { return u == 0 && v == 0; }
    bool operator==(const QuadElem&) const = default;
    friend QuadElem operator*(const QuadElem& a, const QuadElem& b);
    std::string to_string() const;
};

Int quad_norm(const QuadElem& e);

// The prime ideal (p, (b + sqrt(D))/2) above a split prime p, with b^2 = D (mod 4p).
struct QuadPrimeIdeal {
    Int p;
    Int b;
    Int D;
    bool conjugate = false;
    bool operator==(const QuadPrimeIdeal&) const = default;
};

struct FundamentalUnit {
    QuadElem epsilon;
    RationalInterval regulator;  // log(epsilon)
};

// Fundamental unit of Q(sqrt(D)), D > 0 squarefree and 1 mod 4, from the continued
// fraction of (1 + sqrt(D))/2. The regulator interval has relative width below
// 10^-digits.
FundamentalUnit fundamental_unit(const Int& D, int digits = 20, const PrecisionPolicy& policy = {});

// Regulator bracket of a known unit (u + v sqrt(D))/2 > 1 with relative width below 10^-digits.
RationalInterval regulator_interval(const QuadElem& unit, int digits, const PrecisionPolicy& policy = {});

// |R|: the regulator for D > 0, and pi for D < -4.
RationalInterval abs_regulator(const Int& D, int digits = 20, const PrecisionPolicy& policy = {});

// Certifies R < sqrt(D) log(4D).
bool faiziev_check(const Int& D, const PrecisionPolicy& policy = {});

std::pair<QuadPrimeIdeal, QuadPrimeIdeal> prime_ideal_split(const Int& p, const Int& D);

unsigned long ideal_valuation(const QuadElem& e, const QuadPrimeIdeal& ideal);

enum class Eq21Status { verified, premise_failed, relation_failed };

struct Eq21Report {
    Eq21Status status = Eq21Status::premise_failed;
    std::string message;
    Int X, Y;
    bool coprime = false;
    Int norm;
    // Valuations of xi = (X + Y sqrt D)/(X - Y sqrt D) at the ideals above p and q.
    long xi_val_p = 0, xi_val_p_bar = 0;
    long xi_val_q = 0, xi_val_q_bar = 0;
    // +1 if [xi] carries (p_bar/p)^{+m}, -1 for (p_bar/p)^{-m}; 0 when m = 0. Same for q.
    int sign_p = 0;
    int sign_q = 0;
};

Eq21Report eq21_verify(unsigned l, const Int& x, const Int& p, unsigned long m, const Int& q);

// Certified bracket of |log xi| (principal branch) for xi = (X + Y sqrt D)/(X - Y sqrt D).
RationalInterval xi_log_abs(unsigned l, const Int& x, long bits = 128);

struct XiLogVerdict {
    RationalInterval value;
    bool lower_ok = false;  // 0.3791/x < |log xi|
    bool upper_ok = false;  // |log xi| < 1.2592/x
    long bits = 0;
    bool pass() const { return lower_ok && upper_ok; }
};

// Refines xi_log_abs until both comparisons with 0.3791/x and 1.2592/x resolve.
XiLogVerdict xi_log_abs_check(unsigned l, const Int& x, const PrecisionPolicy& policy = {});

Rational xi_log_upper_constant();  // 1.2592

}  // namespace opn
