#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opn/arith.hpp"
#include "opn/interval.hpp"

namespace opn {

// Phi_n(x), exact. Phi_1(0) = -1.
Int phi_eval(unsigned long n, const Int& x);

// Integer polynomial, coefficient of x^i at index i. No trailing zeros.
using IntPoly = std::vector<Int>;

Int eval(const IntPoly& poly, const Int& x);
IntPoly poly_mul(const IntPoly& a, const IntPoly& b);
IntPoly poly_sub(const IntPoly& a, const IntPoly& b);
IntPoly poly_scale(const IntPoly& a, const Int& c);
std::string poly_to_string(const IntPoly& p);

// Element of Z[zeta_l] in the basis 1, zeta, ..., zeta^{l-2}.
class CyclotomicInt {
public:
    explicit CyclotomicInt(unsigned l);
    static CyclotomicInt constant(unsigned l, const Int& c);
    static CyclotomicInt zeta_power(unsigned l, unsigned long k);
    // Gauss sum sum_{i=1}^{l-1} (i/l) zeta^i; its square is (-1)^{(l-1)/2} l.
    static CyclotomicInt gauss_sum(unsigned l);

    unsigned l() const { return l_; }
    const std::vector<Int>& coeffs() const { return c_; }

    CyclotomicInt& operator+=(const CyclotomicInt& o);
    CyclotomicInt& operator-=(const CyclotomicInt& o);
    friend CyclotomicInt operator+(CyclotomicInt a, const CyclotomicInt& b) { return a += b; }
    friend CyclotomicInt operator-(CyclotomicInt a, const CyclotomicInt& b) { return a -= b; }
    friend CyclotomicInt operator*(const CyclotomicInt& a, const CyclotomicInt& b);
    CyclotomicInt times_zeta_power(unsigned long k) const;
    bool operator==(const CyclotomicInt&) const = default;

    // (u, v) with this = (u + v*g)/2 for the Gauss sum g, when the element lies in
    // the quadratic subfield; nullopt otherwise.
    std::optional<std::pair<Int, Int>> quadratic_coordinates() const;

private:
    // Coefficients on zeta^0..zeta^{l-1} reduced to length l-1.
    static CyclotomicInt from_full(unsigned l, std::vector<Int> full);

    unsigned l_;
    std::vector<Int> c_;
};

// 4*Phi_l(x) = P(x)^2 - D*Q(x)^2 with D = (-1)^{(l-1)/2} l.
// psi+(x) = (P(x) + Q(x) sqrt(D))/2 and psi-(x) = (P(x) - Q(x) sqrt(D))/2 split the
// roots of Phi_l by quadratic residue class. Q has leading coefficient +1.
struct HalfFactorization {
    unsigned l = 0;
    Int D;
    IntPoly P;
    IntPoly Q;
};

HalfFactorization half_factorization(unsigned l);

// Re-checks every invariant of a HalfFactorization; throws InternalError on failure.
void validate(const HalfFactorization& hf);

struct HalfValues {
    Int X;
    Int Y;
    Int gcd;
};

HalfValues half_values(const HalfFactorization& hf, const Int& x);
HalfValues half_values(unsigned l, const Int& x);

// floor((l+1)/6) and the admissibility threshold 3^floor((l+1)/6).
unsigned long gap_exponent(unsigned l);
Int lemma3_threshold(unsigned l);

// Lower and upper ratio constants, exact.
Rational ratio_lower_constant();  // 0.3791
Rational ratio_upper_constant();  // 0.6296

struct RatioVerdict {
    unsigned l = 0;
    Int x;
    RationalInterval ratio;  // |Y/(X - Y sqrt(D))|
    bool lower_ok = false;   // 0.3791/x < ratio
    bool upper_ok = false;   // ratio < 0.6296/x
    long bits = 0;           // precision that resolved the comparison (0: exact)
    bool pass() const { return lower_ok && upper_ok; }
};

RatioVerdict lemma3_ratio_check(const HalfFactorization& hf, const Int& x,
                                const PrecisionPolicy& policy = {});
RatioVerdict lemma3_ratio_check(unsigned l, const Int& x, const PrecisionPolicy& policy = {});

struct SmallRangeReport {
    unsigned l = 0;
    Int lo;  // exclusive
    Int hi;  // exclusive
    bool empty = false;
    std::vector<RatioVerdict> results;
    std::vector<Int> failures;
    bool pass() const { return failures.empty(); }
};

SmallRangeReport lemma3_smallrange_verify(unsigned l, const PrecisionPolicy& policy = {});

struct LargeXVerdict {
    unsigned l = 0;
    Int x;
    bool p_bound = false;  // |P(x) - 2x^n - x^{n-1}| < x^{n-1}/2
    bool q_bound = false;  // ||Q(x)| - x^{n-1}| < x^{n-1}/(2 sqrt l)
    bool pass() const { return p_bound && q_bound; }
};

LargeXVerdict lemma3_largex_bounds(const HalfFactorization& hf, const Int& x);
LargeXVerdict lemma3_largex_bounds(unsigned l, const Int& x);

}  // namespace opn
