#include "opn/cyclotomic.hpp"

#include <algorithm>
#include <sstream>

#include "opn/errors.hpp"

namespace opn {

namespace {

int legendre(unsigned long a, unsigned l) {
    return mpz_legendre(Int(a).get_mpz_t(), Int(l).get_mpz_t());
}

std::vector<unsigned long> divisors(unsigned long n) {
    std::vector<unsigned long> small, large;
    for (unsigned long d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

int mobius(unsigned long n) {
    int mu = 1;
    for (unsigned long p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        n /= p;
        if (n % p == 0) return 0;
        mu = -mu;
    }
    if (n > 1) mu = -mu;
    return mu;
}

std::optional<unsigned long> prime_power_base(unsigned long n) {
    for (unsigned long p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        while (n % p == 0) n /= p;
        return n == 1 ? std::optional<unsigned long>(p) : std::nullopt;
    }
    return n > 1 ? std::optional<unsigned long>(n) : std::nullopt;
}

void trim(IntPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Int binomial(unsigned long n, unsigned long k) {
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

void require_prime_index(unsigned l, unsigned min_l, const char* op) {
    if (l < min_l || !is_probable_prime(Int(l))) {
        throw DomainError(std::string(op) + ": l must be a prime >= " + std::to_string(min_l) +
                          ", got " + std::to_string(l));
    }
}

}  // namespace

Int phi_eval(unsigned long n, const Int& x) {
    if (n == 0) throw DomainError("phi_eval: index must be positive");
    if (x < 0) throw DomainError("phi_eval: x must be non-negative");
    if (x == 0) return n == 1 ? Int(-1) : Int(1);
    if (x == 1) {
        if (n == 1) return 0;
        auto base = prime_power_base(n);
        return base ? Int(*base) : Int(1);
    }
    Int num = 1, den = 1;
    for (unsigned long d : divisors(n)) {
        const int mu = mobius(n / d);
        if (mu == 0) continue;
        (mu > 0 ? num : den) *= pow(x, d) - 1;
    }
    return num / den;
}

Int eval(const IntPoly& poly, const Int& x) {
    Int acc = 0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
    return acc;
}

IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
    if (a.empty() || b.empty()) return {};
    IntPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

IntPoly poly_sub(const IntPoly& a, const IntPoly& b) {
    IntPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

IntPoly poly_scale(const IntPoly& a, const Int& c) {
    IntPoly r = a;
    for (auto& v : r) v *= c;
    trim(r);
    return r;
}

std::string poly_to_string(const IntPoly& p) {
    if (p.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = p.size(); k-- > 0;) {
        const Int& c = p[k];
        if (c == 0) continue;
        Int mag = abs(c);
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        if (mag != 1 || k == 0) os << mag.get_str();
        if (k >= 1) os << "x";
        if (k >= 2) os << "^" << k;
    }
    return os.str();
}

CyclotomicInt::CyclotomicInt(unsigned l) : l_(l), c_(l - 1, 0) {
    if (l < 3) throw DomainError("CyclotomicInt: l must be an odd prime");
}

CyclotomicInt CyclotomicInt::constant(unsigned l, const Int& c) {
    CyclotomicInt r(l);
    r.c_[0] = c;
    return r;
}

CyclotomicInt CyclotomicInt::zeta_power(unsigned l, unsigned long k) {
    std::vector<Int> full(l, 0);
    full[k % l] = 1;
    return from_full(l, std::move(full));
}

CyclotomicInt CyclotomicInt::gauss_sum(unsigned l) {
    std::vector<Int> full(l, 0);
    for (unsigned i = 1; i < l; ++i) full[i] = legendre(i, l);
    return from_full(l, std::move(full));
}

CyclotomicInt CyclotomicInt::from_full(unsigned l, std::vector<Int> full) {
    // zeta^{l-1} = -(1 + zeta + ... + zeta^{l-2})
    CyclotomicInt r(l);
    const Int top = full[l - 1];
    for (unsigned j = 0; j + 1 < l; ++j) r.c_[j] = full[j] - top;
    return r;
}

CyclotomicInt& CyclotomicInt::operator+=(const CyclotomicInt& o) {
    if (o.l_ != l_) throw DomainError("CyclotomicInt: mismatched conductors");
    for (unsigned j = 0; j + 1 < l_; ++j) c_[j] += o.c_[j];
    return *this;
}

CyclotomicInt& CyclotomicInt::operator-=(const CyclotomicInt& o) {
    if (o.l_ != l_) throw DomainError("CyclotomicInt: mismatched conductors");
    for (unsigned j = 0; j + 1 < l_; ++j) c_[j] -= o.c_[j];
    return *this;
}

CyclotomicInt operator*(const CyclotomicInt& a, const CyclotomicInt& b) {
    if (a.l_ != b.l_) throw DomainError("CyclotomicInt: mismatched conductors");
    const unsigned l = a.l_;
    std::vector<Int> full(l, 0);
    for (unsigned i = 0; i + 1 < l; ++i) {
        if (a.c_[i] == 0) continue;
        for (unsigned j = 0; j + 1 < l; ++j) full[(i + j) % l] += a.c_[i] * b.c_[j];
    }
    return CyclotomicInt::from_full(l, std::move(full));
}

CyclotomicInt CyclotomicInt::times_zeta_power(unsigned long k) const {
    std::vector<Int> full(l_, 0);
    for (unsigned j = 0; j + 1 < l_; ++j) full[(j + k) % l_] = c_[j];
    return from_full(l_, std::move(full));
}

std::optional<std::pair<Int, Int>> CyclotomicInt::quadratic_coordinates() const {
    // Rewrite in the basis zeta^1..zeta^{l-1}, where 1 = -(zeta + ... + zeta^{l-1}).
    std::vector<Int> d(l_, 0);
    for (unsigned j = 1; j + 1 < l_; ++j) d[j] = c_[j] - c_[0];
    d[l_ - 1] = -c_[0];
    // Subfield elements are alpha*eta_0 + beta*eta_1 with eta_0 = (g-1)/2, eta_1 = (-g-1)/2.
    std::optional<Int> alpha, beta;
    for (unsigned j = 1; j < l_; ++j) {
        auto& slot = legendre(j, l_) == 1 ? alpha : beta;
        if (!slot) slot = d[j];
        else if (*slot != d[j]) return std::nullopt;
    }
    return std::make_pair(Int(-(*alpha + *beta)), Int(*alpha - *beta));
}

HalfFactorization half_factorization(unsigned l) {
    require_prime_index(l, 5, "half_factorization");
    const unsigned n = (l - 1) / 2;

    // psi+(x) = prod over quadratic residues i of (x - zeta^i), coefficients in Z[zeta].
    std::vector<CyclotomicInt> psi{CyclotomicInt::constant(l, 1)};
    for (unsigned i = 1; i < l; ++i) {
        if (legendre(i, l) != 1) continue;
        std::vector<CyclotomicInt> next(psi.size() + 1, CyclotomicInt(l));
        for (std::size_t k = 0; k < psi.size(); ++k) {
            next[k + 1] += psi[k];
            next[k] -= psi[k].times_zeta_power(i);
        }
        psi = std::move(next);
    }
    if (psi.size() != n + 1) throw InternalError("half_factorization: wrong degree");

    HalfFactorization hf;
    hf.l = l;
    hf.D = (n % 2 == 0) ? Int(l) : Int(-static_cast<long>(l));
    hf.P.resize(n + 1);
    hf.Q.resize(n + 1);
    for (unsigned k = 0; k <= n; ++k) {
        auto uv = psi[k].quadratic_coordinates();
        if (!uv) throw InternalError("half_factorization: coefficient outside the quadratic subfield");
        hf.P[k] = uv->first;
        hf.Q[k] = uv->second;
    }
    trim(hf.P);
    trim(hf.Q);
    if (!hf.Q.empty() && hf.Q.back() < 0) hf.Q = poly_scale(hf.Q, -1);
    validate(hf);
    return hf;
}

void validate(const HalfFactorization& hf) {
    const unsigned l = hf.l;
    const unsigned n = (l - 1) / 2;
    auto fail = [l](const std::string& what) {
        throw InternalError("HalfFactorization l=" + std::to_string(l) + ": " + what);
    };
    const Int expected_D = (n % 2 == 0) ? Int(l) : Int(-static_cast<long>(l));
    if (hf.D != expected_D) fail("D");
    if (hf.P.size() != n + 1 || hf.P[n] != 2 || hf.P[n - 1] != 1) fail("top coefficients of P");
    if (hf.Q.size() != n || hf.Q[n - 1] != 1) fail("leading coefficient of Q");

    const IntPoly lhs = poly_sub(poly_mul(hf.P, hf.P), poly_scale(poly_mul(hf.Q, hf.Q), hf.D));
    if (lhs != IntPoly(l, 4)) fail("4*Phi_l != P^2 - D*Q^2");

    // |a_i| <= C(n, i) for a_i = (P_{n-i} + Q_{n-i} sqrt(D))/2 and its conjugate.
    for (unsigned i = 0; i <= n; ++i) {
        const Int& p = hf.P[n - i];
        const Int q = (n - i < hf.Q.size()) ? hf.Q[n - i] : Int(0);
        const Int c = binomial(n, i);
        if (hf.D < 0) {
            if (p * p - hf.D * q * q > 4 * c * c) fail("coefficient bound at i=" + std::to_string(i));
        } else {
            const Int t = 2 * c - abs(p);
            if (t < 0 || q * q * hf.D > t * t) fail("coefficient bound at i=" + std::to_string(i));
        }
    }
}

HalfValues half_values(const HalfFactorization& hf, const Int& x) {
    if (x < 0) throw DomainError("half_values: x must be non-negative");
    HalfValues hv;
    hv.X = eval(hf.P, x);
    hv.Y = eval(hf.Q, x);
    mpz_gcd(hv.gcd.get_mpz_t(), hv.X.get_mpz_t(), hv.Y.get_mpz_t());
    if (hv.X * hv.X - hf.D * hv.Y * hv.Y != 4 * phi_eval(hf.l, x)) {
        throw InternalError("half_values: X^2 - D*Y^2 != 4*Phi_l(x)");
    }
    return hv;
}

HalfValues half_values(unsigned l, const Int& x) { return half_values(half_factorization(l), x); }

unsigned long gap_exponent(unsigned l) { return (l + 1) / 6; }

Int lemma3_threshold(unsigned l) { return pow(Int(3), gap_exponent(l)); }

Rational ratio_lower_constant() { return decimal("0.3791"); }
Rational ratio_upper_constant() { return decimal("0.6296"); }

RatioVerdict lemma3_ratio_check(const HalfFactorization& hf, const Int& x, const PrecisionPolicy& policy) {
    require_prime_index(hf.l, 19, "lemma3_ratio_check");
    const Int bound = lemma3_threshold(hf.l);
    if (x <= bound) {
        throw DomainError("lemma3_ratio_check: x = " + x.get_str() + " must exceed 3^" +
                          std::to_string(gap_exponent(hf.l)) + " = " + bound.get_str());
    }
    const HalfValues hv = half_values(hf, x);
    const Rational lower = ratio_lower_constant() / Rational(x);
    const Rational upper = ratio_upper_constant() / Rational(x);

    RatioVerdict v;
    v.l = hf.l;
    v.x = x;
    if (hf.D < 0) {
        // |X - Y sqrt(D)|^2 = X^2 + |D| Y^2, so the squared ratio is rational.
        Rational r2(hv.Y * hv.Y, hv.X * hv.X - hf.D * hv.Y * hv.Y);
        r2.canonicalize();
        v.lower_ok = r2 > lower * lower;
        v.upper_ok = r2 < upper * upper;
        v.ratio = sqrt_bracket(r2, policy.initial_bits);
        v.bits = 0;
        return v;
    }
    return refine(
        [&](long bits) -> std::optional<RatioVerdict> {
            const RationalInterval s = sqrt_bracket(Rational(hf.D), bits);
            const RationalInterval den = RationalInterval::point(Rational(hv.X)) -
                                         RationalInterval::point(Rational(hv.Y)) * s;
            if (den.contains_zero()) return std::nullopt;
            const RationalInterval ratio = RationalInterval::point(Rational(abs(hv.Y))) / abs(den);
            auto lo = certified_greater(ratio, RationalInterval::point(lower));
            auto hi = certified_less(ratio, RationalInterval::point(upper));
            if (!lo || !hi) return std::nullopt;
            RatioVerdict r = v;
            r.ratio = ratio;
            r.lower_ok = *lo;
            r.upper_ok = *hi;
            r.bits = bits;
            return r;
        },
        policy, "lemma3_ratio_check l=" + std::to_string(hf.l) + " x=" + x.get_str());
}

RatioVerdict lemma3_ratio_check(unsigned l, const Int& x, const PrecisionPolicy& policy) {
    return lemma3_ratio_check(half_factorization(l), x, policy);
}

SmallRangeReport lemma3_smallrange_verify(unsigned l, const PrecisionPolicy& policy) {
    require_prime_index(l, 19, "lemma3_smallrange_verify");
    SmallRangeReport rep;
    rep.l = l;
    rep.lo = lemma3_threshold(l);
    rep.hi = Int(l) * l;
    rep.empty = rep.lo + 1 >= rep.hi;
    if (rep.empty) return rep;
    const HalfFactorization hf = half_factorization(l);
    for (Int x = rep.lo + 1; x < rep.hi; ++x) {
        RatioVerdict v = lemma3_ratio_check(hf, x, policy);
        if (!v.pass()) rep.failures.push_back(x);
        rep.results.push_back(std::move(v));
    }
    return rep;
}

LargeXVerdict lemma3_largex_bounds(const HalfFactorization& hf, const Int& x) {
    require_prime_index(hf.l, 19, "lemma3_largex_bounds");
    const Int l2 = Int(hf.l) * hf.l;
    if (x < l2) {
        throw DomainError("lemma3_largex_bounds: x = " + x.get_str() + " must be at least l^2 = " + l2.get_str());
    }
    const unsigned long n = (hf.l - 1) / 2;
    const Int t = pow(x, n - 1);
    const HalfValues hv = half_values(hf, x);
    LargeXVerdict v;
    v.l = hf.l;
    v.x = x;
    const Int dp = hv.X - 2 * pow(x, n) - t;
    v.p_bound = 2 * abs(dp) < t;
    // ||Q| - t| < t/(2 sqrt l)  <=>  4 l (|Q| - t)^2 < t^2
    const Int dq = abs(hv.Y) - t;
    v.q_bound = 4 * Int(hf.l) * dq * dq < t * t;
    return v;
}

LargeXVerdict lemma3_largex_bounds(unsigned l, const Int& x) {
    return lemma3_largex_bounds(half_factorization(l), x);
}

}  // namespace opn
