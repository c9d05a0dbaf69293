#include "opn/quadfield.hpp"

#include "opn/cyclotomic.hpp"
#include "opn/errors.hpp"

namespace opn {

namespace {

void require_quadratic_discriminant(const Int& D, const char* op) {
    Int r;
    mpz_fdiv_r_ui(r.get_mpz_t(), D.get_mpz_t(), 4);
    if (r != 1) throw DomainError(std::string(op) + ": D must be 1 mod 4, got " + D.get_str());
}

bool squarefree(const Int& n) {
    for (const auto& f : factorize(abs(n))) {
        if (f.exponent > 1) return false;
    }
    return true;
}

// Relative width below 10^-digits, assuming a positive interval.
bool narrow_enough(const RationalInterval& iv, int digits) {
    if (iv.lo() <= 0) return false;
    const Rational limit(1, pow(Int(10), static_cast<unsigned long>(digits)));
    return iv.width() < limit * iv.lo();
}

unsigned long valuation_of(Int n, const Int& p) {
    unsigned long k = 0;
    n = abs(n);
    while (n != 0 && mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
        n /= p;
        ++k;
    }
    return k;
}

}  // namespace

QuadElem::QuadElem(Int u_, Int v_, Int D_) : u(std::move(u_)), v(std::move(v_)), D(std::move(D_)) {
    if (mpz_odd_p(Int(u - v).get_mpz_t())) {
        throw DomainError("QuadElem: u and v must have equal parity (" + u.get_str() + ", " + v.get_str() + ")");
    }
}

QuadElem operator*(const QuadElem& a, const QuadElem& b) {
    if (a.D != b.D) throw DomainError("QuadElem: mismatched fields");
    return {(a.u * b.u + a.D * a.v * b.v) / 2, (a.u * b.v + a.v * b.u) / 2, a.D};
}

std::string QuadElem::to_string() const {
    return "(" + u.get_str() + (v < 0 ? " - " : " + ") + Int(abs(v)).get_str() + "*sqrt(" + D.get_str() + "))/2";
}

Int quad_norm(const QuadElem& e) { return (e.u * e.u - e.D * e.v * e.v) / 4; }

FundamentalUnit fundamental_unit(const Int& D, int digits, const PrecisionPolicy& policy) {
    if (D <= 0) throw DomainError("fundamental_unit: D must be positive (use abs_regulator for D < 0)");
    require_quadratic_discriminant(D, "fundamental_unit");
    if (!squarefree(D)) throw DomainError("fundamental_unit: D must be squarefree, got " + D.get_str());

    // Complete quotients (P + sqrt D)/Q of omega = (1 + sqrt D)/2, convergents h/k.
    // The first convergent with |N((2h - k + k sqrt D)/2)| = 1 gives the fundamental unit.
    Int s;
    mpz_sqrt(s.get_mpz_t(), D.get_mpz_t());
    Int P = 1, Q = 2;
    Int h = 1, h_prev = 0, k = 0, k_prev = 1;
    for (unsigned long step = 0; step < 10'000'000; ++step) {
        Int a;
        mpz_fdiv_q(a.get_mpz_t(), Int(P + s).get_mpz_t(), Q.get_mpz_t());
        Int h_next = a * h + h_prev;
        Int k_next = a * k + k_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        const Int u = 2 * h - k;
        const Int norm4 = u * u - D * k * k;
        if (norm4 == 4 || norm4 == -4) {
            QuadElem eps(u, k, D);
            return {eps, regulator_interval(eps, digits, policy)};
        }
        P = a * Q - P;
        Q = (D - P * P) / Q;
    }
    throw ResourceError("fundamental_unit: continued fraction did not close for D = " + D.get_str());
}

RationalInterval regulator_interval(const QuadElem& unit, int digits, const PrecisionPolicy& policy) {
    return refine(
        [&](long bits) -> std::optional<RationalInterval> {
            const RationalInterval root = sqrt_bracket(Rational(unit.D), bits);
            const RationalInterval value = (RationalInterval::point(Rational(unit.u)) +
                                            RationalInterval::point(Rational(unit.v)) * root) *
                                           RationalInterval::point(Rational(1, 2));
            if (value.lo() <= 1) return std::nullopt;
            RationalInterval r = log_bracket(value, bits);
            if (!narrow_enough(r, digits)) return std::nullopt;
            return r;
        },
        policy, "regulator of " + unit.to_string());
}

RationalInterval abs_regulator(const Int& D, int digits, const PrecisionPolicy& policy) {
    if (D > 0) return fundamental_unit(D, digits, policy).regulator;
    if (D == -3 || D == -4) throw DomainError("abs_regulator: D = -3, -4 have extra roots of unity");
    require_quadratic_discriminant(D, "abs_regulator");
    return refine(
        [&](long bits) -> std::optional<RationalInterval> {
            RationalInterval pi = pi_bracket(bits);
            if (!narrow_enough(pi, digits)) return std::nullopt;
            return pi;
        },
        policy, "pi bracket");
}

bool faiziev_check(const Int& D, const PrecisionPolicy& policy) {
    const FundamentalUnit fu = fundamental_unit(D);
    return refine(
        [&](long bits) -> std::optional<bool> {
            const RationalInterval R = regulator_interval(fu.epsilon, static_cast<int>(bits / 4), policy);
            const RationalInterval bound = sqrt_bracket(Rational(D), bits) * log_bracket(Rational(4 * D), bits);
            return certified_less(R, bound);
        },
        policy, "faiziev_check D=" + D.get_str());
}

std::pair<QuadPrimeIdeal, QuadPrimeIdeal> prime_ideal_split(const Int& p, const Int& D) {
    if (p == 2 || !is_probable_prime(p)) throw DomainError("prime_ideal_split: p must be an odd prime");
    const int k = mpz_kronecker(D.get_mpz_t(), p.get_mpz_t());
    if (k == 0) throw DomainError("prime_ideal_split: " + p.get_str() + " ramifies in Q(sqrt " + D.get_str() + ")");
    if (k < 0) throw DomainError("prime_ideal_split: " + p.get_str() + " is inert in Q(sqrt " + D.get_str() + ")");
    Int b = sqrt_mod_prime(D, p);
    if (mpz_even_p(b.get_mpz_t())) b += p;
    const Int four_p = 4 * p;
    Int check = b * b - D;
    if (!mpz_divisible_p(check.get_mpz_t(), four_p.get_mpz_t())) throw InternalError("prime_ideal_split: b^2 != D mod 4p");
    return {QuadPrimeIdeal{p, b, D, false}, QuadPrimeIdeal{p, 2 * p - b, D, true}};
}

unsigned long ideal_valuation(const QuadElem& e, const QuadPrimeIdeal& ideal) {
    if (e.is_zero()) throw DomainError("ideal_valuation: zero element");
    if (e.D != ideal.D) throw DomainError("ideal_valuation: element and ideal live in different fields");
    const Int& p = ideal.p;
    // Strip rational factors of p: each contributes one to both conjugate valuations.
    Int u = e.u, v = e.v;
    unsigned long k = 0;
    while (mpz_divisible_p(u.get_mpz_t(), p.get_mpz_t()) && mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t())) {
        u /= p;
        v /= p;
        ++k;
    }
    // (u + v sqrt D)/2 lies in (p, (b + sqrt D)/2) iff p | u - v b; with p no longer dividing
    // the element, at most one of the two conjugate ideals contains it.
    const Int t = u - v * ideal.b;
    if (!mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) return k;
    return k + valuation_of((u * u - e.D * v * v) / 4, p);
}

Eq21Report eq21_verify(unsigned l, const Int& x, const Int& p, unsigned long m, const Int& q) {
    Eq21Report rep;
    auto premise = [&rep](const std::string& msg) {
        if (!rep.message.empty()) rep.message += "; ";
        rep.message += msg;
    };
    if (l < 5 || !is_probable_prime(Int(l))) premise("l must be a prime >= 5");
    if (!is_probable_prime(q)) premise("q must be prime");
    if (m > 0 && !is_probable_prime(p)) premise("p must be prime");
    if (m > 0 && p == q) premise("p and q must be distinct unless m = 0");
    if (!rep.message.empty()) return rep;
    if (m > 0 && p % l != 1) premise("p must be 1 mod l");
    if (q % l != 1) premise("q must be 1 mod l");
    const Int phi = phi_eval(l, x);
    if (phi != pow(p, m) * q) premise("Phi_l(x) = " + phi.get_str() + " is not p^m*q");
    if (!rep.message.empty()) return rep;

    const HalfFactorization hf = half_factorization(l);
    const HalfValues hv = half_values(hf, x);
    rep.X = hv.X;
    rep.Y = hv.Y;
    rep.coprime = hv.gcd == 1;
    const QuadElem e(hv.X, hv.Y, hf.D);
    rep.norm = quad_norm(e);

    std::string relation;
    if (abs(rep.norm) != phi) relation += "norm mismatch; ";
    if (m > 0) {
        const auto [P, P_bar] = prime_ideal_split(p, hf.D);
        rep.xi_val_p = static_cast<long>(ideal_valuation(e, P)) - static_cast<long>(ideal_valuation(e, P_bar));
        rep.xi_val_p_bar = -rep.xi_val_p;
        if (rep.xi_val_p == static_cast<long>(m)) rep.sign_p = -1;
        else if (rep.xi_val_p == -static_cast<long>(m)) rep.sign_p = +1;
        else relation += "valuation at p is " + std::to_string(rep.xi_val_p) + ", expected +-" + std::to_string(m) + "; ";
    }
    const auto [Qi, Q_bar] = prime_ideal_split(q, hf.D);
    rep.xi_val_q = static_cast<long>(ideal_valuation(e, Qi)) - static_cast<long>(ideal_valuation(e, Q_bar));
    rep.xi_val_q_bar = -rep.xi_val_q;
    if (rep.xi_val_q == 1) rep.sign_q = -1;
    else if (rep.xi_val_q == -1) rep.sign_q = +1;
    else relation += "valuation at q is " + std::to_string(rep.xi_val_q) + ", expected +-1; ";

    if (!relation.empty()) {
        rep.status = Eq21Status::relation_failed;
        rep.message = relation;
        return rep;
    }
    rep.status = Eq21Status::verified;
    rep.message = rep.coprime ? "relation holds" : "relation holds; X and Y are not coprime";
    return rep;
}

Rational xi_log_upper_constant() { return decimal("1.2592"); }

RationalInterval xi_log_abs(unsigned l, const Int& x, long bits) {
    if (l < 19 || !is_probable_prime(Int(l))) throw DomainError("xi_log_abs: l must be a prime >= 19");
    const Int bound = lemma3_threshold(l);
    if (x <= bound) throw DomainError("xi_log_abs: x = " + x.get_str() + " must exceed " + bound.get_str());
    const HalfFactorization hf = half_factorization(l);
    const HalfValues hv = half_values(hf, x);
    if (hv.X <= 0) throw InternalError("xi_log_abs: X must be positive in the admissible range");
    const RationalInterval X = RationalInterval::point(Rational(hv.X));
    const RationalInterval Y = RationalInterval::point(Rational(hv.Y));
    if (hf.D < 0) {
        // |xi| = 1 and the principal argument is 2*atan(Y sqrt|D| / X), inside (-pi, pi).
        const RationalInterval t = abs(Y * sqrt_bracket(Rational(-hf.D), bits) / X);
        const RationalInterval a = atan_bracket(t, bits);
        return a + a;
    }
    const RationalInterval s = sqrt_bracket(Rational(hf.D), bits);
    const RationalInterval num = X + Y * s;
    const RationalInterval den = X - Y * s;
    if (num.lo() <= 0 || den.lo() <= 0) throw UndecidableError("xi_log_abs: sign of xi unresolved", bits);
    return abs(log_bracket(num / den, bits));
}

XiLogVerdict xi_log_abs_check(unsigned l, const Int& x, const PrecisionPolicy& policy) {
    const RationalInterval lower = RationalInterval::point(ratio_lower_constant() / Rational(x));
    const RationalInterval upper = RationalInterval::point(xi_log_upper_constant() / Rational(x));
    return refine(
        [&](long bits) -> std::optional<XiLogVerdict> {
            XiLogVerdict v;
            v.value = xi_log_abs(l, x, bits);
            auto lo = certified_greater(v.value, lower);
            auto hi = certified_less(v.value, upper);
            if (!lo || !hi) return std::nullopt;
            v.lower_ok = *lo;
            v.upper_ok = *hi;
            v.bits = bits;
            return v;
        },
        policy, "xi_log_abs l=" + std::to_string(l) + " x=" + x.get_str());
}

}  // namespace opn
