#include "p2mu/real.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace p2mu {

namespace {
std::atomic<mpfr_prec_t> g_prec{128};
}

mpfr_prec_t working_precision() { return g_prec.load(std::memory_order_relaxed); }

void set_working_precision(mpfr_prec_t bits) {
    if (bits < 64) throw std::invalid_argument("working precision must be >= 64 bits");
    g_prec.store(bits, std::memory_order_relaxed);
}

Real::Real(const Rat& q) {
    mpfr_init2(v_, working_precision());
    mpfr_set_q(v_, q.raw(), MPFR_RNDN);
}

Real::Real(const std::string& decimal) {
    mpfr_init2(v_, working_precision());
    if (mpfr_set_str(v_, decimal.c_str(), 10, MPFR_RNDN) != 0)
        throw std::invalid_argument("Real: cannot parse '" + decimal + "'");
}

Real Real::pi() {
    Real r;
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}

Real Real::inf(int sign) {
    Real r;
    mpfr_set_inf(r.v_, sign);
    return r;
}

Real Real::nan() {
    Real r;
    mpfr_set_nan(r.v_);
    return r;
}

Real Real::pow2(long e) {
    Real r(1L);
    mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
    return r;
}

std::string Real::str(int digits) const {
    if (digits <= 0)
        digits = static_cast<int>(std::floor(mpfr_get_prec(v_) * 0.30103)) - 1;
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Re", digits, v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

#define P2MU_UNARY(name, fn)                          \
    Real name(const Real& x) {                        \
        Real r;                                       \
        fn(r.raw(), x.raw(), MPFR_RNDN);              \
        return r;                                     \
    }

P2MU_UNARY(abs, mpfr_abs)
P2MU_UNARY(sqrt, mpfr_sqrt)
P2MU_UNARY(exp, mpfr_exp)
P2MU_UNARY(expm1, mpfr_expm1)
P2MU_UNARY(log, mpfr_log)
P2MU_UNARY(log1p, mpfr_log1p)
P2MU_UNARY(log2, mpfr_log2)
P2MU_UNARY(sin, mpfr_sin)
P2MU_UNARY(cos, mpfr_cos)
P2MU_UNARY(atan, mpfr_atan)
#undef P2MU_UNARY

Real floor(const Real& x) {
    Real r;
    mpfr_floor(r.raw(), x.raw());
    return r;
}

Real ceil(const Real& x) {
    Real r;
    mpfr_ceil(r.raw(), x.raw());
    return r;
}

Real atan2(const Real& y, const Real& x) {
    Real r;
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}

Real pow(const Real& base, const Real& e) {
    Real r;
    mpfr_pow(r.raw(), base.raw(), e.raw(), MPFR_RNDN);
    return r;
}

Real pow(const Real& base, long e) {
    Real r;
    mpfr_pow_si(r.raw(), base.raw(), e, MPFR_RNDN);
    return r;
}

Real hypot(const Real& x, const Real& y) {
    Real r;
    mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

Real min(const Real& a, const Real& b) { return a <= b ? a : b; }
Real max(const Real& a, const Real& b) { return a >= b ? a : b; }

void sincos_turn(const Real& t, Real& c, Real& s) {
    // Reduce t mod 1 before scaling by 2*pi so large inputs keep full accuracy.
    Real u = t - floor(t);
    Real ang = Real(2L) * Real::pi() * u;
    mpfr_sin_cos(s.raw(), c.raw(), ang.raw(), MPFR_RNDN);
}

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(); }

Rat::Rat(long n, long d) {
    if (d == 0) throw std::invalid_argument("Rat: zero denominator");
    mpq_init(v_);
    mpq_set_si(v_, n, 1);
    mpq_t den;
    mpq_init(den);
    mpq_set_si(den, d, 1);
    mpq_div(v_, v_, den);
    mpq_clear(den);
}

Rat Rat::from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("Rat: non-finite double");
    Rat r;
    mpq_set_d(r.v_, x);
    return r;
}

Rat Rat::from_real(const Real& x) {
    if (!x.is_finite()) throw std::invalid_argument("Rat: non-finite Real");
    Rat r;
    mpfr_get_q(r.v_, x.raw());
    return r;
}

Rat Rat::parse(const std::string& s) {
    Rat r;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        if (mpq_set_str(r.v_, s.c_str(), 10) != 0)
            throw std::invalid_argument("Rat: cannot parse '" + s + "'");
        mpq_canonicalize(r.v_);
        return r;
    }
    // Decimal / scientific notation: parse exactly via digits and exponent.
    std::string t = s;
    long exp10 = 0;
    auto epos = t.find_first_of("eE");
    if (epos != std::string::npos) {
        exp10 = std::stol(t.substr(epos + 1));
        t = t.substr(0, epos);
    }
    auto dot = t.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<long>(t.size() - dot - 1);
        t.erase(dot, 1);
    }
    if (t.empty() || t == "-" || t == "+") throw std::invalid_argument("Rat: cannot parse '" + s + "'");
    mpz_t num;
    mpz_init(num);
    if (mpz_set_str(num, t.c_str(), 10) != 0) {
        mpz_clear(num);
        throw std::invalid_argument("Rat: cannot parse '" + s + "'");
    }
    mpq_set_z(r.v_, num);
    mpz_clear(num);
    mpz_t p;
    mpz_init(p);
    mpz_ui_pow_ui(p, 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    if (exp10 >= 0)
        mpz_mul(mpq_numref(r.v_), mpq_numref(r.v_), p);
    else
        mpz_mul(mpq_denref(r.v_), mpq_denref(r.v_), p);
    mpz_clear(p);
    mpq_canonicalize(r.v_);
    return r;
}

Rat Rat::pow2(long e) {
    Rat r(1L);
    if (e >= 0)
        mpz_mul_2exp(mpq_numref(r.v_), mpq_numref(r.v_), static_cast<mp_bitcnt_t>(e));
    else
        mpz_mul_2exp(mpq_denref(r.v_), mpq_denref(r.v_), static_cast<mp_bitcnt_t>(-e));
    mpq_canonicalize(r.v_);
    return r;
}

long Rat::floor_long() const {
    mpz_t q;
    mpz_init(q);
    mpz_fdiv_q(q, mpq_numref(v_), mpq_denref(v_));
    long out = mpz_get_si(q);
    mpz_clear(q);
    return out;
}

Rat Rat::frac() const {
    Rat f(*this);
    Rat fl(floor_long());
    f -= fl;
    return f;
}

std::string Rat::str() const {
    char* s = mpq_get_str(nullptr, 10, v_);
    std::string out(s);
    void (*freefn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(s, out.size() + 1);
    return out;
}

Rat abs(const Rat& x) { return x.sign() < 0 ? -x : x; }
Rat min(const Rat& a, const Rat& b) { return a <= b ? a : b; }
Rat max(const Rat& a, const Rat& b) { return a >= b ? a : b; }

std::ostream& operator<<(std::ostream& os, const Rat& x) { return os << x.str(); }

Complex Complex::unit_turn(const Real& t) {
    Complex z;
    sincos_turn(t, z.re, z.im);
    return z;
}

Complex exp(const Complex& z) {
    Real m = exp(z.re);
    Real c, s;
    mpfr_sin_cos(s.raw(), c.raw(), z.im.raw(), MPFR_RNDN);
    return Complex(m * c, m * s);
}

}  // namespace p2mu
