#pragma once

#include <gmp.h>
#include <mpfr.h>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

namespace p2mu {

/// Process-global working precision in bits. Every arithmetic result is
/// rounded to this precision (MPFR round-to-nearest). Set it once per run,
/// before any computation; values created earlier keep their own precision.
mpfr_prec_t working_precision();
void set_working_precision(mpfr_prec_t bits);

class Rat;

/// Arbitrary-precision real backed by mpfr_t. Copyable, movable, RAII.
class Real {
  public:
    Real() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
    Real(double x) { mpfr_init2(v_, working_precision()); mpfr_set_d(v_, x, MPFR_RNDN); }
    Real(long x) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, x, MPFR_RNDN); }
    Real(int x) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, x, MPFR_RNDN); }
    explicit Real(const Rat& q);
    explicit Real(const std::string& decimal);

    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, MPFR_PREC_MIN); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
        return *this;
    }
    Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    static Real pi();
    static Real inf(int sign = 1);
    static Real nan();
    /// 2^e as an exact Real (useful for tolerances like 2^-prec/2).
    static Real pow2(long e);

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    /// Decimal string with `digits` significant digits (default: full working
    /// precision). Deterministic for fixed precision.
    std::string str(int digits = -1) const;

    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(long k) { mpfr_mul_si(v_, v_, k, MPFR_RNDN); return *this; }
    Real& operator/=(long k) { mpfr_div_si(v_, v_, k, MPFR_RNDN); return *this; }

    Real operator-() const { Real r(*this); mpfr_neg(r.v_, r.v_, MPFR_RNDN); return r; }

    friend Real operator+(Real a, const Real& b) { a += b; return a; }
    friend Real operator-(Real a, const Real& b) { a -= b; return a; }
    friend Real operator*(Real a, const Real& b) { a *= b; return a; }
    friend Real operator/(Real a, const Real& b) { a /= b; return a; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }

    /// *this += a*b with a single rounding.
    void add_prod(const Real& a, const Real& b) { mpfr_fma(v_, a.v_, b.v_, v_, MPFR_RNDN); }
    /// *this -= a*b with a single rounding.
    void sub_prod(const Real& a, const Real& b) { mpfr_fms(v_, a.v_, b.v_, v_, MPFR_RNDN); mpfr_neg(v_, v_, MPFR_RNDN); }

  private:
    mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real expm1(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real log2(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real atan(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& base, const Real& e);
Real pow(const Real& base, long e);
Real floor(const Real& x);
Real ceil(const Real& x);
Real hypot(const Real& x, const Real& y);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
/// cos(2*pi*t), sin(2*pi*t) for t in turns.
void sincos_turn(const Real& t, Real& c, Real& s);

std::ostream& operator<<(std::ostream& os, const Real& x);

/// Exact rational backed by mpq_t. Used wherever endpoint arithmetic must be
/// exact (arcs, Cantor gap schedules, measure accounting).
class Rat {
  public:
    Rat() { mpq_init(v_); }
    Rat(long n) { mpq_init(v_); mpq_set_si(v_, n, 1); }
    Rat(int n) { mpq_init(v_); mpq_set_si(v_, n, 1); }
    Rat(long n, long d);
    /// Exact conversion: every finite double is a dyadic rational.
    static Rat from_double(double x);
    /// Exact conversion from a finite Real (dyadic rational).
    static Rat from_real(const Real& x);
    /// Parses "3/4", "0.25", "-1.5e-3" exactly.
    static Rat parse(const std::string& s);
    /// 2^e exactly (e may be negative).
    static Rat pow2(long e);

    Rat(const Rat& o) { mpq_init(v_); mpq_set(v_, o.v_); }
    Rat(Rat&& o) noexcept { mpq_init(v_); mpq_swap(v_, o.v_); }
    Rat& operator=(const Rat& o) { if (this != &o) mpq_set(v_, o.v_); return *this; }
    Rat& operator=(Rat&& o) noexcept { mpq_swap(v_, o.v_); return *this; }
    ~Rat() { mpq_clear(v_); }

    mpq_ptr raw() { return v_; }
    mpq_srcptr raw() const { return v_; }

    double to_double() const { return mpq_get_d(v_); }
    std::string str() const;
    int sign() const { return mpq_sgn(v_); }
    bool is_zero() const { return mpq_sgn(v_) == 0; }

    /// Largest integer <= *this.
    long floor_long() const;
    /// *this - floor(*this), in [0,1).
    Rat frac() const;

    Rat& operator+=(const Rat& o) { mpq_add(v_, v_, o.v_); return *this; }
    Rat& operator-=(const Rat& o) { mpq_sub(v_, v_, o.v_); return *this; }
    Rat& operator*=(const Rat& o) { mpq_mul(v_, v_, o.v_); return *this; }
    Rat& operator/=(const Rat& o) { mpq_div(v_, v_, o.v_); return *this; }

    Rat operator-() const { Rat r(*this); mpq_neg(r.v_, r.v_); return r; }

    friend Rat operator+(Rat a, const Rat& b) { a += b; return a; }
    friend Rat operator-(Rat a, const Rat& b) { a -= b; return a; }
    friend Rat operator*(Rat a, const Rat& b) { a *= b; return a; }
    friend Rat operator/(Rat a, const Rat& b) { a /= b; return a; }

    friend bool operator<(const Rat& a, const Rat& b) { return mpq_cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(const Rat& a, const Rat& b) { return mpq_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>(const Rat& a, const Rat& b) { return mpq_cmp(a.v_, b.v_) > 0; }
    friend bool operator>=(const Rat& a, const Rat& b) { return mpq_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const Rat& a, const Rat& b) { return mpq_equal(a.v_, b.v_) != 0; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

  private:
    mpq_t v_;
};

Rat abs(const Rat& x);
Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);

std::ostream& operator<<(std::ostream& os, const Rat& x);

struct Complex {
    Real re, im;

    Complex() = default;
    Complex(Real r) : re(std::move(r)), im(0L) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(double r, double i = 0.0) : re(r), im(i) {}

    static Complex unit_turn(const Real& t);  // e^{2 pi i t}

    Complex conj() const { return Complex(re, -im); }
    Real norm() const { return re * re + im * im; }
    Real abs() const { return hypot(re, im); }
    Real arg() const { return atan2(im, re); }

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Real& s) { re *= s; im *= s; return *this; }
    Complex& operator/=(const Real& s) { re /= s; im /= s; return *this; }

    friend Complex operator+(Complex a, const Complex& b) { a += b; return a; }
    friend Complex operator-(Complex a, const Complex& b) { a -= b; return a; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return Complex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend Complex operator*(Complex a, const Real& s) { a *= s; return a; }
    friend Complex operator*(const Real& s, Complex a) { a *= s; return a; }
    friend Complex operator/(const Complex& a, const Complex& b) {
        Real n = b.norm();
        return Complex((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
    }
    Complex operator-() const { return Complex(-re, -im); }

    /// *this += a*b (complex fused accumulate, four real fma).
    void add_prod(const Complex& a, const Complex& b) {
        re.add_prod(a.re, b.re); re.sub_prod(a.im, b.im);
        im.add_prod(a.re, b.im); im.add_prod(a.im, b.re);
    }
    /// *this += a*conj(b).
    void add_prod_conj(const Complex& a, const Complex& b) {
        re.add_prod(a.re, b.re); re.add_prod(a.im, b.im);
        im.add_prod(a.im, b.re); im.sub_prod(a.re, b.im);
    }
};

Complex exp(const Complex& z);

}  // namespace p2mu
