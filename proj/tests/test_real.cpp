#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "p2mu/real.hpp"

using namespace p2mu;

TEST_SUITE_BEGIN("real");

TEST_CASE("working precision round trip") {
    set_working_precision(128);
    CHECK(working_precision() == 128);
    CHECK_THROWS_AS(set_working_precision(32), std::invalid_argument);
    set_working_precision(128);
}

TEST_CASE("basic arithmetic and functions") {
    set_working_precision(128);
    Real a(2L), b(3L);
    CHECK((a + b).to_double() == doctest::Approx(5.0));
    CHECK((a / b).to_double() == doctest::Approx(2.0 / 3.0));
    CHECK(sqrt(Real(2L)).to_double() == doctest::Approx(std::sqrt(2.0)));
    CHECK(exp(Real(1L)).to_double() == doctest::Approx(M_E));
    CHECK(abs(log(exp(Real(3L))) - Real(3L)) < Real::pow2(-120));
    CHECK(Real::pi().to_double() == doctest::Approx(M_PI));
    Real c, s;
    sincos_turn(Real(Rat(1L, 4L)), c, s);
    CHECK(abs(c) < Real::pow2(-120));
    CHECK(abs(s - Real(1L)) < Real::pow2(-120));
}

TEST_CASE("fused accumulate") {
    set_working_precision(128);
    Real acc(1L);
    acc.add_prod(Real(3L), Real(4L));
    CHECK(acc == Real(13L));
    acc.sub_prod(Real(2L), Real(5L));
    CHECK(acc == Real(3L));
}

TEST_CASE("rationals are exact") {
    Rat third(1L, 3L);
    Rat sum = third + third + third;
    CHECK(sum == Rat(1L));
    CHECK(Rat::parse("0.125") == Rat(1L, 8L));
    CHECK(Rat::parse("3/4") == Rat(3L, 4L));
    CHECK(Rat::parse("-1.5e-3") == Rat(-3L, 2000L));
    CHECK(Rat::pow2(-3) == Rat(1L, 8L));
    CHECK(Rat::from_double(0.5) == Rat(1L, 2L));
    CHECK(Rat(7L, 3L).frac() == Rat(1L, 3L));
    CHECK(Rat(-1L, 4L).frac() == Rat(3L, 4L));
    set_working_precision(96);
    Real x = sqrt(Real(2L));
    CHECK(Real(Rat::from_real(x)) == x);
    set_working_precision(128);
}

TEST_CASE("complex helpers") {
    set_working_precision(128);
    Complex z = Complex::unit_turn(Real(Rat(1L, 8L)));
    CHECK(abs(z.abs() - Real(1L)) < Real::pow2(-120));
    CHECK(z.arg().to_double() == doctest::Approx(M_PI / 4));
    Complex w = z * z.conj();
    CHECK(abs(w.re - Real(1L)) < Real::pow2(-120));
    CHECK(abs(w.im) < Real::pow2(-120));
    Complex e = exp(Complex(Real(0L), Real::pi()));
    CHECK(abs(e.re + Real(1L)) < Real::pow2(-120));
}

TEST_CASE("deterministic decimal rendering") {
    set_working_precision(128);
    Real x = Real(1L) / Real(7L);
    CHECK(x.str() == (Real(1L) / Real(7L)).str());
    CHECK(x.str(10) == "1.4285714286e-01");
}

TEST_SUITE_END();
