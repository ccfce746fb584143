#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "p2mu/moments.hpp"
#include "p2mu/poisson.hpp"
#include "p2mu/quadrature.hpp"

using namespace p2mu;

namespace {

// Direct quadrature oracle for the Herglotz transform of an arc.
Complex herglotz_oracle(const Arc& I, const Complex& z, int panels, int order) {
    auto re = integrate_composite(
        [&](const Real& t) {
            Complex xi = Complex::unit_turn(t);
            return ((xi + z) / (xi - z)).re;
        },
        Real(I.start), Real(I.end()), panels, order);
    auto im = integrate_composite(
        [&](const Real& t) {
            Complex xi = Complex::unit_turn(t);
            return ((xi + z) / (xi - z)).im;
        },
        Real(I.start), Real(I.end()), panels, order);
    return Complex(re, im);
}

}  // namespace

TEST_SUITE_BEGIN("poisson");

TEST_CASE("herglotz: mean value, measure at 0, additivity") {
    set_working_precision(128);
    // full circle: 1 for every z
    for (double re : {0.0, 0.3, -0.7}) {
        Complex z(re, 0.21);
        Complex h = herglotz_arc(Arc(Rat(0L), Rat(1L)), z);
        CHECK(abs(h.re - Real(1L)) < Real(1e-35));
        CHECK(abs(h.im) < Real(1e-35));
    }
    // H_I(0) = |I|
    Arc I(Rat(1L, 10L), Rat(3L, 10L));
    Complex h0 = herglotz_arc(I, Complex(Real(0L), Real(0L)));
    CHECK(abs(h0.re - Real(Rat(3L, 10L))) < Real(1e-35));
    CHECK(abs(h0.im) < Real(1e-35));

    // additivity against a direct quadrature oracle at z = 0.5
    Arc J(Rat(2L, 5L), Rat(1L, 5L));  // adjacent to I
    Complex z(Real(0.5), Real(0L));
    Complex sum = herglotz_arc(I, z) + herglotz_arc(J, z);
    Arc U(Rat(1L, 10L), Rat(1L, 2L));
    Complex direct = herglotz_arc(U, z);
    CHECK((sum - direct).abs() < Real(1e-30));
    Complex oracle = herglotz_oracle(U, z, 64, 31);
    CHECK((direct - oracle).abs() < Real(1e-12));

    // positivity of the real part (Poisson mass)
    CHECK(herglotz_arc(I, Complex(Real(0.83), Real(-0.4))).re > Real(0L));

    // wrapping arcs agree with their unwrapped pieces
    Arc W(Rat(9L, 10L), Rat(1L, 5L));
    Complex hw = herglotz_arc(W, z);
    Complex hw2 = herglotz_arc(Arc(Rat(9L, 10L), Rat(1L, 10L)), z) +
                  herglotz_arc(Arc(Rat(0L), Rat(1L, 10L)), z);
    CHECK((hw - hw2).abs() < Real(1e-33));

    // branch guard near the circle
    CHECK_THROWS_AS(herglotz_arc(I, Complex(Real(1L) - Real::pow2(-80), Real(0L))),
                    std::domain_error);
}

TEST_CASE("poisson integral of step profiles") {
    set_working_precision(128);
    // f == 1: P_f == 1
    StepProfile one({{Arc(Rat(0L), Rat(1L)), Real(1L)}});
    CHECK(abs(poisson_integral(one, Complex(Real(0.37), Real(0.11))) - Real(1L)) < Real(1e-33));

    // mean-zero profile: P_f(0) = 0
    StepProfile pm(
        {{Arc(Rat(0L), Rat(1L, 2L)), Real(1L)}, {Arc(Rat(1L, 2L), Rat(1L, 2L)), Real(-1L)}});
    CHECK(abs(pm.mean()) < Real(1e-35));
    CHECK(abs(poisson_integral(pm, Complex(Real(0L), Real(0L)))) < Real(1e-33));

    // z = 0.9 against a 4096-node quadrature oracle
    Complex z(Real(0.9), Real(0L));
    Real direct = poisson_integral(pm, z);
    auto kernel_int = [&](const Arc& a) {
        return integrate_composite([&](const Real& t) { return poisson_kernel(z, t); },
                                   Real(a.start), Real(a.end()), 64,
                                   32);  // 2048 nodes per half, 4096 total
    };
    Real oracle = kernel_int(Arc(Rat(0L), Rat(1L, 2L))) - kernel_int(Arc(Rat(1L, 2L), Rat(1L, 2L)));
    CHECK(abs(direct - oracle) < Real(1e-10));

    // positivity: f >= 0 implies P_f >= 0
    StepProfile pos({{Arc(Rat(1L, 8L), Rat(1L, 16L)), Real(2L)}});
    for (double rr : {0.0, 0.5, 0.99}) {
        for (int a = 0; a < 8; ++a) {
            Complex zz = Complex::unit_turn(Real(Rat(a, 8L))) * Real(rr);
            CHECK(poisson_integral(pos, zz) >= Real(0L));
        }
    }
}

TEST_CASE("variation sum check") {
    set_working_precision(128);
    // full circle: var = (1+r)/(1-r) - (1-r)/(1+r)
    Real r(0.5);
    VariationCheck v = variation_sum_check({Arc(Rat(0L), Rat(1L))}, r);
    Real expected = (Real(1L) + r) / (Real(1L) - r) - (Real(1L) - r) / (Real(1L) + r);
    CHECK(abs(v.sum - expected) < Real(1e-12));
    CHECK(v.ok);
    CHECK(abs(v.bound - Real(8L)) < Real(1e-30));

    // r = 0: kernel is constant, variation 0
    VariationCheck v0 =
        variation_sum_check({Arc(Rat(0L), Rat(1L, 4L)), Arc(Rat(1L, 2L), Rat(1L, 8L))}, Real(0L));
    CHECK(v0.sum == Real(0L));
    CHECK(v0.ok);

    // seeded random families (a slice of the acceptance audit)
    std::mt19937_64 rng(0xC0FFEE);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int fam = 0; fam < 40; ++fam) {
        int m = 1 + (int)(rng() % 50);
        std::vector<double> pts;
        for (int i = 0; i < 2 * m; ++i) pts.push_back(unif(rng));
        std::sort(pts.begin(), pts.end());
        std::vector<Arc> arcs;
        for (int i = 0; i + 1 < 2 * m; i += 2)
            if (pts[i + 1] > pts[i])
                arcs.emplace_back(Rat::from_double(pts[i]), Rat::from_double(pts[i + 1] - pts[i]));
        for (double rd : {0.0, 0.9, 0.99, 0.999}) {
            VariationCheck vc = variation_sum_check(arcs, Real(rd));
            CHECK(vc.ok);
        }
    }
}

TEST_CASE("outer functions: modulus law and boundary fidelity") {
    set_working_precision(128);
    // f == 0: g == 1
    StepProfile zero;
    OuterValue g0 = outer_eval(zero, Complex(Real(0.4), Real(0.22)));
    CHECK((g0.value() - Complex(Real(1L), Real(0L))).abs() < Real(1e-35));

    // mean-zero f: |g(0)| = 1
    StepProfile pm(
        {{Arc(Rat(0L), Rat(1L, 2L)), Real(1L)}, {Arc(Rat(1L, 2L), Rat(1L, 2L)), Real(-1L)}});
    OuterValue gc = outer_eval(pm, Complex(Real(0L), Real(0L)));
    CHECK(abs(gc.log_modulus()) < Real(1e-33));

    // modulus law |g(z)| = exp(P_f(z)) to a few ulps
    for (double rr : {0.2, 0.8, 0.999}) {
        Complex z = Complex::unit_turn(Real(0.3)) * Real(rr);
        OuterValue g = outer_eval(pm, z);
        Real P = poisson_integral(pm, z);
        CHECK(abs(g.log_modulus() - P) <= abs(P) * Real::pow2(-120) + Real::pow2(-120));
    }

    // radial boundary fidelity: |g(rho e^{2 pi i t})| -> exp(f(t)) at interior
    // points, error <= 1e-6 at rho = 1 - 1e-8
    Real rho = Real(1L) - Real(1e-8);
    for (const Rat& t : {Rat(1L, 4L), Rat(3L, 4L), Rat(1L, 8L), Rat(5L, 8L)}) {
        Complex z = Complex::unit_turn(Real(t)) * rho;
        OuterValue g = outer_eval(pm, z);
        Real err = abs(g.log_modulus() - pm.value_at(t));
        CHECK(err < Real(1e-6));
    }
}

TEST_CASE("analytic cusp pieces in profiles") {
    set_working_precision(128);
    // value(t) = dist(t, 1/2)^{-1} on [5/8, 3/4): closed-form integral vs quadrature
    InvPowerPiece piece{Arc(Rat(5L, 8L), Rat(1L, 8L)), Rat(1L, 2L), Rat(1L), Real(1L)};
    Real closed = piece.integral();
    CHECK(abs(closed - (log(Real(0.25)) - log(Real(0.125)))) < Real(1e-33));
    auto q = integrate_adaptive([&](const Real& t) { return piece.value(t); }, Real(Rat(5L, 8L)),
                                Real(Rat(3L, 4L)), Real(1e-30), Real(1e-34));
    CHECK(abs(closed - q.value) < Real(1e-28));

    StepProfile prof({{Arc(Rat(0L), Rat(1L, 8L)), Real(-2L)}}, {piece});
    Real mean = prof.recompute_mean();
    CHECK(abs(mean - (closed - Real(0.25))) < Real(1e-30));
    // Poisson at 0 equals the mean
    CHECK(abs(poisson_integral(prof, Complex(Real(0L), Real(0L))) - mean) < Real(1e-25));
}

TEST_CASE("log modulus profiles") {
    set_working_precision(128);
    // w == 1 on I: zero profile, u == 1
    BoundaryWeight one = BoundaryWeight::constant(Rat(1L));
    LogModulusResult r1 = log_modulus_profile(one, Arc(Rat(0L), Rat(1L, 4L)), 16);
    CHECK(r1.profile.steps().empty());
    OuterValue u1 = outer_eval(r1.profile, Complex(Real(0.1), Real(0.2)));
    CHECK((u1.value() - Complex(Real(1L), Real(0L))).abs() < Real(1e-35));

    // w == c < 1 on I with |I| = 1/4: |u(0)| = c^{1/4}
    BoundaryWeight wc({{Arc(Rat(0L), Rat(1L, 4L)), ConstProfile{Rat(1L, 3L)}},
                       {Arc(Rat(1L, 4L), Rat(3L, 4L)), ConstProfile{Rat(1L)}}});
    LogModulusResult r2 = log_modulus_profile(wc, Arc(Rat(0L), Rat(1L, 4L)), 16);
    OuterValue u2 = outer_eval(r2.profile, Complex(Real(0L), Real(0L)));
    Real expected = exp(log(Real(1L) / Real(3L)) / Real(4L));
    CHECK(abs(u2.value().abs() - expected) < Real(1e-30));
    CHECK(r2.l1_error == Real(0L));  // piecewise-constant w is exact

    // power-cusp: L1 error roughly halves when resolution doubles
    BoundaryWeight wp({{Arc(Rat(0L), Rat(1L)), PowerCuspProfile{Rat(1L, 2L), Rat(2L), Rat(1L)}}});
    Arc I(Rat(1L, 4L), Rat(1L, 2L));
    Real prev_err(0L);
    for (int resolution : {8, 16, 32, 64}) {
        LogModulusResult r = log_modulus_profile(wp, I, resolution);
        CHECK(r.l1_error > Real(0L));
        if (prev_err > Real(0L)) {
            Real ratio = r.l1_error / prev_err;
            CHECK(ratio < Real(0.65));
            CHECK(ratio > Real(0.3));
        }
        prev_err = r.l1_error;
    }
    {
        // u reproduces min(w,1) at the boundary up to the discretization scale
        LogModulusResult r = log_modulus_profile(wp, I, 64);
        Rat t(3L, 8L);
        Real rho = Real(1L) - Real(1e-8);
        OuterValue u = outer_eval(r.profile, Complex::unit_turn(Real(t)) * rho);
        Real target = log(min(wp.eval(t).value, Real(1L)));
        CHECK(abs(u.log_modulus() - target) < Real(1e-3));
    }

    // divergent overlap: precondition fails
    auto set = FatCantorSet::geometric(Arc(Rat(0L), Rat(1L)), Rat(1L, 2L));
    BoundaryWeight wk({{Arc(Rat(0L), Rat(1L)), CantorIndicatorProfile{set, Rat(1L), 8}}});
    CHECK_THROWS_AS(log_modulus_profile(wk, Arc(Rat(0L), Rat(1L, 8L)), 8), std::domain_error);
}

TEST_SUITE_END();
