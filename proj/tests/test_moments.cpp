#include <doctest.h>

#include <cmath>

#include "p2mu/moments.hpp"
#include "p2mu/quadrature.hpp"

using namespace p2mu;

namespace {

// Independent oracle: 2 B(2n+2, beta+1) via lngamma.
Real beta_moment_oracle(long n, const Rat& beta) {
    auto lg = [](const Real& x) {
        Real r;
        int sign = 0;
        mpfr_lgamma(r.raw(), &sign, x.raw(), MPFR_RNDN);
        return r;
    };
    Real a(2 * n + 2), b = Real(beta) + Real(1L);
    Real logB = lg(a) + lg(b) - lg(a + b);
    return Real(2L) * exp(logB);
}

}  // namespace

TEST_SUITE_BEGIN("moments");

TEST_CASE("alpha_moment matches the Beta closed form") {
    set_working_precision(128);
    // power beta=1, n=0: 2(1/2 - 1/3) = 1/3
    RadialWeight g1 = RadialWeight::power(Rat(1L));
    ValueWithError a0 = alpha_moment(g1, 0);
    CHECK(abs(a0.value - Real(Rat(1L, 3L))) < Real(1e-30));

    // beta = 0 test-only constant family: alpha_n = 1/(n+1)
    RadialWeight g0 = RadialWeight::power(Rat(0L));
    for (long n : {0L, 1L, 7L, 40L}) {
        ValueWithError a = alpha_moment(g0, n);
        CHECK(abs(a.value - Real(1L) / Real(n + 1)) < Real(1e-30));
    }

    // oracle comparison across betas at a few n
    for (long beta : {0L, 1L, 2L, 5L}) {
        RadialWeight g = RadialWeight::power(Rat(beta));
        for (long n : {0L, 3L, 17L, 60L}) {
            ValueWithError a = alpha_moment(g, n);
            Real oracle = beta_moment_oracle(n, Rat(beta));
            CHECK(abs(a.value - oracle) / oracle < Real(1e-30));
        }
    }
}

TEST_CASE("alpha_moment strictly decreasing, positive") {
    set_working_precision(128);
    RadialWeight g = RadialWeight::expdec(Rat(1L));
    Real prev = Real::inf();
    for (long n = 0; n <= 12; ++n) {
        ValueWithError a = alpha_moment(g, n);
        CHECK(a.value > Real(0L));
        CHECK(a.value < prev);
        CHECK(a.error < a.value * Real::pow2(-60));
        prev = a.value;
    }
}

TEST_CASE("P identity and endpoints") {
    set_working_precision(128);
    RadialWeight g = RadialWeight::expdec(Rat(1L));
    // P(0) = int_0^1 G(1-r) dr
    ValueWithError p0 = moment_P(g, Real(0L));
    auto direct = integrate_adaptive([&](const Real& u) { return g.eval_raw(u); }, Real(0L),
                                     Real(1L), Real(1e-30), Real(1e-36));
    CHECK(abs(p0.value - direct.value) < Real(1e-28));

    // P(2n+1) = alpha_n / 2, P even, P decreasing
    for (long n : {0L, 1L, 5L, 20L}) {
        ValueWithError a = alpha_moment(g, n);
        ValueWithError p = moment_P(g, Real(2 * n + 1));
        CHECK(abs(p.value - a.value / Real(2L)) <= p.error + a.error / Real(2L) + Real(1e-34));
    }
    CHECK(moment_P(g, Real(-3L)).value == moment_P(g, Real(3L)).value);
    CHECK(moment_P(g, Real(5L)).value < moment_P(g, Real(2L)).value);
}

TEST_CASE("envelope against the calculus oracle") {
    set_working_precision(128);
    RadialWeight g = RadialWeight::expdec(Rat(1L));
    // x = 4: k = 4 at y = 1/2; x = 100: k = 20 at y = 0.1
    EnvelopeValue e4 = envelope_k(g, Real(4L));
    CHECK(abs(e4.k - Real(4L)) < Real(1e-30));
    CHECK(abs(e4.argmin_y - Real(Rat(1L, 2L))) < Real::pow2(-64));
    EnvelopeValue e100 = envelope_k(g, Real(100L));
    CHECK(abs(e100.k - Real(20L)) < Real(1e-30));
    CHECK(abs(e100.argmin_y - Real(Rat(1L, 10L))) < Real::pow2(-64));
    // x = 0.5 < 1: boundary argmin y = 1, k = m(1) + x = 1.5
    EnvelopeValue ehalf = envelope_k(g, Real(0.5));
    CHECK(ehalf.argmin_y == Real(1L));
    CHECK(abs(ehalf.k - Real(1.5)) < Real(1e-30));
    // k(x) = 2 sqrt(x) on x >= 1
    for (double x : {1.5, 7.0, 300.0, 12345.0}) {
        EnvelopeValue e = envelope_k(g, Real(x));
        CHECK(abs(e.k - Real(2L) * sqrt(Real(x))) < Real(1e-25));
    }
}

TEST_CASE("envelope domination on random audit points") {
    set_working_precision(128);
    for (const RadialWeight& g :
         {RadialWeight::expdec(Rat(2L)), RadialWeight::stretched_exp(Rat(1L), Rat(1L, 2L)),
          RadialWeight::double_exp(Rat(1L))}) {
        for (double x : {0.7, 3.0, 55.0}) {
            EnvelopeValue e = envelope_k(g, Real(x));
            std::uint64_t state = 0x9e3779b97f4a7c15ULL;
            for (int i = 0; i < 100; ++i) {
                state = state * 6364136223846793005ULL + 1442695040888963407ULL;
                double y = ((state >> 11) + 1.0) / 9007199254740993.0;
                Real yy(y);
                CHECK(e.k <= g.m(yy) + yy * Real(x) + Real(1e-25));
            }
        }
    }
}

TEST_CASE("k quotient integral: closed-form oracle for expdec") {
    set_working_precision(128);
    RadialWeight g = RadialWeight::expdec(Rat(1L));
    KQuotientResult kq = k_quotient_integral(g);
    REQUIRE(kq.finite);

    // oracle: k(x) = 1 + x for x <= 1 (boundary argmin), 2 sqrt(x) after.
    //   int_0^1 (1+x)/(1+x^2) dx = pi/4 + log(2)/2
    //   int_1^inf 2 sqrt(x)/(1+x^2) dx = int_0^1 4/(1+u^4) du   (u = 1/sqrt(x))
    Real piece1 = Real::pi() / Real(4L) + log(Real(2L)) / Real(2L);
    auto tail = integrate_adaptive(
        [](const Real& u) { return Real(4L) / (Real(1L) + pow(u, 4L)); }, Real(0L), Real(1L),
        Real(1e-34), Real(1e-38));
    Real oracle = piece1 + tail.value;
    CHECK(abs(kq.value - oracle) <= kq.error + Real(1e-8));

    // classical identity check of the same machinery:
    //   int_0^inf 2 sqrt(x)/(1+x^2) dx = pi sqrt(2)
    auto head = integrate_adaptive(
        [](const Real& t) { return Real(4L) * t * t / (Real(1L) + pow(t, 4L)); }, Real(0L),
        Real(1L), Real(1e-34), Real(1e-38));
    CHECK(abs(head.value + tail.value - Real::pi() * sqrt(Real(2L))) < Real(1e-30));

    // double-exp: divergent, flagged analytically
    KQuotientResult dq = k_quotient_integral(RadialWeight::double_exp(Rat(1L)));
    CHECK_FALSE(dq.finite);
    CHECK(dq.value.is_inf());

    // degenerate constant table: k == 0
    RadialWeight flat = RadialWeight::custom_table(
        {{Rat(1L, 100L), Rat(1L)}, {Rat(1L, 2L), Rat(1L)}, {Rat(1L), Rat(1L)}});
    KQuotientResult fq = k_quotient_integral(flat);
    CHECK(fq.finite);
    CHECK(abs(fq.value) < Real(1e-6));
}

TEST_CASE("P lower bound on the guarded grid") {
    set_working_precision(128);
    RadialWeight g = RadialWeight::expdec(Rat(1L));
    std::vector<Real> xs{Real(10L), Real(100L), Real(1000L), Real(10000L)};
    auto rows = verify_P_lower_bound(g, xs);
    for (const auto& row : rows) {
        CHECK(row.precondition_met);
        CHECK(row.holds);
        CHECK(row.margin > Real(0L));
    }
    // precondition unmet: argmin_y(2x) >= 1/2 for x = 1 (y* = 1/sqrt(2) > 1/2)
    auto guard = verify_P_lower_bound(g, {Real(1L)});
    CHECK_FALSE(guard[0].precondition_met);
    CHECK_FALSE(guard[0].holds);
}

TEST_CASE("fourier coefficients: orthogonality, arcs, hermitian symmetry") {
    set_working_precision(128);
    BoundaryWeight one = BoundaryWeight::constant(Rat(1L));
    FourierCoeff f0 = fourier_w(one, 0);
    CHECK(abs(f0.value.re - Real(1L)) < Real(1e-35));
    for (long k : {1L, 2L, 9L}) {
        FourierCoeff fk = fourier_w(one, k);
        CHECK(fk.value.abs() < Real(1e-35));
    }

    // w = 1 on an arc of measure 1/4 starting at 0: quadrature oracle
    BoundaryWeight arcw({{Arc(Rat(0L), Rat(1L, 4L)), ConstProfile{Rat(1L)}}});
    FourierCoeff f1 = fourier_w(arcw, 1);
    auto ore = integrate_adaptive(
        [](const Real& t) {
            Real c, s;
            sincos_turn(-t, c, s);
            return c;
        },
        Real(0L), Real(Rat(1L, 4L)), Real(1e-34), Real(1e-38));
    auto oim = integrate_adaptive(
        [](const Real& t) {
            Real c, s;
            sincos_turn(-t, c, s);
            return s;
        },
        Real(0L), Real(Rat(1L, 4L)), Real(1e-34), Real(1e-38));
    CHECK(abs(f1.value.re - ore.value) < Real(1e-30));
    CHECK(abs(f1.value.im - oim.value) < Real(1e-30));

    // hermitian symmetry and |hat w(k)| <= hat w(0) for a mixed weight
    auto set = FatCantorSet::geometric(Arc(Rat(0L), Rat(1L, 2L)), Rat(1L, 4L));
    BoundaryWeight mixed({{Arc(Rat(0L), Rat(1L, 2L)), CantorIndicatorProfile{set, Rat(2L), 10}},
                          {Arc(Rat(1L, 2L), Rat(1L, 4L)), ConstProfile{Rat(1L, 2L)}}});
    Real mass = total_mass(mixed).value;
    for (long k : {1L, 3L, 11L, 40L}) {
        FourierCoeff fp = fourier_w(mixed, k);
        FourierCoeff fm = fourier_w(mixed, -k);
        CHECK(abs(fp.value.re - fm.value.re) < Real(1e-30));
        CHECK(abs(fp.value.im + fm.value.im) < Real(1e-30));
        CHECK(fp.value.abs() <= mass + fp.error_bound + Real(1e-30));
    }
}

TEST_CASE("cantor fourier: product formula vs explicit arc sums") {
    set_working_precision(128);
    auto set = FatCantorSet::geometric(Arc(Rat(1L, 8L), Rat(3L, 4L)), Rat(3L, 8L));
    int K = 8;
    BoundaryWeight w({{Arc(Rat(1L, 8L), Rat(3L, 4L)), CantorIndicatorProfile{set, Rat(1L), K}}});
    for (long k : {0L, 1L, 2L, 5L, 23L, 97L}) {
        FourierCoeff f = fourier_w(w, k);
        // independent route: closed-form integrals over the 2^K stage arcs
        Complex acc(Real(0L), Real(0L));
        for (const Arc& a : set->stage_arcs(K)) {
            if (k == 0) {
                acc.re += Real(a.len);
                continue;
            }
            // int_a e^{-2 pi i k t} dt via endpoint antiderivative
            Complex Eb = Complex::unit_turn(Real(-k) * Real(a.end()));
            Complex Ea = Complex::unit_turn(Real(-k) * Real(a.start));
            Complex diff = Eb - Ea;
            Real denom = Real(2L) * Real::pi() * Real(k);
            acc += Complex(-diff.im / denom, diff.re / denom);
        }
        CHECK((f.value - acc).abs() < Real(1e-30));
    }

    // stage-truncation perturbation bound: |hat w_20(k) - hat w_10(k)| <= |E sym E_10|
    auto full = FatCantorSet::geometric(Arc(Rat(0L), Rat(1L)), Rat(1L, 2L));
    BoundaryWeight w20({{Arc(Rat(0L), Rat(1L)), CantorIndicatorProfile{full, Rat(1L), 20}}});
    BoundaryWeight w10({{Arc(Rat(0L), Rat(1L)), CantorIndicatorProfile{full, Rat(1L), 10}}});
    Real bound = Real(full->stage_measure(10) - full->limit_measure());
    for (long k : {0L, 1L, 7L, 57L}) {
        Complex d = fourier_w(w20, k).value - fourier_w(w10, k).value;
        CHECK(d.abs() <= bound + Real(1e-30));
    }
}

TEST_CASE("szego mean") {
    set_working_precision(128);
    // constant weight: log c, geometric mean c
    BoundaryWeight wc = BoundaryWeight::constant(Rat(1L, 4L));
    SzegoMeanResult s1 = szego_mean(wc);
    CHECK(s1.finite);
    CHECK(abs(s1.log_integral - log(Real(0.25))) < Real(1e-30));
    CHECK(abs(s1.geometric_mean - Real(0.25)) < Real(1e-30));

    // cantor indicator: divergent, mean 0
    auto set = FatCantorSet::geometric(Arc(Rat(0L), Rat(1L)), Rat(1L, 2L));
    BoundaryWeight wk({{Arc(Rat(0L), Rat(1L)), CantorIndicatorProfile{set, Rat(1L), 10}}});
    SzegoMeanResult s2 = szego_mean(wk);
    CHECK_FALSE(s2.finite);
    CHECK(s2.geometric_mean == Real(0L));

    // |1 - z|^2 = 4 sin^2(pi t): classical mean-value oracle: integral 0, mean 1
    BoundaryWeight ws({{Arc(Rat(0L), Rat(1L)), SinPowerProfile{Rat(4L), Rat(2L), Rat(0L)}}});
    SzegoMeanResult s3 = szego_mean(ws);
    CHECK(s3.finite);
    CHECK(abs(s3.log_integral) < Real(1e-12));
    CHECK(abs(s3.geometric_mean - Real(1L)) < Real(1e-10));

    // exp-cusp away from the singularity: closed form -log 2 over [1/8,1/4]
    BoundaryWeight we({{Arc(Rat(0L), Rat(1L)), ExpCuspProfile{Rat(0L), Rat(1L)}}});
    SzegoMeanResult s4 = szego_mean(we, CircleSet::from_arcs({Arc(Rat(1L, 8L), Rat(1L, 8L))}));
    CHECK(s4.finite);
    CHECK(abs(s4.log_integral + log(Real(2L))) < Real(1e-30));
    // and divergent on any arc whose closure touches t0
    SzegoMeanResult s5 = szego_mean(we, CircleSet::from_arcs({Arc(Rat(0L), Rat(1L, 8L))}));
    CHECK_FALSE(s5.finite);
}

TEST_CASE("arc mass and cantor measure descent") {
    set_working_precision(128);
    auto set = FatCantorSet::geometric(Arc(Rat(0L), Rat(1L)), Rat(1L, 2L));
    // measure within [0, 3/8) at stage 1 is the full left child
    CHECK(cantor_measure_in(*set, 1, Arc(Rat(0L), Rat(3L, 8L))) == Rat(3L, 8L));
    // the gap contributes nothing
    CHECK(cantor_measure_in(*set, 1, Arc(Rat(3L, 8L), Rat(1L, 4L))) == Rat(0L));
    // stage-5 mass over the whole circle equals the stage measure
    CHECK(cantor_measure_in(*set, 5, Arc(Rat(0L), Rat(1L))) == set->stage_measure(5));
    // additivity against the pointwise prefix function
    Rat a = cantor_measure_before(*set, 6, Rat(1L, 3L));
    Rat b = cantor_measure_before(*set, 6, Rat(2L, 3L));
    CHECK(cantor_measure_in(*set, 6, Arc(Rat(1L, 3L), Rat(1L, 3L))) == b - a);

    BoundaryWeight w({{Arc(Rat(0L), Rat(1L)), CantorIndicatorProfile{set, Rat(3L), 7}}});
    ValueWithError m = arc_mass(w, Arc(Rat(0L), Rat(1L)));
    CHECK(abs(m.value - Real(3L) * Real(set->stage_measure(7))) < Real(1e-30));
}

TEST_SUITE_END();
