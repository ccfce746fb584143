// Acceptance suite: runs every gate criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exit code 0 iff all pass.

#include "p2mu/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace p2mu;

namespace {

struct Outcome {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Outcome> g_outcomes;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
    g_outcomes.push_back({id, name, pass, detail});
    std::printf("[%2d] %s  %-28s %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
               .count() /
           1000.0;
}

Real lgamma_real(const Real& x) {
    Real r;
    int sign = 0;
    mpfr_lgamma(r.raw(), &sign, x.raw(), MPFR_RNDN);
    return r;
}

// 2 B(2n+2, beta+1)
Real beta_closed_form(long n, long beta) {
    Real a(2 * n + 2), b(beta + 1);
    return Real(2L) * exp(lgamma_real(a) + lgamma_real(b) - lgamma_real(a + b));
}

MeasureSpec cantor_measure() {
    auto set = FatCantorSet::geometric(Arc(Rat(0L), Rat(1L)), Rat(1L, 2L));
    MeasureSpec mu;
    mu.disk = RadialWeight::expdec(Rat(1L));
    mu.boundary =
        BoundaryWeight({{Arc(Rat(0L), Rat(1L)), CantorIndicatorProfile{set, Rat(1L), 20}}});
    return mu;
}

MeasureSpec one_measure() {
    MeasureSpec mu;
    mu.disk = RadialWeight::expdec(Rat(1L));
    mu.boundary = BoundaryWeight::constant(Rat(1L));
    return mu;
}

// ---------------------------------------------------------------------------

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    Real worst(0L);
    const Real tol(1e-12);
    bool ok = true;
    for (long beta : {0L, 1L, 2L, 5L}) {
        RadialWeight g = RadialWeight::power(Rat(beta));
        for (long n = 0; n <= 200; ++n) {
            Real oracle = beta_closed_form(n, beta);
            Real rel = abs(alpha_moment(g, n).value - oracle) / oracle;
            worst = max(worst, rel);
            if (rel > tol) ok = false;
        }
    }
    double secs = seconds_since(t0);
    if (secs > 10.0) ok = false;
    std::ostringstream d;
    d << "worst rel err " << worst.str(3) << " (tol 1e-12), " << secs << " s (cap 10 s)";
    record(1, "moment Beta oracle", ok, d.str());
}

void criterion_2() {
    bool ok = true;
    Real worst_excess(0L);
    for (const Rat& c : {Rat(1L, 2L), Rat(1L), Rat(2L)}) {
        RadialWeight g = RadialWeight::expdec(c);
        for (long n = 0; n <= 200; ++n) {
            ValueWithError a = alpha_moment(g, n);
            ValueWithError p = moment_P(g, Real(2 * n + 1));
            Real diff = abs(p.value - a.value / Real(2L));
            Real budget = p.error + a.error / Real(2L);
            if (diff > budget) {
                ok = false;
                worst_excess = max(worst_excess, diff - budget);
            }
        }
    }
    std::ostringstream d;
    d << "P(2n+1) = alpha_n/2 within combined bounds, c in {1/2, 1, 2}, n <= 200";
    if (!ok) d << "; worst excess " << worst_excess.str(3);
    record(2, "moment function identity", ok, d.str());
}

void criterion_3() {
    bool ok = true;
    long violations = 0;
    std::mt19937_64 rng(0x5EEDED5EEDULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::vector<double> rs{0.0, 0.9, 0.99, 0.999};
    for (int fam = 0; fam < 500; ++fam) {
        int m = 1 + (int)(rng() % 50);
        std::vector<double> pts;
        for (int i = 0; i < 2 * m; ++i) pts.push_back(unif(rng));
        std::sort(pts.begin(), pts.end());
        std::vector<Arc> arcs;
        for (int i = 0; i + 1 < 2 * m; i += 2)
            if (pts[i + 1] > pts[i])
                arcs.emplace_back(Rat::from_double(pts[i]), Rat::from_double(pts[i + 1] - pts[i]));
        for (double r : rs)
            if (!variation_sum_check(arcs, Real(r)).ok) {
                ok = false;
                ++violations;
            }
    }
    // full-circle closed form at each r > 0 plus a midrange value
    Real worst_fc(0L);
    for (double rd : {0.5, 0.9, 0.99, 0.999}) {
        Real r(rd);
        VariationCheck v = variation_sum_check({Arc(Rat(0L), Rat(1L))}, r);
        Real expect = (Real(1L) + r) / (Real(1L) - r) - (Real(1L) - r) / (Real(1L) + r);
        worst_fc = max(worst_fc, abs(v.sum - expect));
    }
    if (worst_fc > Real(1e-12)) ok = false;
    std::ostringstream d;
    d << "500 seeded families x 4 radii: " << violations
      << " violations; full-circle formula err " << worst_fc.str(3) << " (tol 1e-12)";
    record(3, "Poisson variation bound", ok, d.str());
}

void criterion_4() {
    RadialWeight g = RadialWeight::expdec(Rat(1L));
    bool ok = true;
    std::ostringstream d;
    auto rows = verify_P_lower_bound(g, {Real(10L), Real(100L), Real(1000L), Real(10000L)});
    long violations = 0;
    for (const auto& row : rows)
        if (!row.precondition_met || !row.holds) ++violations;
    if (violations > 0) ok = false;
    Real worst(0L);
    for (double x : {1.0, 2.0, 7.5, 100.0, 5000.0, 12345.0}) {
        if (x < 1.0) continue;
        EnvelopeValue e = envelope_k(g, Real(x));
        worst = max(worst, abs(e.k - Real(2L) * sqrt(Real(x))));
    }
    if (worst > Real(1e-10)) ok = false;
    d << "P(x) >= exp(-k(2x))/(4x): " << violations << " violations on {10,1e2,1e3,1e4}; "
      << "k vs 2 sqrt(x) err " << worst.str(3) << " (tol 1e-10)";
    record(4, "envelope lower bound", ok, d.str());
}

void criterion_5() {
    MeasureSpec mu = cantor_measure();
    CircleSet F = carrier_and_residual(*mu.boundary).F;
    bool ok = true;
    std::ostringstream d;
    for (long Nv : {10L, 100L, 1000L}) {
        auto t0 = std::chrono::steady_clock::now();
        Rat N(Nv);
        std::vector<Arc> sel = vitali_select(*mu.boundary, F, N);
        WitnessFamily fam = build_fN(*mu.boundary, sel, N);
        WitnessReport rep = verify_conditions(fam, *mu.boundary, *mu.disk);
        double secs = seconds_since(t0);
        bool this_ok = rep.all_five_pass() && rep.mean_zero.measured <= Real(1e-10) &&
                       fam.uncovered_F < Rat(1L) / N &&
                       rep.poisson_growth.measured <= Real(16L) &&
                       rep.exp_integral.measured <= Real(1.5) &&
                       rep.fidelity_worst <= Real(1e-6) && secs <= 120.0;
        ok = ok && this_ok;
        d << "N=" << Nv << (this_ok ? " ok" : " FAIL") << " (" << secs << "s,(iv)="
          << rep.poisson_growth.measured.str(3) << ",fid=" << rep.fidelity_worst.str(2) << "); ";
    }
    record(5, "witness five conditions", ok, d.str());
}

void criterion_6() {
    bool ok = true;
    Real worst(0L);
    const long N = 10;
    // --- splitting scenario
    {
        MeasureSpec mu = cantor_measure();
        GramSystem gs(mu, N);
        auto set = FatCantorSet::geometric(Arc(Rat(0L), Rat(1L)), Rat(1L, 2L));
        const int stage = 20;

        // circle oracle: midpoint rule over the 2^20 stage arcs (>= 2^14 nodes),
        // walked recursively without materializing the arc list
        std::vector<Complex> wm(N + 1, Complex(Real(0L), Real(0L)));
        struct Walker {
            const FatCantorSet& s;
            int maxstage;
            std::vector<Complex>& acc;
            void walk(const Rat& start, const Rat& len, int stage) {
                if (stage == maxstage) {
                    Real mid(start + len / Rat(2L));
                    Real L(len);
                    for (long m = 0; m < (long)acc.size(); ++m) {
                        Complex e = Complex::unit_turn(Real(-m) * mid);
                        acc[m] += e * L;
                    }
                    return;
                }
                Rat r = s.ratio(stage + 1);
                Rat child = len * (Rat(1L) - r) / Rat(2L);
                walk(start, child, stage + 1);
                walk(start + len - child, child, stage + 1);
            }
        } walker{*set, stage, wm};
        walker.walk(Rat(0L), Rat(1L), 0);

        // disk oracle: 1024 radial x 32 angular brute-force grid (32768 nodes)
        const GLRule& rule = gl_rule(16);
        std::vector<std::pair<Real, Real>> rad;  // (r, weight incl. 2r)
        Real lo(0L);
        for (int p = 1; p <= 64; ++p) {
            Real hi = (p == 64) ? Real(1L) - Real::pow2(-40)
                                : Real(1L) * Real(p) / Real(64L);
            if (p >= 58) hi = Real(1L) - (Real(1L) - lo) / Real(2L);  // cluster near 1
            Real mid = (lo + hi) / Real(2L), half = (hi - lo) / Real(2L);
            for (size_t i = 0; i < rule.nodes.size(); ++i) {
                Real r = mid + half * rule.nodes[i];
                rad.emplace_back(r, half * rule.weights[i] * Real(2L) * r);
            }
            lo = hi;
        }
        const int T = 32;
        for (long i = 0; i <= N && ok; ++i) {
            for (long j = 0; j <= N; ++j) {
                Complex disk(Real(0L), Real(0L));
                for (const auto& [r, wgt] : rad) {
                    Real radial = pow(r, i + j) * mu.disk->eval_raw(Real(1L) - r) * wgt;
                    for (int a = 0; a < T; ++a) {
                        Complex e = Complex::unit_turn(Real(i - j) * Real(Rat(a, T)));
                        disk += e * (radial / Real(T));
                    }
                }
                long m = i - j;
                Complex circ = m >= 0 ? wm[m] : wm[-m].conj();
                Complex expected = disk + circ;
                Real err = (gs.entry(i, j) - expected).abs();
                worst = max(worst, err);
                if (err > Real(1e-8)) ok = false;
            }
        }
    }
    // --- irreducible scenario
    {
        MeasureSpec mu = one_measure();
        GramSystem gs(mu, N);
        const long T = 1L << 14;
        for (long i = 0; i <= N && ok; ++i) {
            for (long j = 0; j <= N; ++j) {
                // circle part by a 2^14-node midpoint rule
                Complex circ(Real(0L), Real(0L));
                if (i == j) {
                    circ = Complex(Real(1L), Real(0L));
                } else {
                    // midpoint sums of e^{2 pi i (i-j) t} vanish exactly for
                    // 0 < |i-j| < T; keep the honest numeric sum on a coarse
                    // sub-grid to witness it
                    Complex acc(Real(0L), Real(0L));
                    for (long a = 0; a < 64; ++a)
                        acc += Complex::unit_turn(Real(i - j) * Real(Rat(2 * a + 1, 2 * 64)));
                    circ = acc * (Real(1L) / Real(64L));
                    (void)T;
                }
                Real disk(0L);
                if (i == j)
                    disk = Real(2L) * integrate_composite(
                                          [&](const Real& r) {
                                              return pow(r, 2 * i + 1) *
                                                     mu.disk->eval_raw(Real(1L) - r);
                                          },
                                          Real(0L), Real(1L) - Real::pow2(-40), 128, 16);
                Complex expected = Complex(disk, Real(0L)) + circ;
                Real err = (gs.entry(i, j) - expected).abs();
                worst = max(worst, err);
                if (err > Real(1e-8)) ok = false;
            }
        }
    }
    std::ostringstream d;
    d << "entries vs brute-force 2D quadrature, worst |diff| " << worst.str(3) << " (tol 1e-8)";
    record(6, "Gram oracle equivalence", ok, d.str());
}

struct BracketData {
    AnnihilatorTuple tuple;
    CertificateResult cert;
};

BracketData criterion_7() {
    bool ok = true;
    std::ostringstream d;
    // (a) irreducible scenario
    MeasureSpec mu1 = one_measure();
    AnnihilatorTuple tuple = annihilator(mu1, Arc(Rat(0L), Rat(1L)), 200);
    bool res_ok = tuple.residual_worst <= Real(1e-10) * tuple.tuple_norm;
    TargetSpec target{IndicatorTarget{CircleSet::from_arcs({Arc(Rat(9L, 20L), Rat(1L, 10L))})}};
    CertificateResult cert = certificate(tuple, mu1, target, 400);
    bool cert_ok = cert.lower_bound > Real(0L) && cert.correction <= Real(1e-8);
    DistanceSolver solver(mu1, target, 400);
    bool bracket_ok = true;
    Real min_margin = Real::inf();
    for (long n = 0; n <= 400; ++n) {
        Real dn = solver.distance_at(n);
        Real margin = dn - (cert.lower_bound - Real(1e-8));
        min_margin = min(min_margin, margin);
        if (margin < Real(0L)) bracket_ok = false;
    }
    ok = ok && res_ok && cert_ok && bracket_ok;
    d << "(a) res/norm " << (tuple.residual_worst / tuple.tuple_norm).str(2) << ", L "
      << cert.lower_bound.str(4) << ", min margin " << min_margin.str(3) << "; ";

    // (b) splitting scenario: strict decrease, no certificate constructible
    MeasureSpec mu2 = cantor_measure();
    TargetSpec t2{IndicatorTarget{carrier_and_residual(*mu2.boundary).E}};
    std::vector<long> Ns;
    for (long n = 10; n <= 400; n += 10) Ns.push_back(n);
    DistanceProfile prof = splitting_profile(mu2, t2, Ns);
    bool strict = true;
    for (size_t i = 1; i < prof.rows.size(); ++i)
        if (!(prof.rows[i].d < prof.rows[i - 1].d)) strict = false;
    bool no_cert = true;  // symbolic: every piece is cantor or zero
    for (const WeightPiece& p : mu2.boundary->pieces()) {
        std::string kind = profile_name(p.profile);
        if (kind != "zero" && kind != "cantor-indicator") no_cert = false;
    }
    ok = ok && strict && no_cert;
    d << "(b) strict decrease " << (strict ? "yes" : "NO") << " over N=10..400, d_400 "
      << prof.rows.back().d.str(4) << ", certificate non-constructible "
      << (no_cert ? "(symbolic)" : "VIOLATED") << "; rate not asserted";
    record(7, "bracketing dichotomy", ok, d.str());
    return {std::move(tuple), std::move(cert)};
}

void criterion_8(const BracketData& bd) {
    const AnnihilatorTuple& t = bd.tuple;
    bool ok = true;
    for (long n = 0; n <= 200; ++n) {
        // hermitian pair |n|: coefficients at -n share the modulus
        if (t.h.coeff(n).abs() > t.alpha[n] / Real(n + 1) + Real::pow2(-100)) ok = false;
        if (t.h.coeff(-n).abs() > t.alpha[n] / Real(n + 1) + Real::pow2(-100)) ok = false;
    }
    bool sums_ok = t.sum_F2alpha <= t.sum_alpha_over_1pn2;
    ok = ok && sums_ok;
    std::ostringstream d;
    d << "|h_n| <= alpha_n/(1+n) for |n| <= 200; sum |F_n|^2 alpha_n = "
      << t.sum_F2alpha.str(4) << " <= " << t.sum_alpha_over_1pn2.str(4);
    record(8, "coefficient bounds", ok, d.str());
}

void criterion_9() {
    bool ok = true;
    Real worst(0L);
    for (const Rat& c : {Rat(1L, 4L), Rat(1L)}) {
        MeasureSpec mu;
        mu.boundary = BoundaryWeight::constant(c);
        TargetSpec t{CoeffTarget{{{-1L, Complex(Real(1L), Real(0L))}}}};
        DistanceSolver solver(mu, t, 50);
        for (long n = 0; n <= 50; ++n) {
            Real err = abs(solver.distance_sq_at(n) - Real(c));
            worst = max(worst, err);
            if (err > Real(1e-12)) ok = false;
        }
    }
    BoundaryWeight ws({{Arc(Rat(0L), Rat(1L)), SinPowerProfile{Rat(4L), Rat(2L), Rat(0L)}}});
    SzegoMeanResult sm = szego_mean(ws);
    Real gm_err = abs(sm.geometric_mean - Real(1L));
    if (!sm.finite || gm_err > Real(1e-10)) ok = false;
    std::ostringstream d;
    d << "conj(z) distance^2 = c err " << worst.str(3) << " (tol 1e-12); geometric mean of |1-z|^2 = "
      << sm.geometric_mean.str(12) << " (tol 1e-10)";
    record(9, "Szego sanity", ok, d.str());
}

void criterion_10() {
    namespace fs = std::filesystem;
    bool ok = true;
    std::ostringstream d;
    fs::path base = fs::temp_directory_path() / "p2mu_acceptance";
    fs::remove_all(base);
    for (const char* name : {"split_cantor", "irreducible_w1"}) {
        Scenario sc = load_scenario(std::string(P2MU_SCENARIO_DIR) + "/" + name + ".json");
        RunOptions o1, o2;
        o1.out_dir = (base / (std::string(name) + "_run1")).string();
        o2.out_dir = (base / (std::string(name) + "_run2")).string();
        auto t0 = std::chrono::steady_clock::now();
        RunReport r1 = run_scenario(sc, o1);
        RunReport r2 = run_scenario(sc, o2);
        double secs = seconds_since(t0);
        if (r1.exit_code != 0 || r2.exit_code != 0) ok = false;
        long files = 0, mismatches = 0;
        for (const auto& entry : fs::directory_iterator(o1.out_dir)) {
            std::string fname = entry.path().filename().string();
            if (fname == "run_meta.json") continue;  // timing sidecar
            ++files;
            std::ifstream f1(entry.path(), std::ios::binary);
            std::ifstream f2(fs::path(o2.out_dir) / fname, std::ios::binary);
            std::stringstream s1, s2;
            s1 << f1.rdbuf();
            s2 << f2.rdbuf();
            if (s1.str() != s2.str() || s1.str().empty()) ++mismatches;
        }
        if (mismatches > 0 || files == 0) ok = false;
        d << name << ": exit " << r1.exit_code << "/" << r2.exit_code << ", " << files
          << " artifacts, " << mismatches << " mismatches (" << secs << " s); ";
    }
    record(10, "determinism", ok, d.str());
}

}  // namespace

int main(int argc, char** argv) {
    set_working_precision(128);
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto want = [&](int id) { return only.empty() || only.count(id) > 0; };

    std::printf("p2mu acceptance suite (precision 128 bits)\n");
    auto t0 = std::chrono::steady_clock::now();
    try {
        if (want(1)) criterion_1();
        if (want(2)) criterion_2();
        if (want(3)) criterion_3();
        if (want(4)) criterion_4();
        if (want(5)) criterion_5();
        if (want(6)) criterion_6();
        BracketData bd{AnnihilatorTuple{}, CertificateResult{}};
        bool have_bd = false;
        if (want(7)) {
            bd = criterion_7();
            have_bd = true;
        }
        if (want(8)) {
            if (!have_bd) bd = criterion_7();
            criterion_8(bd);
        }
        if (want(9)) criterion_9();
        if (want(10)) criterion_10();
    } catch (const std::exception& e) {
        std::printf("[!!] suite aborted: %s\n", e.what());
        return 1;
    }
    int failed = 0;
    for (const Outcome& o : g_outcomes)
        if (!o.pass) ++failed;
    std::printf("---\n%zu criteria run, %d failed, total %.1f s\n", g_outcomes.size(), failed,
                seconds_since(t0));
    return failed == 0 ? 0 : 1;
}
