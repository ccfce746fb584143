#include "p2mu/witness.hpp"

#include "p2mu/moments.hpp"
#include "p2mu/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace p2mu {

namespace {

long ceil_sqrt(const Rat& N) {
    long m = (long)std::ceil(std::sqrt(N.to_double()));
    while (Rat(m) * Rat(m) < N) ++m;
    while (m > 1 && Rat(m - 1) * Rat(m - 1) >= N) --m;
    return m;
}

// Stage of I inside the Cantor construction; -1 when I is not a stage arc.
int stage_of_arc(const FatCantorSet& set, const Arc& I) {
    Arc cur = set.base();
    for (int s = 0; s <= 64; ++s) {
        if (I.start == cur.start && I.len == cur.len) return s;
        if (I.len >= cur.len) return -1;
        Rat r = set.ratio(s + 1);
        Rat child = cur.len * (Rat(1L) - r) / Rat(2L);
        Rat off = (I.start - cur.start).frac();
        if (off + I.len <= child)
            cur = Arc(cur.start, child);
        else if (off >= cur.len - child)
            cur = Arc((cur.start + cur.len - child).frac(), child);
        else
            return -1;
    }
    return -1;
}

// Complement of sorted-within-I arcs, walked in I's own coordinates.
std::vector<Arc> complement_within(const Arc& I, std::vector<Arc> parts) {
    std::sort(parts.begin(), parts.end(), [&](const Arc& a, const Arc& b) {
        return (a.start - I.start).frac() < (b.start - I.start).frac();
    });
    std::vector<Arc> out;
    Rat cursor(0L);  // offset within I
    for (const Arc& a : parts) {
        Rat off = (a.start - I.start).frac();
        if (off > cursor) out.emplace_back((I.start + cursor).frac(), off - cursor);
        cursor = off + a.len;
    }
    if (cursor < I.len) out.emplace_back((I.start + cursor).frac(), I.len - cursor);
    return out;
}

}  // namespace

std::vector<Arc> vitali_select(const BoundaryWeight& w, const CircleSet& F, const Rat& N) {
    if (N.sign() <= 0) throw std::invalid_argument("vitali_select: N > 0");
    if (F.is_empty()) return {};
    if (!F.arcs().empty())
        throw StructuralError(
            "vitali_select: residual arcs carry no scale-by-scale divergence certificates");
    std::vector<Arc> out;
    for (const CantorPart& part : F.cantor_parts()) {
        bool matched = false;
        for (const WeightPiece& p : w.pieces())
            if (const auto* ci = std::get_if<CantorIndicatorProfile>(&p.profile))
                if (ci->set == part.set) matched = true;
        if (!matched)
            throw StructuralError("vitali_select: residual part not backed by a weight piece");
        int k = 0;
        while (N * part.set->stage_arc_len(k) > Rat(1L)) {
            if (++k > 24) throw StructuralError("vitali_select: selection stage exceeds 2^24 arcs");
        }
        for (Arc& a : part.set->stage_arcs(k)) out.push_back(std::move(a));
    }
    return out;
}

WitnessFamily build_fN(const BoundaryWeight& w, const std::vector<Arc>& intervals, const Rat& N) {
    if (N.sign() <= 0) throw std::invalid_argument("build_fN: N > 0");
    WitnessFamily fam;
    fam.N = N;
    fam.M = ceil_sqrt(N);

    std::vector<StepPiece> steps;
    std::vector<InvPowerPiece> analytic;
    Rat covered_F(0L);

    for (const Arc& I : intervals) {
        if (N * I.len > Rat(1L))
            throw std::invalid_argument("build_fN: interval violates N|I| <= 1");
        IntervalData data;
        data.arc = I;
        data.alpha_j = Real(0L);
        data.density = Real(0L);
        data.l1_unscaled = Real(0L);

        const WeightPiece& piece = w.piece_at(I.start);
        const auto* cantor = std::get_if<CantorIndicatorProfile>(&piece.profile);
        const auto* cusp = std::get_if<ExpCuspProfile>(&piece.profile);

        if (cantor != nullptr) {
            // ---- case C1: |I \ E| > 0. Balance -N on a stage cover of F cap I
            // against the interior gaps; means cancel exactly in rationals.
            const FatCantorSet& set = *cantor->set;
            data.kind = WitnessCase::C1;
            int k = stage_of_arc(set, I);
            std::vector<Arc> neg_arcs;
            if (k >= 0) {
                Rat r = set.ratio(k + 1);
                Rat child = I.len * (Rat(1L) - r) / Rat(2L);
                neg_arcs.emplace_back(I.start, child);
                neg_arcs.emplace_back((I.start + I.len - child).frac(), child);
                data.mass_F = set.limit_measure() / Rat::pow2(k);
            } else {
                int s = 0;
                while (set.stage_arc_len(s) * Rat(4L) > I.len) {
                    if (++s > 24) throw StructuralError("build_fN: realization stage too deep");
                }
                for (const Arc& sa : set.stage_arcs(s))
                    for (const Arc& ip : I.unwrapped())
                        for (const Arc& sp : sa.unwrapped()) {
                            Arc ov = intersect_unwrapped(ip, sp);
                            if (ov.len.sign() > 0) neg_arcs.push_back(ov);
                        }
                data.mass_F = cantor_measure_in(set, s + 16, I);
            }
            if (neg_arcs.empty()) throw StructuralError("build_fN: interval misses the residual set");
            for (const Arc& a : neg_arcs) data.mass_neg += a.len;
            data.mass_gap = I.len - data.mass_neg;
            if (data.mass_gap.sign() <= 0)
                throw StructuralError("build_fN: realized cover leaves no gap mass");
            Rat rho = data.mass_neg / data.mass_gap;
            Real Nr(N);
            data.density = Nr * Real(rho);
            for (const Arc& a : neg_arcs) steps.push_back({a, -Nr});
            for (const Arc& g : complement_within(I, neg_arcs)) steps.push_back({g, data.density});
            data.l1_unscaled = Real(2L) * Nr * Real(data.mass_neg);
        } else if (cusp != nullptr) {
            // ---- case C2: E covers I; pick I^+ inside the level set with
            // N|I| <= alpha_j = int_{I^+} log(1/w) <= 2N|I|.
            if (w.log_verdict(piece, I) != LogVerdict::Divergent)
                throw StructuralError("build_fN: interval has integrable log w (not selectable)");
            data.kind = WitnessCase::C2;
            const Rat& t0 = cusp->t0;
            const Rat& q = cusp->q;
            Rat d_edge = max(circular_dist(I.start, t0), circular_dist(I.end().frac(), t0));
            // c = half the (largest) edge value of w on I, capped at 1/2; the
            // matching outer distance satisfies w(s_c) = c
            Real c_level = min(Real(0.5), exp(-pow(Real(d_edge), -Real(q))) / Real(2L));
            Real sc_real = pow(log(Real(1L) / c_level), -Real(1L) / Real(q));
            Rat s_c = min(Rat::from_real(sc_real), d_edge);

            std::vector<DistanceRange> ranges;
            for (const Arc& ip : I.unwrapped())
                for (DistanceRange& dr : distance_pieces(ip, t0)) ranges.push_back(std::move(dr));

            auto mass_between = [&](const Rat& lo, const Rat& hi) -> Real {
                Real acc(0L);
                for (const DistanceRange& dr : ranges) {
                    Rat a = max(dr.d1, lo), b = min(dr.d2, hi);
                    if (b <= a || a.is_zero()) continue;
                    if (q == Rat(1L))
                        acc += log(Real(b)) - log(Real(a));
                    else {
                        Real e = Real(1L) - Real(q);
                        acc += (pow(Real(b), e) - pow(Real(a), e)) / e;
                    }
                }
                return acc;
            };
            Real target_lo = Real(N * I.len), target_hi = Real(2L) * Real(N * I.len);
            Rat lo = s_c / Rat(2L), hi = s_c;
            while (mass_between(lo, s_c) < target_lo) {
                hi = lo;
                lo /= Rat(2L);
                if (lo < Rat::pow2(-4096))
                    throw StructuralError("build_fN: level bisection exhausted");
            }
            for (int it = 0; it < 300 && mass_between(lo, s_c) > target_hi; ++it) {
                Rat mid = (lo + hi) / Rat(2L);
                if (mass_between(mid, s_c) >= target_lo)
                    lo = mid;
                else
                    hi = mid;
            }
            Rat s_d = lo;
            data.alpha_j = mass_between(s_d, s_c);

            std::vector<Arc> plus;
            for (const DistanceRange& dr : ranges) {
                Rat a = max(dr.d1, s_d), b = min(dr.d2, s_c);
                if (b <= a) continue;
                plus.push_back(distance_band_arc(dr, a, b));
            }
            if (plus.empty()) throw StructuralError("build_fN: empty level band");
            data.plus_arcs = plus;
            for (const Arc& a : plus) data.plus_len += a.len;
            Rat minus_len = I.len - data.plus_len;
            if (minus_len.sign() <= 0) throw StructuralError("build_fN: I^- is empty");
            for (const Arc& a : plus) analytic.push_back({a, t0, q, Real(1L)});
            Real neg_value = -data.alpha_j / Real(minus_len);
            for (const Arc& g : complement_within(I, plus)) steps.push_back({g, neg_value});
            data.l1_unscaled = Real(2L) * data.alpha_j;
        } else {
            throw StructuralError("build_fN: no divergent profile certifies the interval");
        }
        covered_F += data.mass_F;
        fam.intervals.push_back(std::move(data));
    }

    fam.f_unscaled = StepProfile(steps, analytic);
    fam.f_scaled = fam.f_unscaled.scaled(Real(1L) / Real(fam.M));
    fam.A_N = CircleSet::from_arcs(intervals);
    Rat total_F = carrier_and_residual(w).F.measure();
    fam.uncovered_F = max(Rat(0L), total_F - covered_F);
    return fam;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

// Herglotz evaluation with cached arc endpoints: grids reuse the same steps
// for thousands of z values.
struct CachedStep {
    Complex xa, xb;
    Real value;
    Real len;
};

std::vector<CachedStep> cache_steps(const StepProfile& f) {
    std::vector<CachedStep> out;
    out.reserve(f.steps().size());
    for (const StepPiece& s : f.steps()) {
        // steps are non-wrapping with len <= 1/2 in witness profiles; longer
        // steps are halved for the branch rule
        for (const Arc& p : s.arc.unwrapped()) {
            if (p.len > Rat(1L, 2L)) {
                Rat half_len = p.len / Rat(2L);
                Arc first(p.start, half_len), second((p.start + half_len).frac(), p.len - half_len);
                for (const Arc& a : {first, second})
                    out.push_back({Complex::unit_turn(Real(a.start)), Complex::unit_turn(Real(a.end())),
                                   s.value, Real(a.len)});
            } else {
                out.push_back({Complex::unit_turn(Real(p.start)), Complex::unit_turn(Real(p.end())),
                               s.value, Real(p.len)});
            }
        }
    }
    return out;
}

Real cached_poisson(const std::vector<CachedStep>& steps, const StepProfile& f, const Complex& z) {
    const Real pi = Real::pi();
    const Real two_pi = Real(2L) * pi;
    Real acc(0L);
    for (const CachedStep& s : steps) {
        Complex da = s.xa - z;
        Complex db = s.xb - z;
        Complex w = db * da.conj();
        Real darg = atan2(w.im, w.re);
        if (darg <= Real(0L)) darg += two_pi;
        acc.add_prod(s.value, darg / pi - s.len);
    }
    if (!f.analytic_pieces().empty()) {
        // analytic pieces integrate against the kernel adaptively
        StepProfile only_analytic({}, f.analytic_pieces());
        acc += poisson_integral(only_analytic, z);
    }
    return acc;
}

}  // namespace

WitnessOptions::WitnessOptions()
    : fidelity_rho(Real(1L) - Real(1e-8)), fidelity_clearance(3L, 100L) {}

WitnessReport verify_conditions(const WitnessFamily& fam, const BoundaryWeight& w,
                                const RadialWeight& G, const WitnessOptions& opt) {
    WitnessReport rep;
    const Real NM = Real(fam.N) / Real(fam.M);
    const Real Nr(fam.N);

    // (i) mean zero
    Real mean = fam.f_unscaled.recompute_mean();
    rep.mean_zero = {abs(mean) <= Real(1e-10), abs(mean), Real(1e-10), "recomputed from pieces"};

    // (ii) depth on F cap A_N: structural value plus point audits at exact
    // residual-set points (stage-arc endpoints persist to the limit set)
    Real worst_depth = -Real::inf();  // max of f over audited residual points (want <= -N)
    long audited = 0;
    for (const IntervalData& data : fam.intervals) {
        if (data.kind == WitnessCase::C1) {
            worst_depth = max(worst_depth, fam.f_unscaled.value_at(data.arc.start));
            ++audited;
            if (audited >= 128) break;
        }
    }
    if (audited == 0) {
        rep.depth = {true, Real(0L), -Nr, "no C1 intervals: F cap A_N has measure zero (vacuous)"};
    } else {
        Real tol = Real::pow2(-(long)working_precision() + 24) * Nr;
        rep.depth = {worst_depth <= -Nr + tol, worst_depth, -Nr,
                     "audited stage-arc endpoints (exact residual points)"};
    }

    // (iii) uncovered residual mass
    Rat inv_N = Rat(1L) / fam.N;
    rep.uncovered = {fam.uncovered_F < inv_N, Real(fam.uncovered_F), Real(inv_N), "exact measure"};

    // measured per-arc L1 max
    rep.measured_C = Real(0L);
    for (const IntervalData& d : fam.intervals) rep.measured_C = max(rep.measured_C, d.l1_unscaled);
    rep.C_N = Real(4L) * rep.measured_C / Real(fam.M);

    // (iv) Poisson growth on a radial x angular grid, plus the outer-function
    // growth audit |g_N| <= G(1-|z|)^{-C_N/d} on the same grid (g_N built from
    // the scaled profile, so log|g_N| = P_{f_N}/M).
    WitnessOptions o = opt;
    if (o.rs.empty())
        o.rs = {Real(0L), Real(0.5), Real(0.9), Real(0.99), Real(0.999), Real(1L) - Real(1e-4),
                Real(1L) - Real(1e-5), Real(1L) - Real(1e-6)};
    std::vector<Rat> angles;
    for (int i = 0; i < o.angular_samples; ++i) angles.emplace_back(Rat(i, o.angular_samples));
    size_t interval_stride = std::max<size_t>(1, fam.intervals.size() / 64);
    for (size_t j = 0; j < fam.intervals.size(); j += interval_stride) {
        const Arc& I = fam.intervals[j].arc;
        angles.push_back(I.midpoint_mod1());
        angles.push_back((I.start + I.len / Rat(3L)).frac());
    }

    auto cached = cache_steps(fam.f_unscaled);
    RadialWeight::ExpDecResult expdec = G.check_exp_dec();

    Real sup_scaled(0L);
    rep.growth_pass = true;
    Real d_const = expdec.d;
    for (const Real& r : o.rs) {
        Real worst_P = -Real::inf();
        for (const Rat& t : angles) {
            Complex z = Complex::unit_turn(Real(t)) * r;
            Real P = cached_poisson(cached, fam.f_unscaled, z);
            worst_P = max(worst_P, P);
            sup_scaled = max(sup_scaled, (Real(1L) - r) * P);
        }
        GrowthCheckRow row;
        row.r = r;
        row.worst_log_g = worst_P / Real(fam.M);
        if (expdec.holds && d_const.is_finite() && r > Real(0L)) {
            row.allowed_log = (rep.C_N / d_const) * G.m(Real(1L) - r);
            row.pass = row.worst_log_g <= row.allowed_log + Real::pow2(-40);
        } else {
            row.allowed_log = Real::inf();
            row.pass = true;
        }
        rep.growth_pass = rep.growth_pass && row.pass;
        rep.growth.push_back(row);
    }
    Real bound4C = Real(4L) * rep.measured_C;
    rep.poisson_growth = {sup_scaled <= bound4C + Real::pow2(-40), sup_scaled, bound4C,
                          "sup over grid of (1-r) P_{f_N}(z), unscaled profile"};

    // (v) exp-integral, two routes.
    //   route 1: exact measure accounting over the profile pieces
    Real route1(0L);
    Rat covered(0L);
    for (const StepPiece& s : fam.f_unscaled.steps()) {
        ValueWithError mass = arc_mass(w, s.arc);
        route1 += exp(s.value) * mass.value;
        covered += s.arc.len;
    }
    for (const InvPowerPiece& a : fam.f_unscaled.analytic_pieces()) {
        // exp(log(1/w)) w = 1 exactly on the level band
        route1 += Real(a.support.len);
        covered += a.support.len;
    }
    ValueWithError wtotal = total_mass(w);
    Real covered_mass(0L);
    {
        // mass of w inside the covered region
        std::vector<Arc> covered_arcs;
        for (const StepPiece& s : fam.f_unscaled.steps()) covered_arcs.push_back(s.arc);
        for (const InvPowerPiece& a : fam.f_unscaled.analytic_pieces())
            covered_arcs.push_back(a.support);
        for (const Arc& a : covered_arcs) covered_mass += arc_mass(w, a).value;
    }
    route1 += wtotal.value - covered_mass;  // exp(0) w off the support of f_N
    Real bound_v = Real(1L) + wtotal.value;
    rep.exp_integral = {route1 <= bound_v + Real::pow2(-30), route1, bound_v,
                        "exact accounting; exp(f) w = 1 on C2 bands, 0 on C1 gaps"};

    //   route 2: stage-resolved pointwise evaluation (independent of the
    //   construction's own bookkeeping)
    Real route2(0L);
    for (const WeightPiece& p : w.pieces()) {
        std::visit(
            [&](const auto& prof) {
                using T = std::decay_t<decltype(prof)>;
                if constexpr (std::is_same_v<T, ZeroProfile>) {
                    // contributes nothing
                } else if constexpr (std::is_same_v<T, CantorIndicatorProfile>) {
                    int kq = std::min(prof.stage, 14 + opt.quadrature_stage_extra);
                    for (const Arc& a : prof.set->stage_arcs(kq)) {
                        Rat mid = a.midpoint_mod1();
                        route2 += exp(fam.f_unscaled.value_at(mid)) * Real(prof.value) * Real(a.len);
                    }
                } else {
                    auto fexp = [&](const Real& t) {
                        Rat tr = Rat::from_real(t).frac();
                        return exp(fam.f_unscaled.value_at(tr)) * w.eval(tr).value;
                    };
                    QuadResult qr = integrate_adaptive(fexp, Real(p.arc.start), Real(p.arc.end()),
                                                       Real::pow2(-40), Real::pow2(-60));
                    route2 += qr.value;
                }
            },
            p.profile);
    }
    rep.exp_integral_quadrature = route2;

    // boundary fidelity at rho: audit points in the complement of A_N with
    // clearance from every discontinuity of f_N
    std::vector<Rat> breaks = fam.f_unscaled.breakpoints();
    auto clearance = [&](const Rat& t) {
        Rat best(1L, 2L);
        for (const Rat& b : breaks) best = min(best, circular_dist(t, b));
        return best;
    };
    rep.fidelity_worst = Real(0L);
    CircleSet comp = fam.A_N.complement();
    std::vector<Arc> comp_arcs = comp.arcs();
    std::sort(comp_arcs.begin(), comp_arcs.end(),
              [](const Arc& a, const Arc& b) { return b.len < a.len; });
    int taken = 0;
    for (const Arc& gap : comp_arcs) {
        if (taken >= 8) break;
        Rat mid = gap.midpoint_mod1();
        if (clearance(mid) < opt.fidelity_clearance) continue;
        Complex z = Complex::unit_turn(Real(mid)) * o.fidelity_rho;
        // the cached pieces are unscaled; scale the Poisson value directly
        Real P = cached_poisson(cached, fam.f_unscaled, z) / Real(fam.M);
        Real err = abs(P - fam.f_scaled.value_at(mid));
        rep.fidelity.emplace_back(mid, err);
        rep.fidelity_worst = max(rep.fidelity_worst, err);
        ++taken;
    }

    // disk-norm estimate of int |g_N|^2 G dA on a double-precision grid
    {
        std::vector<std::complex<double>> xa, xb;
        std::vector<double> val, len;
        for (const CachedStep& s : cached) {
            xa.emplace_back(s.xa.re.to_double(), s.xa.im.to_double());
            xb.emplace_back(s.xb.re.to_double(), s.xb.im.to_double());
            val.push_back(s.value.to_double() / (double)fam.M);
            len.push_back(s.len.to_double());
        }
        const int nr = 48, nt = 512;
        double log_acc = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < nr; ++i) {
            double r = (i + 0.5) / nr;
            double x = 1.0 - r;
            double logG = -G.m(Real(x)).to_double();
            if (!std::isfinite(logG)) continue;
            for (int jt = 0; jt < nt; ++jt) {
                double th = 2.0 * M_PI * (jt + 0.5) / nt;
                std::complex<double> z = std::polar(r, th);
                double P = 0.0;
                for (size_t sidx = 0; sidx < xa.size(); ++sidx) {
                    std::complex<double> wz = (xb[sidx] - z) * std::conj(xa[sidx] - z);
                    double darg = std::atan2(wz.imag(), wz.real());
                    if (darg <= 0) darg += 2.0 * M_PI;
                    P += val[sidx] * (darg / M_PI - len[sidx]);
                }
                double L = 2.0 * P + logG + std::log(2.0 * r / (nr * (double)nt));
                log_acc = (log_acc > L) ? log_acc + std::log1p(std::exp(L - log_acc))
                                        : L + std::log1p(std::exp(log_acc - L));
            }
        }
        rep.disk_norm_log = Real(log_acc);
    }

    return rep;
}

}  // namespace p2mu
