#include "p2mu/moments.hpp"

#include <algorithm>
#include <sstream>

namespace p2mu {

namespace {

Real prec_eps(long shift = 0) { return Real::pow2(-(long)working_precision() + shift); }

// log of the radial integrand (1-u)^x G_raw(u) at u in (0,1)
Real log_integrand(const RadialWeight& G, const Real& x, const Real& u) {
    return x * log1p(-u) - G.m(u);
}

// Stationary point of the integrand: x/(1-u) = -m'(u). Returns 0 when the
// integrand is decreasing from u=0 (e.g. constant G), 1 when increasing up to
// the right edge (x = 0).
Real integrand_peak(const RadialWeight& G, const Real& x) {
    if (G.family() == RadialWeight::Family::Power) {
        Real beta(G.param_beta());
        if (beta.is_zero()) return Real(0L);
        return beta / (x + beta);
    }
    auto g = [&](const Real& u) { return x / (Real(1L) - u) + G.mprime(u); };
    Real lo = Real::pow2(-60), hi = Real(1L) - Real::pow2(-60);
    if (g(lo) >= Real(0L)) return Real(0L);
    if (g(hi) <= Real(0L)) return Real(1L);
    for (int i = 0; i < 140; ++i) {
        Real mid = (lo + hi) / Real(2L);
        if (g(mid) < Real(0L)) lo = mid; else hi = mid;
        if (hi - lo <= Real::pow2(-20) * hi) break;
    }
    return (lo + hi) / Real(2L);
}

ValueWithError radial_moment(const RadialWeight& G, const Real& x) {
    const long prec = (long)working_precision();
    Real ustar = integrand_peak(G, x);
    Real peak_u = ustar;
    if (peak_u <= Real(0L)) peak_u = prec_eps();
    if (peak_u >= Real(1L)) peak_u = Real(1L) - prec_eps();
    Real peak_log = log_integrand(G, x, peak_u);

    // Cut the left end where the integrand drops below 2^-(prec+16) of the
    // peak; what remains of the tail is bounded by u_lo * exp(target).
    Real target = peak_log - Real(prec + 16) * log(Real(2L));
    Real u_lo(0L);
    Real tail(0L);
    if (ustar > Real(0L)) {
        Real eps0 = Real::pow2(-4 * prec);
        if (log_integrand(G, x, eps0) < target) {
            Real lo = eps0, hi = ustar;
            for (int i = 0; i < 8 * (int)prec; ++i) {
                Real mid = sqrt(lo * hi);  // geometric bisection spans many scales
                if (log_integrand(G, x, mid) < target) lo = mid; else hi = mid;
                if (hi - lo <= Real::pow2(-8) * hi) break;
            }
            u_lo = lo;
            tail = u_lo * exp(target);
        }
    }

    auto f = [&](const Real& u) {
        if (u >= Real(1L)) return Real(0L);
        return exp(log_integrand(G, x, u));
    };
    std::vector<Real> hints;
    if (ustar > u_lo && ustar < Real(1L)) {
        hints.push_back(ustar);
        hints.push_back((ustar + Real(1L)) / Real(2L));
        Real left = u_lo + (ustar - u_lo) / Real(2L);
        hints.push_back(left);
    }
    QuadResult q = integrate_adaptive(f, u_lo, Real(1L), Real::pow2(-prec / 2 - 6),
                                      exp(peak_log) * Real::pow2(-prec - 6), hints);
    if (!q.converged)
        throw PrecisionError("radial moment quadrature stalled at " + std::to_string(prec) +
                             " bits (x = " + x.str(8) + ")");
    return {q.value, q.error + tail};
}

}  // namespace

ValueWithError alpha_moment(const RadialWeight& G, long n) {
    if (n < 0) throw std::invalid_argument("alpha_moment: n >= 0");
    ValueWithError r = radial_moment(G, Real(2 * n + 1));
    r.value *= 2L;
    r.error *= 2L;
    return r;
}

ValueWithError moment_P(const RadialWeight& G, const Real& x) {
    return radial_moment(G, abs(x));
}

MomentTable make_moment_table(const RadialWeight& G, long nmax) {
    MomentTable t;
    t.precision_bits = working_precision();
    t.g_spec = G.describe();
    t.alpha.reserve(nmax + 1);
    for (long n = 0; n <= nmax; ++n) t.alpha.push_back(alpha_moment(G, n));
    return t;
}

EnvelopeValue envelope_k(const RadialWeight& G, const Real& x) {
    if (!(x > Real(0L))) throw std::domain_error("envelope_k: x > 0");
    const long prec = (long)working_precision();
    if (!G.has_mprime()) {
        // golden-section search on (0,1]
        Real phi = (sqrt(Real(5L)) - Real(1L)) / Real(2L);
        Real a = Real::pow2(-prec), b(1L);
        Real c = b - phi * (b - a), d = a + phi * (b - a);
        auto f = [&](const Real& y) { return G.m(y) + y * x; };
        for (int i = 0; i < 2 * (int)prec; ++i) {
            if (f(c) < f(d)) b = d; else a = c;
            c = b - phi * (b - a);
            d = a + phi * (b - a);
            if (b - a <= Real::pow2(-prec / 2) * b) break;
        }
        Real y = (a + b) / Real(2L);
        return {x, f(y), y};
    }
    // m' is increasing for every built-in family, so m(y) + yx is convex with
    // stationarity m'(y) = -x.
    auto g = [&](const Real& y) { return G.mprime(y) + x; };
    if (g(Real(1L)) <= Real(0L)) return {x, G.m(Real(1L)) + x, Real(1L)};
    Real lo(1L);
    while (g(lo) > Real(0L)) {
        lo /= 2L;
        if (lo < Real::pow2(-prec)) {
            // m' never reaches -x (degenerate families); the infimum sits at y -> 0+
            return {x, G.m(lo) + lo * x, lo};
        }
    }
    Real hi = lo * Real(2L);
    for (int i = 0; i < 4 * (int)prec; ++i) {
        Real mid = (lo + hi) / Real(2L);
        if (g(mid) > Real(0L)) hi = mid; else lo = mid;
        if (hi - lo <= Real::pow2(-prec / 2 - 4) * hi) break;
    }
    Real y = (lo + hi) / Real(2L);
    return {x, G.m(y) + y * x, y};
}

KQuotientResult k_quotient_integral(const RadialWeight& G) {
    const long prec = (long)working_precision();
    if (G.family() == RadialWeight::Family::DoubleExp) {
        // k(x) ~ c x / log x, so k(x)/(1+x^2) ~ c/(x log x): divergent.
        std::ostringstream note;
        note << "divergent: k(x) log(x)/x stays bounded below; probes";
        for (double px : {1e3, 1e6, 1e9}) {
            Real x(px);
            Real v = envelope_k(G, x).k * log(x) / x;
            note << " " << v.str(4);
        }
        return {false, Real::inf(), Real(0L), note.str()};
    }
    auto f = [&](const Real& x) { return envelope_k(G, x).k / (Real(1L) + x * x); };
    const Real X(4096L);
    std::vector<Real> hints;
    if (G.has_mprime()) {
        Real kink = -G.mprime(Real(1L));  // argmin transitions off the boundary here
        if (kink > Real(0L) && kink < X) hints.push_back(kink);
    }
    for (long b = 1; b < 4096; b *= 2) hints.push_back(Real(b));
    QuadResult main = integrate_adaptive(f, Real(0L), X, Real::pow2(-prec / 3), Real::pow2(-prec), hints);

    // Dyadic tail blocks with a measured geometric remainder bound.
    Real acc = main.value;
    Real err = main.error;
    Real prev_block = Real::nan();
    Real xa = X;
    std::string note = "tail: dyadic GL blocks from X=4096";
    for (int j = 0; j < 400; ++j) {
        Real xb = xa * Real(2L);
        Real block = integrate_composite(f, xa, xb, 2, 31);
        acc += block;
        if (!prev_block.is_nan() && prev_block > Real(0L)) {
            Real rho = block / prev_block;
            if (rho < Real(0.9) && block <= max(Real::pow2(-prec / 3) * acc, Real::pow2(-prec))) {
                err += block * rho / (Real(1L) - rho);
                return {true, acc, err, note};
            }
        }
        prev_block = block;
        xa = xb;
    }
    return {true, acc, err + prev_block * Real(8L), note + " (slow tail: remainder crudely bounded)"};
}

std::vector<PLowerBoundRow> verify_P_lower_bound(const RadialWeight& G, const std::vector<Real>& xs) {
    std::vector<PLowerBoundRow> rows;
    for (const Real& x : xs) {
        PLowerBoundRow row;
        row.x = x;
        EnvelopeValue env = envelope_k(G, Real(2L) * x);
        row.precondition_met = env.argmin_y < Real(0.5);
        ValueWithError P = moment_P(G, x);
        row.lhs = P.value;
        row.rhs = exp(-env.k) / (Real(4L) * x);
        row.margin = row.lhs - row.rhs;
        row.holds = row.precondition_met && (row.lhs - P.error >= row.rhs);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Boundary weight integrals

namespace {

// Distance ranges [d1,d2] of an unwrapped arc seen from t0.
std::vector<std::pair<Rat, Rat>> distance_ranges(const Arc& arc, const Rat& t0) {
    std::vector<std::pair<Rat, Rat>> out;
    for (const DistanceRange& dr : distance_pieces(arc, t0)) out.emplace_back(dr.d1, dr.d2);
    return out;
}

Real int_log_dist(const Rat& d1, const Rat& d2) {
    // int_{d1}^{d2} log s ds = [s (log s - 1)]
    auto F = [](const Rat& d) {
        if (d.is_zero()) return Real(0L);
        Real s(d);
        return s * (log(s) - Real(1L));
    };
    return F(d2) - F(d1);
}

Real int_inv_pow_dist(const Rat& d1, const Rat& d2, const Rat& q) {
    // int_{d1}^{d2} s^{-q} ds; diverges at d1 = 0 for q >= 1 (callers guard)
    Real a(d1), b(d2), qq(q);
    if (d1.is_zero()) return Real::inf();
    if (q == Rat(1L)) return log(b) - log(a);
    Real e = Real(1L) - qq;
    return (pow(b, e) - pow(a, e)) / e;
}

// int log(sin(pi s)) ds over [d1,d2] subset of [0,1/2]:
// split as int log(pi s) (closed form) + int log(sin(pi s)/(pi s)) (smooth).
Real int_log_sin(const Rat& d1, const Rat& d2) {
    Real pi = Real::pi();
    Real closed = int_log_dist(d1, d2) + Real(d2 - d1) * log(pi);
    auto f = [&](const Real& s) {
        if (s.is_zero()) return Real(0L);
        Real ps = pi * s;
        return log(sin(ps) / ps);
    };
    QuadResult q = integrate_adaptive(f, Real(d1), Real(d2), Real::pow2(-(long)working_precision() / 2),
                                      Real::pow2(-(long)working_precision()));
    return closed + q.value;
}

struct PieceLogIntegral {
    bool finite;
    Real value;
    Real error;
};

// int over `ov` (subarc of piece.arc) of log w dm, symbolic verdict first.
PieceLogIntegral piece_log_integral(const BoundaryWeight& w, const WeightPiece& piece, const Arc& ov) {
    if (w.log_verdict(piece, ov) == LogVerdict::Divergent)
        return {false, Real::inf(-1), Real(0L)};
    return std::visit(
        [&](const auto& prof) -> PieceLogIntegral {
            using T = std::decay_t<decltype(prof)>;
            if constexpr (std::is_same_v<T, ConstProfile>) {
                return {true, Real(ov.len) * log(Real(prof.value)), Real(0L)};
            } else if constexpr (std::is_same_v<T, PowerCuspProfile>) {
                Real v = Real(ov.len) * log(Real(prof.amp));
                for (const auto& [d1, d2] : distance_ranges(ov, prof.t0))
                    v += Real(prof.p) * int_log_dist(d1, d2);
                return {true, v, Real(0L)};
            } else if constexpr (std::is_same_v<T, ExpCuspProfile>) {
                Real v(0L);
                for (const auto& [d1, d2] : distance_ranges(ov, prof.t0))
                    v -= int_inv_pow_dist(d1, d2, prof.q);
                return {true, v, Real(0L)};
            } else if constexpr (std::is_same_v<T, SinPowerProfile>) {
                Real v = Real(ov.len) * log(Real(prof.amp));
                for (const auto& [d1, d2] : distance_ranges(ov, prof.t0))
                    v += Real(prof.p) * int_log_sin(d1, d2);
                return {true, v, Real::pow2(-(long)working_precision() / 2 + 8)};
            } else {
                // Zero / CantorIndicator are always divergent on an arc overlap
                return {false, Real::inf(-1), Real(0L)};
            }
        },
        piece.profile);
}

}  // namespace

SzegoMeanResult szego_mean(const BoundaryWeight& w) { return szego_mean(w, CircleSet::full_circle()); }

SzegoMeanResult szego_mean(const BoundaryWeight& w, const CircleSet& S) {
    SzegoMeanResult out{true, Real(0L), Real(0L), Real(0L)};
    for (const Arc& sa : S.arcs()) {
        for (const WeightPiece& p : w.pieces()) {
            Arc ov = intersect_unwrapped(p.arc, sa);
            if (ov.len.sign() <= 0) continue;
            PieceLogIntegral pli = piece_log_integral(w, p, ov);
            if (!pli.finite) {
                out.finite = false;
                out.log_integral = Real::inf(-1);
                out.geometric_mean = Real(0L);
                return out;
            }
            out.log_integral += pli.value;
            out.error += pli.error;
        }
    }
    for (const CantorPart& cp : S.cantor_parts()) {
        // supported only when the part coincides with a cantor piece of w
        bool matched = false;
        for (const WeightPiece& p : w.pieces()) {
            if (const auto* ci = std::get_if<CantorIndicatorProfile>(&p.profile)) {
                if (ci->set == cp.set) {
                    out.log_integral += Real(cp.set->limit_measure()) * log(Real(ci->value));
                    matched = true;
                    break;
                }
            }
        }
        if (!matched)
            throw std::invalid_argument("szego_mean: cantor part of S does not match any piece of w");
    }
    out.geometric_mean = exp(out.log_integral);
    return out;
}

Rat cantor_measure_before(const FatCantorSet& set, int stage, const Rat& t) {
    Rat u = (t - set.base().start).frac();
    if (u >= set.base().len) return set.stage_measure(stage);
    Rat acc(0L);
    Rat len = set.base().len;
    Rat off = u;
    for (int j = 1; j <= stage; ++j) {
        Rat r = set.ratio(j);
        Rat child = len * (Rat(1L) - r) / Rat(2L);
        Rat child_mass = set.stage_measure(stage) / Rat::pow2(j);
        if (off < child) {
            len = child;
        } else if (off >= len - child) {
            acc += child_mass;
            off -= len - child;
            len = child;
        } else {
            return acc + child_mass;  // inside the gap: left child fully before
        }
    }
    return acc + off;  // inside a stage-`stage` arc
}

Rat cantor_measure_in(const FatCantorSet& set, int stage, const Arc& arc) {
    if (arc.is_full_circle()) return set.stage_measure(stage);
    Rat total(0L);
    for (const Arc& part : arc.unwrapped()) {
        Rat ua = (part.start - set.base().start).frac();
        Rat ub = (part.end() - set.base().start).frac();
        Rat ba = cantor_measure_before(set, stage, part.start);
        Rat bb = cantor_measure_before(set, stage, part.end());
        if (ub > ua || ub.is_zero())
            total += bb.is_zero() && ub.is_zero() ? set.stage_measure(stage) - ba : bb - ba;
        else
            total += set.stage_measure(stage) - ba + bb;
    }
    return total;
}

ValueWithError arc_mass(const BoundaryWeight& w, const Arc& arc) {
    ValueWithError out{Real(0L), Real(0L)};
    for (const Arc& part : arc.unwrapped()) {
        for (const WeightPiece& p : w.pieces()) {
            Arc ov = intersect_unwrapped(p.arc, part);
            if (ov.len.sign() <= 0) continue;
            std::visit(
                [&](const auto& prof) {
                    using T = std::decay_t<decltype(prof)>;
                    if constexpr (std::is_same_v<T, ZeroProfile>) {
                        // nothing
                    } else if constexpr (std::is_same_v<T, ConstProfile>) {
                        out.value += Real(prof.value) * Real(ov.len);
                    } else if constexpr (std::is_same_v<T, PowerCuspProfile>) {
                        // amp * int d^p: exact power antiderivative
                        Real e = Real(prof.p) + Real(1L);
                        for (const auto& [d1, d2] : distance_ranges(ov, prof.t0))
                            out.value += Real(prof.amp) * (pow(Real(d2), e) - pow(Real(d1), e)) / e;
                    } else if constexpr (std::is_same_v<T, CantorIndicatorProfile>) {
                        out.value += Real(prof.value) * Real(cantor_measure_in(*prof.set, prof.stage, ov));
                        out.error += Real(prof.value) *
                                     Real(prof.set->stage_measure(prof.stage) - prof.set->limit_measure());
                    } else if constexpr (std::is_same_v<T, ExpCuspProfile>) {
                        // integrate exp(-1/d^q) in the distance coordinate
                        auto g = [&](const Real& d) {
                            if (d.is_zero() || d.sign() < 0) return Real(0L);
                            return exp(-pow(d, -Real(prof.q)));
                        };
                        for (const auto& [d1, d2] : distance_ranges(ov, prof.t0)) {
                            QuadResult q = integrate_adaptive(
                                g, Real(d1), Real(d2), Real::pow2(-(long)working_precision() / 2),
                                Real::pow2(-(long)working_precision()));
                            out.value += q.value;
                            out.error += q.error;
                        }
                    } else {
                        // sin-power: amp |sin(pi d)|^p in the distance coordinate
                        auto g = [&](const Real& d) {
                            Real c, s;
                            sincos_turn(d / Real(2L), c, s);
                            return Real(prof.amp) * pow(abs(s), Real(prof.p));
                        };
                        for (const auto& [d1, d2] : distance_ranges(ov, prof.t0)) {
                            QuadResult q = integrate_adaptive(
                                g, Real(d1), Real(d2), Real::pow2(-(long)working_precision() / 2),
                                Real::pow2(-(long)working_precision()));
                            out.value += q.value;
                            out.error += q.error;
                        }
                    }
                },
                p.profile);
        }
    }
    return out;
}

ValueWithError total_mass(const BoundaryWeight& w) {
    return arc_mass(w, Arc(Rat(0L), Rat(1L)));
}

FourierCoeff fourier_w(const BoundaryWeight& w, long k) {
    FourierCoeff out{k, Complex(Real(0L), Real(0L)), Real(0L)};
    const Real two_pi = Real(2L) * Real::pi();
    for (const WeightPiece& p : w.pieces()) {
        std::visit(
            [&](const auto& prof) {
                using T = std::decay_t<decltype(prof)>;
                if constexpr (std::is_same_v<T, ZeroProfile>) {
                    // nothing
                } else if constexpr (std::is_same_v<T, ConstProfile>) {
                    Real v(prof.value);
                    if (k == 0) {
                        out.value += Complex(v * Real(p.arc.len), Real(0L));
                    } else {
                        // int_a^b e^{-2 pi i k t} dt = i (E(b) - E(a)) / (2 pi k)
                        Complex Eb = Complex::unit_turn(Real(-k) * Real(p.arc.end()));
                        Complex Ea = Complex::unit_turn(Real(-k) * Real(p.arc.start));
                        Complex diff = Eb - Ea;
                        Complex i_over(Real(0L), Real(1L) / (two_pi * Real(k)));
                        out.value += (i_over * diff) * v;
                    }
                } else if constexpr (std::is_same_v<T, CantorIndicatorProfile>) {
                    const FatCantorSet& cs = *prof.set;
                    int K = prof.stage;
                    Real v(prof.value);
                    out.error_bound += v * Real(cs.stage_measure(K) - cs.limit_measure());
                    if (k == 0) {
                        out.value += Complex(v * Real(cs.stage_measure(K)), Real(0L));
                    } else {
                        // product formula over the binary center tree
                        Real L(cs.stage_arc_len(K));
                        Real kk((long)k);
                        Real box = sin(Real::pi() * kk * L) / (Real::pi() * kk);
                        Real prod(1L);
                        for (int j = 1; j <= K; ++j) {
                            Real cj, sj;
                            sincos_turn(kk * Real(cs.center_offset(j)), cj, sj);
                            prod *= Real(2L) * cj;
                        }
                        Complex phase = Complex::unit_turn(Real(-k) * Real(cs.center0()));
                        out.value += phase * (v * box * prod);
                    }
                } else {
                    // cusp / sin-power profiles: adaptive quadrature of w(t) e^{-2 pi i k t}
                    auto wval = [&](const Real& t) -> Real {
                        if constexpr (std::is_same_v<T, PowerCuspProfile>) {
                            Real dt = t - Real(prof.t0);
                            Real fr = dt - floor(dt);
                            Real d = min(fr, Real(1L) - fr);
                            return Real(prof.amp) * pow(d, Real(prof.p));
                        } else if constexpr (std::is_same_v<T, ExpCuspProfile>) {
                            Real dt = t - Real(prof.t0);
                            Real fr = dt - floor(dt);
                            Real d = min(fr, Real(1L) - fr);
                            if (d.is_zero()) return Real(0L);
                            return exp(-pow(d, -Real(prof.q)));
                        } else {
                            Real c, s;
                            sincos_turn((t - Real(prof.t0)) / Real(2L), c, s);
                            return Real(prof.amp) * pow(abs(s), Real(prof.p));
                        }
                    };
                    Real a(p.arc.start), b(p.arc.end());
                    std::vector<Real> hints;
                    if constexpr (!std::is_same_v<T, SinPowerProfile>) {
                        Real t0(prof.t0);
                        for (Real cand : {t0, t0 - Real(1L), t0 + Real(1L)})
                            if (cand > a && cand < b) hints.push_back(cand);
                    }
                    Real rel = Real::pow2(-(long)working_precision() / 2 - 4);
                    Real floor_tol = Real::pow2(-(long)working_precision());
                    auto fre = [&](const Real& t) {
                        Real c, s;
                        sincos_turn(Real(-k) * t, c, s);
                        return wval(t) * c;
                    };
                    auto fim = [&](const Real& t) {
                        Real c, s;
                        sincos_turn(Real(-k) * t, c, s);
                        return wval(t) * s;
                    };
                    QuadResult qre = integrate_adaptive(fre, a, b, rel, floor_tol, hints);
                    QuadResult qim = integrate_adaptive(fim, a, b, rel, floor_tol, hints);
                    out.value += Complex(qre.value, qim.value);
                    out.error_bound += qre.error + qim.error;
                }
            },
            p.profile);
    }
    return out;
}

}  // namespace p2mu
