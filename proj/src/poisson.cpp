#include "p2mu/poisson.hpp"

#include "p2mu/moments.hpp"
#include "p2mu/quadrature.hpp"

#include <algorithm>
#include <stdexcept>

namespace p2mu {

namespace {

Real dist_real(const Real& t, const Rat& t0) {
    Real dt = t - Real(t0);
    Real fr = dt - floor(dt);
    return min(fr, Real(1L) - fr);
}

// antiderivative of s^{-q}
Real invpow_antideriv(const Real& s, const Rat& q) {
    if (q == Rat(1L)) return log(s);
    Real e = Real(1L) - Real(q);
    return pow(s, e) / e;
}

}  // namespace

Real InvPowerPiece::value(const Rat& t) const {
    if (!support.contains(t)) return Real(0L);
    Rat d = circular_dist(t, t0);
    if (d.is_zero()) return Real::inf(coef.sign());
    return coef * pow(Real(d), -Real(q));
}

Real InvPowerPiece::value(const Real& t) const {
    Real d = dist_real(t, t0);
    return coef * pow(d, -Real(q));
}

Real InvPowerPiece::integral(const Arc& sub) const {
    Real acc(0L);
    for (const Arc& part : sub.unwrapped()) {
        for (const Arc& sp : support.unwrapped()) {
            Arc ov = intersect_unwrapped(part, sp);
            if (ov.len.sign() <= 0) continue;
            for (const auto& dr : distance_pieces(ov, t0)) {
                if (dr.d1.is_zero()) throw std::domain_error("InvPowerPiece: divergent at t0");
                acc += invpow_antideriv(Real(dr.d2), q) - invpow_antideriv(Real(dr.d1), q);
            }
        }
    }
    return coef * acc;
}

StepProfile::StepProfile() : mean_(0L) {}

StepProfile::StepProfile(std::vector<StepPiece> steps, std::vector<InvPowerPiece> analytic)
    : analytic_(std::move(analytic)), mean_(0L) {
    for (StepPiece& s : steps)
        for (const Arc& part : s.arc.unwrapped()) steps_.push_back({part, s.value});
    std::sort(steps_.begin(), steps_.end(),
              [](const StepPiece& x, const StepPiece& y) { return x.arc.start < y.arc.start; });
    for (size_t i = 1; i < steps_.size(); ++i)
        if (steps_[i].arc.start < steps_[i - 1].arc.end())
            throw std::invalid_argument("StepProfile: overlapping steps");
    mean_ = recompute_mean();
}

Real StepProfile::recompute_mean() const {
    Real m(0L);
    for (const StepPiece& s : steps_) m.add_prod(s.value, Real(s.arc.len));
    for (const InvPowerPiece& a : analytic_) m += a.integral();
    return m;
}

Real StepProfile::value_at(const Rat& t) const {
    Rat u = t.frac();
    Real v(0L);
    // binary search over sorted non-wrapping steps
    size_t lo = 0, hi = steps_.size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (steps_[mid].arc.end() <= u) lo = mid + 1; else hi = mid;
    }
    if (lo < steps_.size() && steps_[lo].arc.start <= u && u < steps_[lo].arc.end())
        v += steps_[lo].value;
    for (const InvPowerPiece& a : analytic_) v += a.value(u);
    return v;
}

Real StepProfile::l1_norm() const {
    Real m(0L);
    for (const StepPiece& s : steps_) m.add_prod(abs(s.value), Real(s.arc.len));
    for (const InvPowerPiece& a : analytic_) m += a.l1();
    return m;
}

StepProfile StepProfile::scaled(const Real& factor) const {
    StepProfile out;
    out.steps_ = steps_;
    for (StepPiece& s : out.steps_) s.value *= factor;
    out.analytic_ = analytic_;
    for (InvPowerPiece& a : out.analytic_) a.coef *= factor;
    out.mean_ = mean_ * factor;
    return out;
}

std::vector<Rat> StepProfile::breakpoints() const {
    std::vector<Rat> bp;
    for (const StepPiece& s : steps_) {
        bp.push_back(s.arc.start);
        bp.push_back(s.arc.end().frac());
    }
    for (const InvPowerPiece& a : analytic_) {
        bp.push_back(a.support.start);
        bp.push_back(a.support.end().frac());
        bp.push_back(a.t0.frac());
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

Complex herglotz_arc(const Arc& I, const Complex& z) {
    const long prec = (long)working_precision();
    Real zr = z.abs();
    if (zr >= Real(1L) - Real::pow2(-prec / 4))
        throw std::domain_error("herglotz_arc: |z| within 2^-prec/4 of the unit circle");
    if (I.is_full_circle()) return Complex(Real(1L), Real(0L));

    const Real pi = Real::pi();
    const Real two_pi = Real(2L) * pi;
    Complex H(Real(0L), Real(0L));
    // Split so every piece has length <= 1/2: the subtended-angle increment
    // then lies in (0, 3pi/2) and the principal value plus positivity fixes
    // the branch unambiguously.
    std::vector<Arc> parts;
    for (const Arc& p : I.unwrapped()) {
        if (p.len > Rat(1L, 2L)) {
            Rat half_len = p.len / Rat(2L);
            parts.emplace_back(p.start, half_len);
            parts.emplace_back((p.start + half_len).frac(), p.len - half_len);
        } else {
            parts.push_back(p);
        }
    }
    for (const Arc& p : parts) {
        Complex xa = Complex::unit_turn(Real(p.start));
        Complex xb = Complex::unit_turn(Real(p.end()));
        Complex da = xa - z;
        Complex db = xb - z;
        Complex w = db * da.conj();
        Real darg = atan2(w.im, w.re);
        if (darg <= Real(0L)) darg += two_pi;
        Real dlog = (log(db.norm()) - log(da.norm())) / Real(2L);
        H += Complex((darg / pi) - Real(p.len), -dlog / pi);
    }
    return H;
}

Real poisson_kernel(const Complex& z, const Real& t) {
    Complex xi = Complex::unit_turn(t);
    Complex d = xi - z;
    return (Real(1L) - z.norm()) / d.norm();
}

Real poisson_integral(const StepProfile& f, const Complex& z) {
    Real acc(0L);
    for (const StepPiece& s : f.steps()) acc.add_prod(s.value, herglotz_arc(s.arc, z).re);
    if (!f.analytic_pieces().empty()) {
        const long prec = (long)working_precision();
        Real tz = z.arg() / (Real(2L) * Real::pi());
        for (const InvPowerPiece& a : f.analytic_pieces()) {
            auto g = [&](const Real& t) { return a.value(t) * poisson_kernel(z, t); };
            for (const Arc& part : a.support.unwrapped()) {
                std::vector<Real> hints;
                Real pa(part.start), pb(part.end());
                for (Real cand : {tz, tz - Real(1L), tz + Real(1L)})
                    if (cand > pa && cand < pb) hints.push_back(cand);
                QuadResult q = integrate_adaptive(g, pa, pb, Real::pow2(-prec / 2), Real::pow2(-prec), hints);
                acc += q.value;
            }
        }
    }
    return acc;
}

OuterValue outer_eval(const StepProfile& f, const Complex& z) {
    Complex acc(Real(0L), Real(0L));
    for (const StepPiece& s : f.steps()) acc.add_prod(Complex(s.value), herglotz_arc(s.arc, z));
    if (!f.analytic_pieces().empty()) {
        const long prec = (long)working_precision();
        Real tz = z.arg() / (Real(2L) * Real::pi());
        for (const InvPowerPiece& a : f.analytic_pieces()) {
            // (xi+z)/(xi-z) * value(t), integrated as two real integrals
            auto kern = [&](const Real& t) {
                Complex xi = Complex::unit_turn(t);
                return (xi + z) / (xi - z);
            };
            auto gre = [&](const Real& t) { return a.value(t) * kern(t).re; };
            auto gim = [&](const Real& t) { return a.value(t) * kern(t).im; };
            for (const Arc& part : a.support.unwrapped()) {
                std::vector<Real> hints;
                Real pa(part.start), pb(part.end());
                for (Real cand : {tz, tz - Real(1L), tz + Real(1L)})
                    if (cand > pa && cand < pb) hints.push_back(cand);
                QuadResult qre = integrate_adaptive(gre, pa, pb, Real::pow2(-prec / 2), Real::pow2(-prec), hints);
                QuadResult qim = integrate_adaptive(gim, pa, pb, Real::pow2(-prec / 2), Real::pow2(-prec), hints);
                acc += Complex(qre.value, qim.value);
            }
        }
    }
    return OuterValue{acc};
}

VariationCheck variation_sum_check(const std::vector<Arc>& arcs, const Real& r) {
    if (r < Real(0L) || r >= Real(1L)) throw std::domain_error("variation_sum_check: r in [0,1)");
    // disjointness check
    CircleSet::from_arcs(arcs);
    auto P = [&](const Rat& d) {
        Real c, s;
        sincos_turn(Real(d), c, s);
        Real denom = Real(1L) - Real(2L) * r * c + r * r;
        return (Real(1L) - r * r) / denom;
    };
    const Rat origin(0L);
    Real sum(0L);
    for (const Arc& a : arcs) {
        Rat dn = dist_to_arc(origin, a);
        Rat df = max_dist_to_arc(origin, a);
        sum += P(dn) - P(df);
    }
    Real bound = Real(4L) / (Real(1L) - r);
    return {sum, bound, sum <= bound};
}

// ---------------------------------------------------------------------------
// log-modulus profiles

namespace {

// Exact L1 error of replacing an increasing integrand f on [a,b] by its mean,
// given the antiderivative A and the crossing point c where f = mean.
Real mean_l1_error(const Real& a, const Real& b, const Real& c, const Real& mean,
                   const std::function<Real(const Real&)>& A) {
    Real cc = min(max(c, a), b);  // rounding can push the crossing past an edge
    Real below = mean * (cc - a) - (A(cc) - A(a));
    Real above = (A(b) - A(cc)) - mean * (b - cc);
    return max(below, Real(0L)) + max(above, Real(0L));
}

struct CuspSteps {
    std::vector<StepPiece> steps;
    Real err;
};

// Discretize value(t) = base + slope*log(dist) (slope>0) or value = -dist^{-q}
// over a monotone-distance subarc into `resolution` equal pieces.
CuspSteps discretize_log_shape(const DistanceRange& dr, const Real& base, const Real& slope,
                               int resolution) {
    CuspSteps out{{}, Real(0L)};
    Real a(dr.d1), b(dr.d2);
    auto F = [](const Real& s) { return s.is_zero() ? Real(0L) : s * (log(s) - Real(1L)); };
    Real width = (b - a) / Real((long)resolution);
    for (int i = 0; i < resolution; ++i) {
        Real da = a + width * Real((long)i);
        Real db = (i + 1 == resolution) ? b : a + width * Real((long)(i + 1));
        Real mean_log = (F(db) - F(da)) / (db - da);
        Real val = base + slope * mean_log;
        Real c = exp(mean_log);
        Real err = slope * mean_l1_error(da, db, c, mean_log, [&](const Real& s) { return F(s); });
        // map the distance cell back to an arc
        Rat cell_d1 = dr.d1 + (dr.d2 - dr.d1) * Rat(i, resolution);
        Rat cell_d2 = (i + 1 == resolution) ? dr.d2 : dr.d1 + (dr.d2 - dr.d1) * Rat(i + 1, resolution);
        Rat s, l = cell_d2 - cell_d1;
        if (dr.increasing)
            s = (dr.sub.start + (cell_d1 - dr.d1)).frac();
        else
            s = (dr.sub.start + (dr.d2 - cell_d2)).frac();
        out.steps.push_back({Arc(s, l), val});
        out.err += err;
    }
    return out;
}

CuspSteps discretize_invpow(const DistanceRange& dr, const Rat& q, int resolution) {
    CuspSteps out{{}, Real(0L)};
    auto A = [&](const Real& s) { return -invpow_antideriv(s, q); };  // antiderivative of -s^{-q}
    Real a(dr.d1), b(dr.d2);
    Real width = (b - a) / Real((long)resolution);
    for (int i = 0; i < resolution; ++i) {
        Real da = a + width * Real((long)i);
        Real db = (i + 1 == resolution) ? b : a + width * Real((long)(i + 1));
        Real mean = (A(db) - A(da)) / (db - da);
        Real c = pow(-mean, -Real(1L) / Real(q));  // crossing: -c^{-q} = mean
        Real err = mean_l1_error(da, db, c, mean, A);
        Rat cell_d1 = dr.d1 + (dr.d2 - dr.d1) * Rat(i, resolution);
        Rat cell_d2 = (i + 1 == resolution) ? dr.d2 : dr.d1 + (dr.d2 - dr.d1) * Rat(i + 1, resolution);
        Rat s, l = cell_d2 - cell_d1;
        if (dr.increasing)
            s = (dr.sub.start + (cell_d1 - dr.d1)).frac();
        else
            s = (dr.sub.start + (dr.d2 - cell_d2)).frac();
        out.steps.push_back({Arc(s, l), mean});
        out.err += err;
    }
    return out;
}

}  // namespace

LogModulusResult log_modulus_profile(const BoundaryWeight& w, const Arc& I, int resolution) {
    if (resolution < 1) throw std::invalid_argument("log_modulus_profile: resolution >= 1");
    SzegoMeanResult sm = szego_mean(w, CircleSet::from_arcs({I}));
    if (!sm.finite)
        throw std::domain_error("log_modulus_profile: log w is not integrable on I");

    std::vector<StepPiece> steps;
    Real err(0L);
    for (const Arc& part : I.unwrapped()) {
        for (const WeightPiece& p : w.pieces()) {
            Arc ov = intersect_unwrapped(p.arc, part);
            if (ov.len.sign() <= 0) continue;
            std::visit(
                [&](const auto& prof) {
                    using T = std::decay_t<decltype(prof)>;
                    if constexpr (std::is_same_v<T, ConstProfile>) {
                        if (prof.value < Rat(1L))
                            steps.push_back({ov, log(Real(prof.value))});
                        // w >= 1: log min(w,1) = 0, omitted
                    } else if constexpr (std::is_same_v<T, PowerCuspProfile>) {
                        // log min(amp d^p, 1) = log amp + p log d below the
                        // crossing distance d* = amp^{-1/p}, else 0
                        Real lamp = log(Real(prof.amp));
                        Real pr(prof.p);
                        Real dstar = exp(-lamp / pr);
                        for (const auto& dr : distance_pieces(ov, prof.t0)) {
                            DistanceRange active = dr;
                            if (Real(dr.d1) >= dstar) continue;  // modulus capped at 1
                            if (Real(dr.d2) > dstar) {
                                // trim to the region below d* at a nearby dyadic
                                // point just under d*; treat the sliver as 0
                                Rat dsr = Rat::from_double(dstar.to_double()) *
                                          (Rat(1L) - Rat::pow2(-40));
                                if (dsr <= dr.d1 || dsr >= dr.d2) dsr = dr.d2;
                                err += pr * Real::pow2(-38) * Real(dr.d2);
                                active.d2 = dsr;
                                Rat cut = dsr - dr.d1;
                                if (dr.increasing)
                                    active.sub = Arc(dr.sub.start, cut);
                                else
                                    active.sub = Arc((dr.sub.start + (dr.d2 - dsr)).frac(), cut);
                            }
                            CuspSteps cs = discretize_log_shape(active, lamp, pr, resolution);
                            for (auto& s : cs.steps) steps.push_back(std::move(s));
                            err += cs.err;
                        }
                    } else if constexpr (std::is_same_v<T, ExpCuspProfile>) {
                        for (const auto& dr : distance_pieces(ov, prof.t0)) {
                            CuspSteps cs = discretize_invpow(dr, prof.q, resolution);
                            for (auto& s : cs.steps) steps.push_back(std::move(s));
                            err += cs.err;
                        }
                    } else if constexpr (std::is_same_v<T, SinPowerProfile>) {
                        // log min(amp |sin pi d|^p, 1) = p log(pi d) + log amp
                        // + p log sinc(pi d), capped at 0
                        Real lamp = log(Real(prof.amp));
                        Real pr(prof.p);
                        Real pi = Real::pi();
                        for (const auto& dr : distance_pieces(ov, prof.t0)) {
                            CuspSteps cs =
                                discretize_log_shape(dr, lamp + pr * log(pi), pr, resolution);
                            // add the smooth sinc correction per cell at the cell
                            // midpoint; bound its variation crudely
                            for (auto& s : cs.steps) {
                                Rat mid = (s.arc.start + s.arc.len / Rat(2L)).frac();
                                Real d = Real(circular_dist(mid, prof.t0));
                                Real corr = d.is_zero() ? Real(0L) : pr * log(sin(pi * d) / (pi * d));
                                s.value += corr;
                                if (s.value > Real(0L)) s.value = Real(0L);  // cap at modulus 1
                                steps.push_back(s);
                            }
                            err += cs.err + pr * Real(dr.d2 - dr.d1) * Real(dr.d2) * Real(4L);
                        }
                    } else {
                        // Zero / CantorIndicator overlaps contradict the
                        // precondition checked above
                        throw std::domain_error("log_modulus_profile: divergent profile overlap");
                    }
                },
                p.profile);
        }
    }
    return {StepProfile(std::move(steps)), err};
}

}  // namespace p2mu
