#include "p2mu/weights.hpp"

#include "p2mu/quadrature.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace p2mu {

// ---------------------------------------------------------------------------
// FatCantorSet

FatCantorSet::FatCantorSet(Arc base, bool geometric, Rat param)
    : base_(std::move(base)), geometric_(geometric), param_(std::move(param)) {}

std::shared_ptr<const FatCantorSet> FatCantorSet::geometric(Arc base, Rat target_measure) {
    if (target_measure.sign() <= 0 || target_measure >= base.len)
        throw std::invalid_argument("FatCantorSet: target measure must be in (0, |base|)");
    Rat rho = target_measure / base.len;
    return std::shared_ptr<const FatCantorSet>(new FatCantorSet(std::move(base), true, rho));
}

std::shared_ptr<const FatCantorSet> FatCantorSet::constant_ratio(Arc base, Rat ratio) {
    if (ratio.sign() <= 0 || ratio >= Rat(1L))
        throw std::invalid_argument("FatCantorSet: ratio must be in (0,1)");
    return std::shared_ptr<const FatCantorSet>(new FatCantorSet(std::move(base), false, ratio));
}

Rat FatCantorSet::ratio(int k) const {
    if (k < 1) throw std::invalid_argument("FatCantorSet::ratio: k >= 1");
    if (!geometric_) return param_;
    // r_k = (1-rho) 2^-k / (rho + (1-rho) 2^-(k-1))
    Rat one(1L);
    Rat num = (one - param_) * Rat::pow2(-k);
    Rat den = param_ + (one - param_) * Rat::pow2(-(k - 1));
    return num / den;
}

Rat FatCantorSet::stage_measure(int k) const {
    if (k < 0) throw std::invalid_argument("FatCantorSet::stage_measure: k >= 0");
    if (geometric_)
        return base_.len * (param_ + (Rat(1L) - param_) * Rat::pow2(-k));
    Rat m = base_.len;
    for (int j = 1; j <= k; ++j) m *= (Rat(1L) - param_);
    return m;
}

Rat FatCantorSet::limit_measure() const {
    return geometric_ ? base_.len * param_ : Rat(0L);
}

std::vector<Arc> FatCantorSet::stage_arcs(int k) const {
    // Work in unreduced coordinates (base.start + offset) and reduce at the end.
    struct Seg { Rat s; };
    std::vector<Rat> starts{base_.start};
    Rat len = base_.len;
    for (int j = 1; j <= k; ++j) {
        Rat r = ratio(j);
        Rat child = len * (Rat(1L) - r) / Rat(2L);
        std::vector<Rat> next;
        next.reserve(starts.size() * 2);
        for (const Rat& s : starts) {
            next.push_back(s);
            next.push_back(s + len - child);
        }
        starts = std::move(next);
        len = child;
    }
    std::vector<Arc> out;
    out.reserve(starts.size());
    for (const Rat& s : starts) out.emplace_back(s, len);
    return out;
}

FatCantorSet::Membership FatCantorSet::decide(const Rat& t, int stage) const {
    Rat u = (t - base_.start).frac();  // offset within the base arc
    if (u >= base_.len) return {false, true, 0};
    Rat len = base_.len;
    Rat off = u;  // position within current arc, in [0, len)
    for (int j = 1; j <= stage; ++j) {
        Rat r = ratio(j);
        Rat child = len * (Rat(1L) - r) / Rat(2L);
        if (off < child) {
            len = child;  // left child, offset unchanged
        } else if (off >= len - child) {
            off -= len - child;
            len = child;
        } else {
            return {false, true, j};  // fell in the gap removed at generation j
        }
    }
    // Arc endpoints survive every later generation.
    bool endpoint = off.is_zero();
    return {true, endpoint, stage};
}

std::string FatCantorSet::describe() const {
    std::ostringstream os;
    os << "cantor(base=[" << base_.start.str() << "," << base_.end().str() << ")";
    if (geometric_)
        os << ",geometric,target=" << limit_measure().str();
    else
        os << ",ratio=" << param_.str();
    os << ")";
    return os.str();
}

FatCantorStage fat_cantor_stage(const FatCantorSet& spec, int k) {
    FatCantorStage st;
    st.arcs = CircleSet::from_arcs(spec.stage_arcs(k));
    st.measure = spec.stage_measure(k);
    st.sym_diff_bound = st.measure - spec.limit_measure();
    return st;
}

// ---------------------------------------------------------------------------
// Carleson sums

namespace {

void accumulate_arc_sums(const Real& len, const Real& alpha, Real& sum_a, Real& sum_bc) {
    sum_a += pow(len, alpha);
    if (len < Real(1L)) sum_bc += len * log(Real(1L) / len);
}

}  // namespace

CarlesonSums carleson_sums(const std::vector<Arc>& arcs, const Real& alpha) {
    CarlesonSums cs{true, Real(0L), Real(0L), true, Real(0L), Real(0L)};
    for (const Arc& a : arcs) accumulate_arc_sums(Real(a.len), alpha, cs.sum_alpha, cs.sum_bc);
    return cs;
}

CarlesonSums carleson_sums(const FatCantorSet& spec, const Real& alpha) {
    CarlesonSums cs{true, Real(0L), Real(0L), true, Real(0L), Real(0L)};
    const Real eps = Real::pow2(-static_cast<long>(working_precision()));
    Real prev_a = Real::nan(), prev_bc = Real::nan();
    bool a_done = false, bc_done = false;
    int grow_a = 0, grow_bc = 0;
    Real ratio_a(0L), ratio_bc(0L);
    for (int k = 1; k <= 600 && !(a_done && bc_done); ++k) {
        Real count(static_cast<long>(spec.gap_count(k)));
        Real g(spec.gap_len(k));
        Real term_a = count * pow(g, alpha);
        Real term_bc = count * g * log(Real(1L) / g);
        if (!a_done) {
            cs.sum_alpha += term_a;
            if (!prev_a.is_nan() && prev_a > Real(0L)) {
                ratio_a = term_a / prev_a;
                grow_a = (ratio_a >= Real(1L)) ? grow_a + 1 : 0;
                if (grow_a >= 12) { cs.alpha_finite = false; a_done = true; }
                if (ratio_a < Real(1L) && term_a <= eps * cs.sum_alpha) {
                    cs.alpha_tail = term_a * ratio_a / (Real(1L) - ratio_a);
                    a_done = true;
                }
            }
            prev_a = term_a;
        }
        if (!bc_done) {
            cs.sum_bc += term_bc;
            if (!prev_bc.is_nan() && prev_bc > Real(0L)) {
                ratio_bc = term_bc / prev_bc;
                grow_bc = (ratio_bc >= Real(1L)) ? grow_bc + 1 : 0;
                if (grow_bc >= 12) { cs.bc_finite = false; bc_done = true; }
                if (ratio_bc < Real(1L) && term_bc <= eps * cs.sum_bc) {
                    cs.bc_tail = term_bc * ratio_bc / (Real(1L) - ratio_bc);
                    bc_done = true;
                }
            }
            prev_bc = term_bc;
        }
    }
    if (!cs.alpha_finite) cs.sum_alpha = Real::inf();
    if (!cs.bc_finite) cs.sum_bc = Real::inf();
    return cs;
}

// ---------------------------------------------------------------------------
// RadialWeight

RadialWeight RadialWeight::power(Rat beta) {
    if (beta.sign() < 0) throw std::invalid_argument("power family: beta >= 0");
    RadialWeight g;
    g.family_ = Family::Power;
    g.beta_ = std::move(beta);
    g.rescale_ = true;  // raw G(1) = 1
    g.raw_at_one_ = Rat(1L);
    return g;
}

RadialWeight RadialWeight::expdec(Rat c) {
    if (c.sign() <= 0) throw std::invalid_argument("expdec family: c > 0");
    RadialWeight g;
    g.family_ = Family::ExpDec;
    g.c_ = std::move(c);
    return g;
}

RadialWeight RadialWeight::stretched_exp(Rat c, Rat alpha) {
    if (c.sign() <= 0) throw std::invalid_argument("stretched-exp family: c > 0");
    if (alpha.sign() <= 0 || alpha > Rat(1L))
        throw std::invalid_argument("stretched-exp family: alpha in (0,1]");
    RadialWeight g;
    g.family_ = Family::StretchedExp;
    g.c_ = std::move(c);
    g.alpha_ = std::move(alpha);
    return g;
}

RadialWeight RadialWeight::double_exp(Rat c) {
    if (c.sign() <= 0) throw std::invalid_argument("double-exp family: c > 0");
    RadialWeight g;
    g.family_ = Family::DoubleExp;
    g.c_ = std::move(c);
    return g;
}

RadialWeight RadialWeight::custom_table(std::vector<std::pair<Rat, Rat>> points) {
    if (points.size() < 2) throw std::invalid_argument("custom table: need >= 2 points");
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (points.back().first != Rat(1L))
        throw std::invalid_argument("custom table: last x must be 1");
    for (const auto& [x, gx] : points)
        if (x.sign() <= 0 || gx.sign() <= 0)
            throw std::invalid_argument("custom table: x and G values must be positive");
    RadialWeight g;
    g.family_ = Family::CustomTable;
    g.raw_at_one_ = points.back().second;
    g.rescale_ = g.raw_at_one_ >= Rat(1L);
    g.table_ = std::move(points);
    return g;
}

std::string RadialWeight::family_name() const {
    switch (family_) {
        case Family::Power: return "power";
        case Family::ExpDec: return "expdec";
        case Family::StretchedExp: return "stretched-exp";
        case Family::DoubleExp: return "double-exp";
        case Family::CustomTable: return "custom-table";
    }
    return "?";
}

std::string RadialWeight::describe() const {
    std::ostringstream os;
    os << family_name();
    switch (family_) {
        case Family::Power: os << "(beta=" << beta_.str() << ")"; break;
        case Family::ExpDec: os << "(c=" << c_.str() << ")"; break;
        case Family::StretchedExp: os << "(c=" << c_.str() << ",alpha=" << alpha_.str() << ")"; break;
        case Family::DoubleExp: os << "(c=" << c_.str() << ")"; break;
        case Family::CustomTable: os << "(" << table_.size() << " points)"; break;
    }
    return os.str();
}

Real RadialWeight::m(const Real& x) const {
    switch (family_) {
        case Family::Power: return Real(beta_) * log(Real(1L) / x);
        case Family::ExpDec: return Real(c_) / x;
        case Family::StretchedExp: return Real(c_) * pow(x, -Real(alpha_));
        case Family::DoubleExp: return exp(Real(c_) / x);
        case Family::CustomTable: {
            // piecewise-linear interpolation of m = -log G between table nodes
            Real xr = x;
            if (xr <= Real(table_.front().first)) xr = Real(table_.front().first);
            for (size_t i = 1; i < table_.size(); ++i) {
                Real x1(table_[i].first);
                if (xr <= x1 || i + 1 == table_.size()) {
                    Real x0(table_[i - 1].first);
                    Real m0 = -log(Real(table_[i - 1].second));
                    Real m1 = -log(Real(table_[i].second));
                    Real t = (xr - x0) / (x1 - x0);
                    return m0 + t * (m1 - m0);
                }
            }
            return -log(Real(table_.back().second));
        }
    }
    return Real::nan();
}

bool RadialWeight::has_mprime() const { return family_ != Family::CustomTable; }

Real RadialWeight::mprime(const Real& x) const {
    switch (family_) {
        case Family::Power: return -Real(beta_) / x;
        case Family::ExpDec: return -Real(c_) / (x * x);
        case Family::StretchedExp: {
            Real a(alpha_);
            return -Real(c_) * a * pow(x, -(a + Real(1L)));
        }
        case Family::DoubleExp: {
            Real cx = Real(c_) / x;
            return -(cx / x) * exp(cx);
        }
        case Family::CustomTable:
            throw std::logic_error("custom table has no derivative");
    }
    return Real::nan();
}

Real RadialWeight::scale() const {
    if (!rescale_) return Real(1L);
    return Real(1L) / (Real(2L) * Real(raw_at_one_));
}

Real RadialWeight::m_norm(const Real& x) const {
    if (!rescale_) return m(x);
    return m(x) - log(scale());
}

Real RadialWeight::eval_raw(const Real& x) const {
    if (!(x > Real(0L)) || x > Real(1L)) throw std::domain_error("RadialWeight: x must be in (0,1]");
    return exp(-m(x));
}

Real RadialWeight::eval(const Real& x) const { return scale() * eval_raw(x); }

RadialWeight::ExpDecResult RadialWeight::check_exp_dec() const {
    switch (family_) {
        case Family::Power:
            // inf of x*beta*log(1/x) on (0,1] is 0, attained at x = 1
            return {false, Real(0L), false};
        case Family::ExpDec:
            return {true, Real(c_), false};
        case Family::StretchedExp:
            if (alpha_ == Rat(1L)) return {true, Real(c_), false};
            return {false, Real(0L), false};  // c x^{1-alpha} -> 0
        case Family::DoubleExp: {
            // x e^{c/x} has its minimum on (0,1] at x = min(c,1)
            Real c(c_);
            Real d = (c_ <= Rat(1L)) ? c * exp(Real(1L)) : exp(c);
            return {true, d, false};
        }
        case Family::CustomTable: {
            // refining dyadic grid; report the observed floor, estimate only
            Real best = Real::inf();
            for (int level = 2; level <= 16; ++level) {
                long n = 1L << level;
                for (long i = 1; i <= n; ++i) {
                    Real x = Real(Rat(i, n));
                    best = min(best, x * m(x));
                }
            }
            return {best > Real::pow2(-40), best, true};
        }
    }
    return {false, Real(0L), true};
}

RadialWeight::LogLogResult RadialWeight::check_loglog_int() const {
    // Integral of log(m_norm(x)) over (0,1); m_norm > 0 after normalization.
    switch (family_) {
        case Family::ExpDec:
            // closed form: integral of log(c/x) = log c + 1
            return {true, log(Real(c_)) + Real(1L), Real(0L), false};
        case Family::StretchedExp:
            // integral of log(c x^-alpha) = log c + alpha
            return {true, log(Real(c_)) + Real(alpha_), Real(0L), false};
        case Family::DoubleExp:
            // log m = c/x, divergent; detected analytically
            return {false, Real::inf(), Real(0L), false};
        case Family::Power: {
            if (beta_.is_zero()) {
                // constant raw family, m_norm = log 2
                Real v = log(log(Real(2L)));
                return {true, v, Real(0L), false};
            }
            // substitute x = e^{-u}: integral_0^inf log(beta u + log 2) e^{-u} du
            Real beta(beta_);
            Real lg2 = log(Real(2L));
            auto f = [&](const Real& u) { return log(beta * u + lg2) * exp(-u); };
            Real U = Real(static_cast<long>(working_precision())) * Real(0.70) + Real(30L);
            QuadResult q = integrate_adaptive(f, Real(0L), U, Real::pow2(-(long)working_precision() / 2),
                                              Real::pow2(-(long)working_precision()));
            Real tail = exp(-U) * (log(beta * U + lg2) + Real(1L));
            return {true, q.value, q.error + tail, false};
        }
        case Family::CustomTable: {
            Real lo(table_.front().first);
            auto f = [&](const Real& x) { return log(m_norm(x)); };
            QuadResult q = integrate_adaptive(f, lo, Real(1L) - Real::pow2(-30),
                                              Real::pow2(-(long)working_precision() / 2),
                                              Real::pow2(-(long)working_precision()));
            return {true, q.value, q.error, true};
        }
    }
    return {false, Real::nan(), Real(0L), true};
}

// ---------------------------------------------------------------------------
// BoundaryWeight

std::string profile_name(const WeightProfile& p) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ZeroProfile>) return "zero";
            else if constexpr (std::is_same_v<T, ConstProfile>) return "const";
            else if constexpr (std::is_same_v<T, PowerCuspProfile>) return "power-cusp";
            else if constexpr (std::is_same_v<T, ExpCuspProfile>) return "exp-cusp";
            else if constexpr (std::is_same_v<T, CantorIndicatorProfile>) return "cantor-indicator";
            else return "sin-power";
        },
        p);
}

BoundaryWeight::BoundaryWeight(std::vector<WeightPiece> in) {
    for (WeightPiece& p : in) {
        for (const Arc& piece : p.arc.unwrapped())
            pieces_.push_back({piece, p.profile});
    }
    std::sort(pieces_.begin(), pieces_.end(),
              [](const WeightPiece& a, const WeightPiece& b) { return a.arc.start < b.arc.start; });
    std::vector<WeightPiece> tiled;
    Rat cursor(0L);
    for (WeightPiece& p : pieces_) {
        if (p.arc.start < cursor) throw std::invalid_argument("BoundaryWeight: pieces overlap");
        if (p.arc.start > cursor)
            tiled.push_back({Arc(cursor, p.arc.start - cursor), ZeroProfile{}});
        cursor = p.arc.end();
        tiled.push_back(std::move(p));
    }
    if (cursor < Rat(1L)) tiled.push_back({Arc(cursor, Rat(1L) - cursor), ZeroProfile{}});
    pieces_ = std::move(tiled);
}

BoundaryWeight BoundaryWeight::constant(Rat v) {
    return BoundaryWeight({{Arc(Rat(0L), Rat(1L)), ConstProfile{std::move(v)}}});
}

const WeightPiece& BoundaryWeight::piece_at(const Rat& t) const {
    Rat u = t.frac();
    for (const WeightPiece& p : pieces_)
        if (p.arc.start <= u && u < p.arc.end()) return p;
    return pieces_.back();  // u == 1 cannot happen after frac()
}

BoundaryWeight::EvalResult BoundaryWeight::eval(const Rat& t) const {
    const WeightPiece& p = piece_at(t);
    return std::visit(
        [&](const auto& prof) -> EvalResult {
            using T = std::decay_t<decltype(prof)>;
            if constexpr (std::is_same_v<T, ZeroProfile>) {
                return {Real(0L), true};
            } else if constexpr (std::is_same_v<T, ConstProfile>) {
                return {Real(prof.value), true};
            } else if constexpr (std::is_same_v<T, PowerCuspProfile>) {
                Rat d = circular_dist(t, prof.t0);
                if (d.is_zero()) return {Real(0L), true};
                return {Real(prof.amp) * pow(Real(d), Real(prof.p)), true};
            } else if constexpr (std::is_same_v<T, ExpCuspProfile>) {
                Rat d = circular_dist(t, prof.t0);
                if (d.is_zero()) return {Real(0L), true};
                return {exp(-Real(1L) / pow(Real(d), Real(prof.q))), true};
            } else if constexpr (std::is_same_v<T, CantorIndicatorProfile>) {
                auto mem = prof.set->decide(t, prof.stage);
                if (!mem.in_stage_set) return {Real(0L), true};
                return {Real(prof.value), mem.resolved};
            } else {
                // |sin(pi d)| = |sin(2 pi d/2)|
                Real c, s;
                sincos_turn(Real(t - prof.t0) / Real(2L), c, s);
                return {Real(prof.amp) * pow(abs(s), Real(prof.p)), true};
            }
        },
        p.profile);
}

LogVerdict BoundaryWeight::log_verdict(const WeightPiece& piece, const Arc& sub) const {
    return std::visit(
        [&](const auto& prof) -> LogVerdict {
            using T = std::decay_t<decltype(prof)>;
            if constexpr (std::is_same_v<T, ZeroProfile>) {
                return LogVerdict::Divergent;
            } else if constexpr (std::is_same_v<T, ConstProfile>) {
                return LogVerdict::Integrable;
            } else if constexpr (std::is_same_v<T, PowerCuspProfile>) {
                return LogVerdict::Integrable;  // p log dist is always integrable
            } else if constexpr (std::is_same_v<T, ExpCuspProfile>) {
                // 1/dist^q with q >= 1 diverges exactly when t0 touches the closure
                return dist_to_arc(prof.t0, sub).is_zero() ? LogVerdict::Divergent
                                                           : LogVerdict::Integrable;
            } else if constexpr (std::is_same_v<T, CantorIndicatorProfile>) {
                // complement gaps meet every subarc of the base in positive measure
                return LogVerdict::Divergent;
            } else {
                return LogVerdict::Integrable;  // log|sin| is integrable
            }
        },
        piece.profile);
}

LogVerdict BoundaryWeight::log_verdict(const Arc& arc) const {
    for (const Arc& part : arc.unwrapped()) {
        for (const WeightPiece& p : pieces_) {
            Arc overlap = intersect_unwrapped(p.arc, part);
            if (overlap.len.sign() <= 0) continue;
            if (log_verdict(p, overlap) == LogVerdict::Divergent) return LogVerdict::Divergent;
        }
    }
    return LogVerdict::Integrable;
}

std::string BoundaryWeight::describe() const {
    std::ostringstream os;
    os << "w[";
    bool first = true;
    for (const WeightPiece& p : pieces_) {
        if (!first) os << ";";
        first = false;
        os << profile_name(p.profile) << "@[" << p.arc.start.str() << "," << p.arc.end().str() << ")";
    }
    os << "]";
    return os.str();
}

CarrierResidual carrier_and_residual(const BoundaryWeight& w) {
    CarrierResidual out;
    std::vector<Arc> carrier_arcs;
    std::vector<CantorPart> carrier_cantor;
    for (const WeightPiece& p : w.pieces()) {
        out.table.push_back({p.arc, profile_name(p.profile), w.log_verdict(p, p.arc)});
        std::visit(
            [&](const auto& prof) {
                using T = std::decay_t<decltype(prof)>;
                if constexpr (std::is_same_v<T, ZeroProfile>) {
                    // not in the carrier
                } else if constexpr (std::is_same_v<T, CantorIndicatorProfile>) {
                    carrier_cantor.push_back({prof.set, prof.stage});
                } else {
                    carrier_arcs.push_back(p.arc);
                }
            },
            p.profile);
    }
    out.E = CircleSet::from_arcs(std::move(carrier_arcs));
    for (const CantorPart& cp : carrier_cantor) {
        out.E.add_cantor(cp.set, cp.stage);
        // Every arc around a point of the set meets complement gaps in positive
        // measure, so the whole part is residual. Points of the remaining
        // profiles always own an arc with integrable log w (up to the null
        // boundary/cusp points), so they contribute nothing.
        out.F.add_cantor(cp.set, cp.stage);
    }
    return out;
}

}  // namespace p2mu
