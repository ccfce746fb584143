#include "p2mu/circle.hpp"
#include "p2mu/weights.hpp"

#include <algorithm>
#include <stdexcept>

namespace p2mu {

Arc::Arc(Rat s, Rat l) : start(std::move(s)), len(std::move(l)) {
    if (len.sign() <= 0 || len > Rat(1L)) throw std::invalid_argument("Arc: len must be in (0,1]");
    start = start.frac();
}

bool Arc::contains(const Rat& t) const {
    Rat u = t.frac();
    if (u < start) u += Rat(1L);
    return u < end();
}

std::vector<Arc> Arc::unwrapped() const {
    if (!wraps()) return {*this};
    std::vector<Arc> out;
    Rat first = Rat(1L) - start;
    out.emplace_back(Rat(0L), end() - Rat(1L));
    out.emplace_back(start, first);
    return out;
}

Rat circular_dist(const Rat& a, const Rat& b) {
    Rat d = (a - b).frac();
    return min(d, Rat(1L) - d);
}

Rat dist_to_arc(const Rat& t, const Arc& arc) {
    if (arc.contains(t) || arc.is_full_circle()) return Rat(0L);
    Rat da = circular_dist(t, arc.start);
    Rat db = circular_dist(t, arc.end());
    return min(da, db);
}

Rat max_dist_to_arc(const Rat& t, const Arc& arc) {
    // Farthest point of the closed arc from t: the antipode t+1/2 if the arc
    // covers it, otherwise one of the endpoints.
    Rat anti = (t + Rat(1L, 2L)).frac();
    if (arc.contains(anti) || arc.end().frac() == anti || arc.is_full_circle()) return Rat(1L, 2L);
    return max(circular_dist(t, arc.start), circular_dist(t, arc.end()));
}

std::vector<DistanceRange> distance_pieces(const Arc& arc, const Rat& t0) {
    std::vector<DistanceRange> out;
    Rat a = (arc.start - t0).frac();  // shifted coordinate, t0 at 0
    Rat pos = arc.start;
    Rat remaining = arc.len;
    const Rat half(1L, 2L);
    while (remaining.sign() > 0) {
        Rat seg;
        if (a < half) {
            seg = min(remaining, half - a);
            out.push_back({Arc(pos, seg), a, a + seg, true});
        } else {
            seg = min(remaining, Rat(1L) - a);
            out.push_back({Arc(pos, seg), Rat(1L) - (a + seg), Rat(1L) - a, false});
        }
        a = (a + seg).frac();
        pos = (pos + seg).frac();
        remaining -= seg;
    }
    return out;
}

Arc distance_band_arc(const DistanceRange& dr, const Rat& a, const Rat& b) {
    if (a < dr.d1 || b > dr.d2 || b <= a)
        throw std::invalid_argument("distance_band_arc: band outside the range");
    if (dr.increasing) return Arc((dr.sub.start + (a - dr.d1)).frac(), b - a);
    return Arc((dr.sub.start + (dr.d2 - b)).frac(), b - a);
}

Arc intersect_unwrapped(const Arc& a, const Arc& b) {
    Rat lo = max(a.start, b.start);
    Rat hi = min(a.end(), b.end());
    Arc out;
    if (hi <= lo) {
        out.len = Rat(0L);  // empty marker; callers test len.sign()
        out.start = lo;
        return out;
    }
    out.start = lo;
    out.len = hi - lo;
    return out;
}

CircleSet CircleSet::from_arcs(std::vector<Arc> arcs) {
    CircleSet s;
    for (const Arc& a : arcs)
        for (const Arc& piece : a.unwrapped()) s.arcs_.push_back(piece);
    std::sort(s.arcs_.begin(), s.arcs_.end(),
              [](const Arc& x, const Arc& y) { return x.start < y.start; });
    for (size_t i = 1; i < s.arcs_.size(); ++i)
        if (s.arcs_[i].start < s.arcs_[i - 1].end())
            throw std::invalid_argument("CircleSet: arcs overlap");
    return s;
}

CircleSet CircleSet::from_cantor(std::shared_ptr<const FatCantorSet> set, int stage) {
    CircleSet s;
    s.cantor_.push_back({std::move(set), stage});
    return s;
}

Rat CircleSet::measure() const {
    Rat m(0L);
    for (const Arc& a : arcs_) m += a.len;
    for (const CantorPart& p : cantor_) m += p.set->limit_measure();
    return m;
}

Rat CircleSet::stage_measure() const {
    Rat m(0L);
    for (const Arc& a : arcs_) m += a.len;
    for (const CantorPart& p : cantor_) m += p.set->stage_measure(p.stage);
    return m;
}

Rat CircleSet::sym_diff_bound() const {
    Rat m(0L);
    for (const CantorPart& p : cantor_)
        m += p.set->stage_measure(p.stage) - p.set->limit_measure();
    return m;
}

bool CircleSet::arcs_contain(const Rat& t) const {
    Rat u = t.frac();
    for (const Arc& a : arcs_)
        if (a.start <= u && u < a.end()) return true;
    return false;
}

CircleSet CircleSet::complement() const {
    if (!cantor_.empty())
        throw std::logic_error("CircleSet::complement: symbolic cantor parts not supported");
    std::vector<Arc> out;
    if (arcs_.empty()) return full_circle();
    Rat cursor(0L);
    for (const Arc& a : arcs_) {
        if (a.start > cursor) out.emplace_back(cursor, a.start - cursor);
        cursor = a.end();
    }
    if (cursor < Rat(1L)) out.emplace_back(cursor, Rat(1L) - cursor);
    return from_arcs(std::move(out));
}

}  // namespace p2mu
