#pragma once

#include "p2mu/real.hpp"

#include <memory>
#include <vector>

namespace p2mu {

class FatCantorSet;

/// Half-open arc [start, start+len) on the circle, in units of full turns
/// (m(T) = 1). start is kept in [0,1); the arc may wrap past 1. len in (0,1].
struct Arc {
    Rat start;
    Rat len;

    Arc() : start(0L), len(1L) {}
    Arc(Rat s, Rat l);

    Rat end() const { return start + len; }  // may exceed 1 for wrapping arcs
    Rat midpoint_mod1() const { return (start + len / Rat(2L)).frac(); }
    bool wraps() const { return end() > Rat(1L); }
    bool is_full_circle() const { return len == Rat(1L); }
    bool contains(const Rat& t) const;  // t taken mod 1

    /// The arc as 1 or 2 non-wrapping intervals [a,b) with 0 <= a < b <= 1.
    std::vector<Arc> unwrapped() const;
};

/// Circular distance between two angles, in [0, 1/2].
Rat circular_dist(const Rat& a, const Rat& b);

/// Distance from point t to the (closed) arc, 0 if t lies inside.
Rat dist_to_arc(const Rat& t, const Arc& arc);
/// Largest circular distance from t to a point of the closed arc (<= 1/2).
Rat max_dist_to_arc(const Rat& t, const Arc& arc);

/// Intersection of two non-wrapping intervals; empty optional-like via len==0.
Arc intersect_unwrapped(const Arc& a, const Arc& b);

/// Subarc on which dist(t, t0) is linear in t, with its distance range.
struct DistanceRange {
    Arc sub;          // absolute position (non-wrapping)
    Rat d1, d2;       // distance range, d1 < d2, within [0, 1/2]
    bool increasing;  // distance increases with t along the subarc
};
/// Monotone-distance decomposition of an unwrapped arc relative to t0
/// (splits at t0 and at its antipode). At most three pieces.
std::vector<DistanceRange> distance_pieces(const Arc& arc, const Rat& t0);
/// The subarc of `dr` whose distance range is [a, b] (subset of [d1, d2]).
Arc distance_band_arc(const DistanceRange& dr, const Rat& a, const Rat& b);

struct CantorPart {
    std::shared_ptr<const FatCantorSet> set;
    int stage = 0;  // realization stage used when an explicit cover is needed
};

/// A finite union of disjoint arcs plus symbolic fat-Cantor parts.
class CircleSet {
  public:
    CircleSet() = default;

    static CircleSet full_circle() { return from_arcs({Arc(Rat(0L), Rat(1L))}); }
    static CircleSet empty() { return CircleSet(); }
    /// Normalizes (splits wrapping arcs, sorts) and verifies pairwise disjointness.
    static CircleSet from_arcs(std::vector<Arc> arcs);
    static CircleSet from_cantor(std::shared_ptr<const FatCantorSet> set, int stage);

    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<CantorPart>& cantor_parts() const { return cantor_; }
    bool is_empty() const { return arcs_.empty() && cantor_.empty(); }
    bool has_cantor_parts() const { return !cantor_.empty(); }

    /// Exact measure. Cantor parts contribute their limit measure.
    Rat measure() const;
    /// Measure with cantor parts realized at their configured stage.
    Rat stage_measure() const;
    /// Sum over cantor parts of |E (sym-diff) E_stage|; zero for plain arc sets.
    Rat sym_diff_bound() const;

    /// Membership for plain-arc sets (cantor parts excluded deliberately).
    bool arcs_contain(const Rat& t) const;

    /// Complement of a plain-arc set as sorted disjoint arcs. Throws if the
    /// set has cantor parts.
    CircleSet complement() const;

    void add_cantor(std::shared_ptr<const FatCantorSet> set, int stage) {
        cantor_.push_back({std::move(set), stage});
    }

  private:
    std::vector<Arc> arcs_;      // sorted, disjoint, non-wrapping, within [0,1]
    std::vector<CantorPart> cantor_;
};

}  // namespace p2mu
