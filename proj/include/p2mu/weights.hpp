#pragma once

#include "p2mu/circle.hpp"
#include "p2mu/real.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace p2mu {

/// Fat Cantor set on a base arc, built by removing an open middle gap of
/// relative width r_k from every surviving arc at generation k. Endpoints are
/// exact rationals throughout.
///
/// Two gap schedules:
///  - geometric(target): stage measures m_k = |base|*(rho + (1-rho) 2^-k)
///    with rho = target/|base|, so the limit measure is exactly `target`
///    (for target = |base|/2 this gives r_1 = 1/4, r_2 = 1/6, ...).
///  - constant_ratio(r): the classical Cantor construction, limit measure 0.
class FatCantorSet {
  public:
    static std::shared_ptr<const FatCantorSet> geometric(Arc base, Rat target_measure);
    static std::shared_ptr<const FatCantorSet> constant_ratio(Arc base, Rat ratio);

    const Arc& base() const { return base_; }
    bool is_geometric() const { return geometric_; }

    Rat ratio(int k) const;          // r_k for k >= 1
    Rat stage_measure(int k) const;  // |E_k|, exact
    Rat limit_measure() const;       // |E|
    Rat stage_arc_len(int k) const { return stage_measure(k) / Rat::pow2(k); }
    long gap_count(int k) const { return k >= 1 ? (1L << (k - 1)) : 0; }
    Rat gap_len(int k) const { return stage_arc_len(k - 1) * ratio(k); }

    /// The 2^k surviving arcs at stage k, in construction order.
    std::vector<Arc> stage_arcs(int k) const;

    struct Membership {
        bool in_stage_set;  // true if t survives to the requested stage
        bool resolved;      // true if membership in the limit set is decided
        int decided_stage;  // gap generation that expelled t, or the stage reached
    };
    /// Membership of t (mod 1) decided up to `stage` generations. Points
    /// falling in a gap are resolved; arc endpoints persist to the limit set
    /// and are also resolved.
    Membership decide(const Rat& t, int stage) const;

    /// Half-distance between a stage-(k-1) arc center and its children's
    /// centers: delta_k = (L_{k-1} - L_k)/2. Feeds the Fourier product formula.
    Rat center_offset(int k) const { return (stage_arc_len(k - 1) - stage_arc_len(k)) / Rat(2L); }
    Rat center0() const { return base_.start + base_.len / Rat(2L); }

    std::string describe() const;

  private:
    FatCantorSet(Arc base, bool geometric, Rat param);

    Arc base_;
    bool geometric_;
    Rat param_;  // rho = target/|base| for geometric; r for constant ratio
};

struct FatCantorStage {
    CircleSet arcs;
    Rat measure;
    Rat sym_diff_bound;
};
FatCantorStage fat_cantor_stage(const FatCantorSet& spec, int k);

/// Sums over a family of disjoint arcs: sum |l|^alpha and the
/// Beurling-Carleson sum |l| log(1/|l|). `finite` is false when the series
/// diverges (detected by a sustained ratio test for schedule-generated gaps).
struct CarlesonSums {
    bool alpha_finite;
    Real sum_alpha;   // value (or partial sum when divergent)
    Real alpha_tail;  // bound on the truncation remainder when finite
    bool bc_finite;
    Real sum_bc;
    Real bc_tail;
};
CarlesonSums carleson_sums(const std::vector<Arc>& arcs, const Real& alpha);
/// Same sums over the complementary gap family of a Cantor construction,
/// summed per generation with a geometric tail bound.
CarlesonSums carleson_sums(const FatCantorSet& spec, const Real& alpha);

/// Radial weight G for the disk part d mu_D = G(1-|z|) dA. The raw family is
/// the canonical object (m(x) = log(1/G_raw(x)) drives every decay
/// functional); a constant rescale is applied only when the raw family
/// violates G < 1, following the G(1) = 1/2 rule.
class RadialWeight {
  public:
    enum class Family { Power, ExpDec, StretchedExp, DoubleExp, CustomTable };

    static RadialWeight power(Rat beta);                  // G = x^beta (beta = 0: test-only constant)
    static RadialWeight expdec(Rat c);                    // G = exp(-c/x)
    static RadialWeight stretched_exp(Rat c, Rat alpha);  // G = exp(-c/x^alpha), alpha in (0,1]
    static RadialWeight double_exp(Rat c);                // G = exp(-exp(c/x))
    static RadialWeight custom_table(std::vector<std::pair<Rat, Rat>> points);

    Family family() const { return family_; }
    std::string family_name() const;
    std::string describe() const;

    /// Normalized G(x) on (0,1]; throws std::domain_error outside.
    Real eval(const Real& x) const;
    /// The raw family value, before the normalization rescale.
    Real eval_raw(const Real& x) const;
    /// Normalization scale s (G_normalized = s * G_raw); 1 unless raw G(1) >= 1.
    Real scale() const;

    /// m(x) = log(1/G_raw(x)) — the canonical decay functional.
    Real m(const Real& x) const;
    /// log(1/G_normalized(x)) = m(x) - log(scale); strictly positive.
    Real m_norm(const Real& x) const;
    bool has_mprime() const;
    Real mprime(const Real& x) const;

    const Rat& param_c() const { return c_; }
    const Rat& param_beta() const { return beta_; }
    const Rat& param_alpha() const { return alpha_; }

    struct ExpDecResult {
        bool holds;
        Real d;  // inf over (0,1] of x*m(x); +inf possible (double-exp)
        bool estimate_only;
    };
    ExpDecResult check_exp_dec() const;

    struct LogLogResult {
        bool holds;
        Real integral;  // +inf when divergent
        Real error;
        bool estimate_only;
    };
    LogLogResult check_loglog_int() const;

  private:
    RadialWeight() = default;

    Family family_ = Family::ExpDec;
    Rat c_{1L}, beta_{0L}, alpha_{1L};
    std::vector<std::pair<Rat, Rat>> table_;  // (x, G_raw) ascending, last x = 1
    bool rescale_ = false;                    // apply s = 1/(2 G_raw(1))
    Rat raw_at_one_{1L};
};

// ---------------------------------------------------------------------------
// Boundary weight w on the circle, piecewise by profile class.

struct ZeroProfile {};
struct ConstProfile {
    Rat value;  // > 0
};
struct PowerCuspProfile {
    Rat t0;
    Rat p;    // w = amp * dist(t,t0)^p
    Rat amp;  // default 1
};
struct ExpCuspProfile {
    Rat t0;
    Rat q;  // w = exp(-1/dist^q), q >= 1
};
struct CantorIndicatorProfile {
    std::shared_ptr<const FatCantorSet> set;
    Rat value;  // v > 0 on the set
    int stage;  // realization stage for pointwise/Fourier work
};
struct SinPowerProfile {
    Rat amp;
    Rat p;
    Rat t0;  // w = amp * |sin(pi (t - t0))|^p
};

using WeightProfile = std::variant<ZeroProfile, ConstProfile, PowerCuspProfile, ExpCuspProfile,
                                   CantorIndicatorProfile, SinPowerProfile>;

std::string profile_name(const WeightProfile& p);

struct WeightPiece {
    Arc arc;
    WeightProfile profile;
};

enum class LogVerdict { Integrable, Divergent };

class BoundaryWeight {
  public:
    /// Pieces must be pairwise disjoint; uncovered gaps are filled with the
    /// zero profile so the pieces cover the circle.
    explicit BoundaryWeight(std::vector<WeightPiece> pieces);

    static BoundaryWeight constant(Rat v);

    const std::vector<WeightPiece>& pieces() const { return pieces_; }

    struct EvalResult {
        Real value;
        bool stage_resolved;
    };
    EvalResult eval(const Rat& t) const;

    const WeightPiece& piece_at(const Rat& t) const;

    /// Symbolic log-integrability of log w over sub (a subarc of piece.arc).
    LogVerdict log_verdict(const WeightPiece& piece, const Arc& sub) const;
    /// Verdict over an arbitrary arc (evaluated piecewise; divergent if any
    /// overlapped piece is divergent on the overlap).
    LogVerdict log_verdict(const Arc& arc) const;

    std::string describe() const;

  private:
    std::vector<WeightPiece> pieces_;  // sorted by arc start, tiling [0,1)
};

struct ResidualTableRow {
    Arc arc;
    std::string profile;
    LogVerdict verdict;
};

struct CarrierResidual {
    CircleSet E;  // carrier {w > 0} (mod null sets)
    CircleSet F;  // residual: points of E with divergent log-integral on every arc
    std::vector<ResidualTableRow> table;
};

/// Symbolic carrier/residual computation from profile classes. No quadrature:
/// log-integrability is a limit property invisible to it.
CarrierResidual carrier_and_residual(const BoundaryWeight& w);

}  // namespace p2mu
