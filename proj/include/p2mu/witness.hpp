#pragma once

#include "p2mu/circle.hpp"
#include "p2mu/poisson.hpp"
#include "p2mu/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace p2mu {

/// Thrown when the weight's profile rules cannot certify divergent log
/// integrals at the scales a selection needs.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Greedy deterministic Vitali selection: disjoint intervals, each meeting F,
/// each with N|I| <= 1 (exact rational check) and a symbolically divergent
/// log-integral; the uncovered mass |F \ union| is < 1/N. For Cantor residual
/// parts the selection is the full family of stage-k arcs at the first stage
/// whose arc length satisfies the constraint (uncovered mass is then zero).
std::vector<Arc> vitali_select(const BoundaryWeight& w, const CircleSet& F, const Rat& N);

enum class WitnessCase { C1, C2 };

struct IntervalData {
    Arc arc;
    WitnessCase kind;
    Real l1_unscaled;      // int |f_{N,j}| dm, <= 2 (C1) or <= 4 (C2)
    // C1 fields
    Rat mass_F;            // |I_j cap F| (limit measure)
    Rat mass_neg;          // measure of the realized negative support (stage cover of F)
    Rat mass_gap;          // |I_j| minus the cover: positive-part support
    Real density;          // positive-part height before scaling
    // C2 fields
    Real alpha_j;          // int_{I_j^+} log(1/w), in [N|I_j|, 2N|I_j|]
    std::vector<Arc> plus_arcs;
    Rat plus_len{0L};
};

struct WitnessFamily {
    Rat N;
    long M;  // ceil(sqrt(N)): the scaling divisor
    std::vector<IntervalData> intervals;
    StepProfile f_scaled;    // M^{-1} f_N (the family member used downstream)
    StepProfile f_unscaled;  // f_N itself
    CircleSet A_N;           // union of the selected intervals
    Rat uncovered_F;         // |F \ A_N|, exact
};

/// Per-interval construction of f_{N,j}: case C1 when |I_j \ E| > 0 (balance
/// -N on a stage cover of F cap I_j against the interior gap), case C2
/// otherwise (log(1/w) on a level set I_j^+ with N|I_j| <= alpha_j <= 2N|I_j|,
/// balanced on the complement). Per-arc means vanish exactly.
WitnessFamily build_fN(const BoundaryWeight& w, const std::vector<Arc>& intervals, const Rat& N);

struct ConditionVerdict {
    bool pass;
    Real measured;  // the quantity the condition constrains
    Real bound;
    std::string note;
};

struct GrowthCheckRow {
    Real r;
    Real worst_log_g;     // max over the angular grid of log|g_N|
    Real allowed_log;     // (C_N/d) * m(1-r)
    bool pass;
};

struct WitnessReport {
    ConditionVerdict mean_zero;        // (i)  |int f_N dm| <= 1e-10
    ConditionVerdict depth;            // (ii) f_N <= -N on F cap A_N (scaled: -N/M)
    ConditionVerdict uncovered;        // (iii) |F \ A_N| < 1/N
    ConditionVerdict poisson_growth;   // (iv) sup (1-r) P_{f_N} <= 4C on the grid
    ConditionVerdict exp_integral;     // (v)  int exp(f_N) w dm <= 1 + |w|_1
    Real exp_integral_quadrature;      // independent stage-resolved route for (v)
    Real measured_C;                   // max per-arc L1 of the unscaled f_{N,j}
    Real C_N;                          // 4 * measured_C / M (drives the growth check)
    std::vector<GrowthCheckRow> growth;  // |g_N(z)| <= G(1-|z|)^{-C_N/d} audit
    bool growth_pass;
    Real disk_norm_log;                // log of int |g_N|^2 G dA (grid estimate)
    std::vector<std::pair<Rat, Real>> fidelity;  // (audit point, |log|g|-f| at rho)
    Real fidelity_worst;
    bool all_five_pass() const {
        return mean_zero.pass && depth.pass && uncovered.pass && poisson_growth.pass &&
               exp_integral.pass;
    }
};

struct WitnessOptions {
    std::vector<Real> rs;            // radial grid for (iv); defaults filled in verify
    int angular_samples = 96;        // base angular grid for (iv)
    Real fidelity_rho;               // default 1 - 1e-8
    Rat fidelity_clearance;          // min distance from audit points to jumps
    int quadrature_stage_extra = 5;  // extra stages for the independent route of (v)
    WitnessOptions();
};

WitnessReport verify_conditions(const WitnessFamily& fam, const BoundaryWeight& w,
                                const RadialWeight& G, const WitnessOptions& opt = WitnessOptions());

}  // namespace p2mu
