#pragma once

#include "p2mu/moments.hpp"
#include "p2mu/poisson.hpp"
#include "p2mu/weights.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace p2mu {

struct MeasureSpec {
    std::optional<RadialWeight> disk;
    std::optional<BoundaryWeight> boundary;
};

/// Diagonal + Toeplitz Gram system of the monomials z^0..z^N under mu:
/// G[i][j] = <z^j, z^i> = delta_ij alpha_i + hat w(i-j).
class GramSystem {
  public:
    GramSystem(const MeasureSpec& mu, long N);

    long degree() const { return N_; }
    const Real& alpha(long n) const { return alpha_[n]; }
    Complex what(long k) const;  // Hermitian extension of hat w(0..N)
    Complex entry(long i, long j) const;
    /// Diagonal preconditioner entries s_i = sqrt(G[i][i]).
    const Real& diag_scale(long i) const { return scale_[i]; }
    Real fourier_error_bound() const { return werr_; }

  private:
    long N_;
    std::vector<Real> alpha_;
    std::vector<Complex> what_;
    std::vector<Real> scale_;
    Real werr_{0L};
};

struct IndicatorTarget {
    CircleSet set;
};
struct CoeffTarget {
    std::vector<std::pair<long, Complex>> coeffs;  // boundary function sum c_k z^k
};
using TargetSpec = std::variant<IndicatorTarget, CoeffTarget>;

struct TargetVector {
    Real norm2;               // |f|^2_mu (boundary part only; disk part is zero)
    std::vector<Complex> b;   // b_i = <f, z^i>_mu, i = 0..N
};
TargetVector target_vector(const MeasureSpec& mu, const TargetSpec& t, long N);

struct PivotFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Incremental preconditioned Cholesky over the Gram system. Appending degree
/// N extends the factor by one row (O(N^2)) and updates the running
/// projection energy, so d_N is available for every intermediate degree.
class DistanceSolver {
  public:
    DistanceSolver(const MeasureSpec& mu, const TargetSpec& t, long N_max);

    /// d_N = sqrt(max(0, |f|^2 - sum_{n<=N} |c_n|^2)); extends as needed.
    Real distance_at(long N);
    /// d_N^2 before clamping (can be slightly negative near exhaustion).
    Real distance_sq_at(long N);
    Real cond_estimate() const;
    /// rho* G_N^{-1} rho for an externally supplied vector (residual dual norm).
    Real quadratic_form_inv(const std::vector<Complex>& rho);

  private:
    void extend(long N);

    GramSystem gs_;
    TargetVector tv_;
    std::vector<std::vector<Complex>> L_;  // rows of the Cholesky factor
    std::vector<Complex> c_;               // forward substitution of the target
    std::vector<Real> energy_;             // running sum |c|^2 by degree
    Real pivot_min_, pivot_max_;
    long built_ = -1;
};

struct DistanceProfileRow {
    long N;
    Real d;
    Real cond_est;
};
struct DistanceProfile {
    std::vector<DistanceProfileRow> rows;
    bool monotone;
    bool plateau_valid;
    Real plateau_estimate;  // Aitken extrapolation of the last rows; exploratory
    mpfr_prec_t precision_used;
    int escalations;
};

/// Distance with the 1x -> 2x -> 4x precision escalation ladder on Cholesky
/// pivot failure. Restores the working precision on exit.
Real distance(const MeasureSpec& mu, const TargetSpec& t, long N);
DistanceProfile splitting_profile(const MeasureSpec& mu, const TargetSpec& t,
                                  const std::vector<long>& N_list);

/// Compactly supported majorant h (Beurling-Malliavin style): a finite
/// convolution of centered box indicators with widths a_k = (3|J|/pi^2) k^-2
/// summing to |J|/2, translated to the center of J and scaled so that
/// |h_n| <= alpha_n/(1+n) on the computed range.
struct BMMajorant {
    Arc J;
    long K;                    // number of box factors
    std::vector<Real> widths;  // a_1..a_K
    Real scale;                // the majorization scale lambda
    Rat center;                // J's midpoint
    std::vector<Real> ghat;    // lambda * ghat(2 pi n), n = 0..N_max (real, even)
    Real h_at_center;          // h(center) = lambda sum_n ghat(2 pi n) (+tail bound)
    Real center_tail;          // series tail bound for h_at_center
    Real tail_loglog_slope;    // measured decay exponent slope on the tail

    /// h_n for any n (recomputed outside the tabulated range).
    Complex coeff(long n) const;
    /// lambda * ghat(2 pi n) recomputed from the widths.
    Real ghat_at(long n) const;
    /// Upper bound prod min(2 a_k, 2/x) on |ghat(x)|, times lambda.
    Real ghat_bound(const Real& x) const;
    /// h(t) by the truncated Fourier series; `tail` receives the bound.
    Real eval(const Rat& t, long terms, Real* tail = nullptr) const;
};
BMMajorant bm_majorant(const RadialWeight& G, const Arc& J, long N_max,
                       const std::vector<ValueWithError>& alpha);

struct AnnihilatorTuple {
    Arc I, J;
    long N_max;
    BMMajorant h;
    std::vector<Real> alpha;     // alpha_0..alpha_{N_max}
    std::vector<Complex> F;      // F_n = -h_n / alpha_n
    bool u_is_trivial;           // |u| = 1 on I (w >= 1 there)
    LogModulusResult u_data;
    std::vector<Complex> fD;     // projection coefficients of F conj(u) onto the span
    std::vector<Complex> residual;  // <f_D + f_T, z^n>_mu, n = 0..N_max
    Real residual_worst;
    Real tuple_norm;             // ||f_D + f_T||_mu
    Real fT_sup_bound;           // sup |f_T| <= sum |h_n| + tail
    Real sum_F2alpha;            // sum |F_n|^2 alpha_n   (<= sum alpha_n/(1+n)^2)
    Real sum_alpha_over_1pn2;
};

struct AnnihilatorOptions {
    int u_resolution = 256;
    int radial_panels = 24;   // disk projection quadrature (non-trivial u only)
    int angular_factor = 4;   // angular nodes = factor * (N_max+1)
};
AnnihilatorTuple annihilator(const MeasureSpec& mu, const Arc& I, long N_max,
                             const AnnihilatorOptions& opt = {});

struct CertificateResult {
    Real lower_bound;  // L = max(0, |<f,Phi>| - tail) / ||Phi||
    Real inner_abs;
    Real tail_bound;   // series truncation allowance, already subtracted
    Real correction;   // 2 |f| sqrt(rho* G^{-1} rho)/||Phi||: dist >= L - correction
};
CertificateResult certificate(const AnnihilatorTuple& tuple, const MeasureSpec& mu,
                              const TargetSpec& target, long N_for_correction);

struct StructurePrediction {
    bool expdec_holds;
    Real expdec_d;
    bool loglog_holds;
    Real loglog_integral;
    bool in_scope;        // both conditions hold
    bool residual_empty;  // F = empty set
    bool full_splitting;  // F = E and (ExpDec): the stronger conclusion
    bool khrushchev_flag; // below the ExpDec cutoff with integrable regime
    bool volberg_flag;    // LogLogInt fails
    std::string decomposition;  // rendered verdict
    CarrierResidual sets;
};
StructurePrediction predict_structure(const MeasureSpec& mu);

}  // namespace p2mu
