#pragma once

#include "p2mu/circle.hpp"
#include "p2mu/quadrature.hpp"
#include "p2mu/weights.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace p2mu {

/// Thrown when adaptive refinement cannot reach the requested precision.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValueWithError {
    Real value;
    Real error;
};

/// alpha_n = 2 int_0^1 r^{2n+1} G(1-r) dr, computed by adaptive Gauss-Legendre
/// after substituting u = 1-r and cutting the domain where the integrand falls
/// below 2^{-prec} of its peak. Relative error bound <= 2^{-prec/2}.
ValueWithError alpha_moment(const RadialWeight& G, long n);

/// P(x) = int_0^1 r^{|x|} G(1-r) dr (even in x). P(2n+1) = alpha_n / 2.
ValueWithError moment_P(const RadialWeight& G, const Real& x);

struct MomentTable {
    std::vector<ValueWithError> alpha;  // indices 0..N
    mpfr_prec_t precision_bits;
    std::string g_spec;
};
MomentTable make_moment_table(const RadialWeight& G, long nmax);

struct EnvelopeValue {
    Real x;
    Real k;         // inf_{y in (0,1]} m(y) + y x
    Real argmin_y;  // attaining point (boundary y=1 when the interior equation has no root)
};
EnvelopeValue envelope_k(const RadialWeight& G, const Real& x);

struct KQuotientResult {
    bool finite;
    Real value;  // +inf when divergent
    Real error;
    std::string note;  // divergence reason or tail handling summary
};
/// int_0^inf k(x)/(1+x^2) dx with a monotone dyadic tail bound; divergence
/// flagged analytically per family (double-exp: k(x) ~ c x / log x).
KQuotientResult k_quotient_integral(const RadialWeight& G);

struct PLowerBoundRow {
    Real x;
    bool precondition_met;  // argmin_y(2x) < 1/2
    bool holds;             // P(x) >= exp(-k(2x)) / (4x)
    Real lhs, rhs, margin;
};
std::vector<PLowerBoundRow> verify_P_lower_bound(const RadialWeight& G, const std::vector<Real>& xs);

struct FourierCoeff {
    long k;
    Complex value;
    Real error_bound;
};
/// hat w(k) = int_T w(t) e^{-2 pi i k t} dt. Arc-constant pieces in closed
/// form, cusp profiles by adaptive quadrature, cantor pieces by the stage-K
/// product formula with error bound v * |E sym-diff E_K|.
FourierCoeff fourier_w(const BoundaryWeight& w, long k);

struct SzegoMeanResult {
    bool finite;
    Real log_integral;    // -inf when divergent
    Real geometric_mean;  // exp(log_integral); 0 when divergent
    Real error;
};
SzegoMeanResult szego_mean(const BoundaryWeight& w);  // over the full circle
SzegoMeanResult szego_mean(const BoundaryWeight& w, const CircleSet& S);

/// int_arc w dm.
ValueWithError arc_mass(const BoundaryWeight& w, const Arc& arc);
/// |w|_L1 = int_T w dm.
ValueWithError total_mass(const BoundaryWeight& w);

/// Exact stage-K measure of E_K intersected with [0, t) within the base arc
/// coordinates; tree descent, O(K).
Rat cantor_measure_before(const FatCantorSet& set, int stage, const Rat& t);
/// Exact stage-K measure of E_K intersected with an arbitrary arc.
Rat cantor_measure_in(const FatCantorSet& set, int stage, const Arc& arc);

}  // namespace p2mu
