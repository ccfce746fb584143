#pragma once

#include "p2mu/circle.hpp"
#include "p2mu/real.hpp"
#include "p2mu/weights.hpp"

#include <vector>

namespace p2mu {

/// Analytic profile piece: value(t) = coef * dist(t,t0)^{-q} on its support
/// arc (the log(1/w) shape of an exponential cusp). Integrals are closed form.
struct InvPowerPiece {
    Arc support;
    Rat t0;
    Rat q;
    Real coef;

    Real value(const Rat& t) const;
    Real value(const Real& t) const;
    /// Closed-form integral of value (coef included) over a subarc.
    Real integral(const Arc& sub) const;
    Real integral() const { return integral(support); }
    /// The sign of value is constant, so the L1 norm is |integral|.
    Real l1() const { return abs(integral(support)); }
};

struct StepPiece {
    Arc arc;
    Real value;
};

/// Piecewise-constant profile on the circle (plus optional analytic cusp
/// pieces), zero off the listed pieces. Immutable after construction; the
/// mean is cached at construction from exact per-piece integrals.
class StepProfile {
  public:
    StepProfile();
    explicit StepProfile(std::vector<StepPiece> steps, std::vector<InvPowerPiece> analytic = {});

    const std::vector<StepPiece>& steps() const { return steps_; }
    const std::vector<InvPowerPiece>& analytic_pieces() const { return analytic_; }
    bool empty() const { return steps_.empty() && analytic_.empty(); }

    Real value_at(const Rat& t) const;
    const Real& mean() const { return mean_; }
    Real recompute_mean() const;
    Real l1_norm() const;

    StepProfile scaled(const Real& factor) const;

    /// Sorted discontinuity locations (piece endpoints and cusp centers).
    std::vector<Rat> breakpoints() const;

  private:
    std::vector<StepPiece> steps_;  // sorted by start, disjoint, non-wrapping
    std::vector<InvPowerPiece> analytic_;
    Real mean_;
};

/// H_I(z) = int_I (xi+z)/(xi-z) dm(xi) by the closed-form antiderivative with
/// a continuous branch (the argument of xi(t)-z increases monotonically for z
/// inside the disk, which fixes the branch without subdivision).
/// Throws std::domain_error for |z| >= 1 - 2^{-prec/4}.
Complex herglotz_arc(const Arc& I, const Complex& z);

/// Poisson kernel (1-|z|^2)/|xi(t)-z|^2.
Real poisson_kernel(const Complex& z, const Real& t);

Real poisson_integral(const StepProfile& f, const Complex& z);

struct OuterValue {
    Complex herglotz_sum;  // log-representation: g = exp(herglotz_sum)
    Complex value() const { return exp(herglotz_sum); }
    Real log_modulus() const { return herglotz_sum.re; }
};
OuterValue outer_eval(const StepProfile& f, const Complex& z);

struct VariationCheck {
    Real sum;    // sum over arcs of var(P_r, I_j), extrema located exactly
    Real bound;  // 4/(1-r)
    bool ok;
};
VariationCheck variation_sum_check(const std::vector<Arc>& arcs, const Real& r);

struct LogModulusResult {
    StepProfile profile;  // log min(w,1) on I, 0 off I
    Real l1_error;        // L1 distance to the exact log-modulus
};
/// Boundary data of the bounded outer function u with |u| = min(w,1) on I,
/// |u| = 1 off I. Exact for piecewise-constant w; cusp profiles are resolved
/// into `resolution` constant pieces per monotone range, with an exact or
/// monotonicity-based L1 error bound. Requires int_I log w dm > -inf.
LogModulusResult log_modulus_profile(const BoundaryWeight& w, const Arc& I, int resolution);

}  // namespace p2mu
