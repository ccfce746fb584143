#pragma once

#include "p2mu/real.hpp"

#include <functional>
#include <vector>

namespace p2mu {

/// Gauss-Legendre rule on [-1,1] at the current working precision.
/// Cached per (order, precision).
struct GLRule {
    std::vector<Real> nodes;    // ascending, symmetric
    std::vector<Real> weights;
};
const GLRule& gl_rule(int order);

struct QuadResult {
    Real value;
    Real error;  // estimated absolute error (difference of nested rules + tail cuts)
    long evals = 0;
    bool converged = true;
};

using Integrand = std::function<Real(const Real&)>;

/// Adaptive Gauss-Legendre on [a,b]: panels are bisected until the nested
/// coarse/fine estimate difference meets rel_tol (relative to the running
/// total) or abs_floor. split_hints seed the initial panel boundaries, which
/// matters for integrands spiked near a known interior maximum.
QuadResult integrate_adaptive(const Integrand& f, const Real& a, const Real& b,
                              const Real& rel_tol, const Real& abs_floor,
                              const std::vector<Real>& split_hints = {}, int max_depth = 60);

/// Fixed composite rule: `panels` equal panels of GL(order) each.
Real integrate_composite(const Integrand& f, const Real& a, const Real& b, int panels, int order);

}  // namespace p2mu
