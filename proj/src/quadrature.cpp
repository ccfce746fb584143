#include "p2mu/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace p2mu {

namespace {

// Legendre P_n(x) and P_n'(x) via the three-term recurrence.
void legendre_pd(int n, const Real& x, Real& p, Real& dp) {
    Real p0(1L), p1 = x;
    for (int k = 2; k <= n; ++k) {
        Real pk = (Real(2L * k - 1) * x * p1 - Real(k - 1L) * p0) / Real((long)k);
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    dp = Real((long)n) * (x * p1 - p0) / (x * x - Real(1L));
}

GLRule build_rule(int order) {
    GLRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const Real one(1L);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        // Newton from the Chebyshev-type initial guess
        double guess = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        Real x(guess);
        Real p, dp;
        for (int it = 0; it < 64; ++it) {
            legendre_pd(order, x, p, dp);
            Real dx = p / dp;
            x -= dx;
            if (abs(dx) < Real::pow2(-(long)working_precision() + 4)) {
                legendre_pd(order, x, p, dp);
                x -= p / dp;
                break;
            }
        }
        legendre_pd(order, x, p, dp);
        Real w = Real(2L) / ((one - x * x) * dp * dp);
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = w;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
    }
    if (order % 2 == 1) {
        Real x(0L), p, dp;
        legendre_pd(order, x, p, dp);
        rule.nodes[order / 2] = Real(0L);
        rule.weights[order / 2] = Real(2L) / (dp * dp);
    }
    return rule;
}

std::map<std::pair<int, mpfr_prec_t>, GLRule> g_rules;
std::mutex g_rules_mutex;

Real panel_gl(const Integrand& f, const Real& a, const Real& b, const GLRule& rule, long& evals) {
    Real mid = (a + b) / Real(2L);
    Real half = (b - a) / Real(2L);
    Real acc(0L);
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        Real x = mid + half * rule.nodes[i];
        acc.add_prod(rule.weights[i], f(x));
        ++evals;
    }
    return acc * half;
}

}  // namespace

const GLRule& gl_rule(int order) {
    std::lock_guard<std::mutex> lock(g_rules_mutex);
    auto key = std::make_pair(order, working_precision());
    auto it = g_rules.find(key);
    if (it == g_rules.end()) it = g_rules.emplace(key, build_rule(order)).first;
    return it->second;
}

QuadResult integrate_adaptive(const Integrand& f, const Real& a, const Real& b,
                              const Real& rel_tol, const Real& abs_floor,
                              const std::vector<Real>& split_hints, int max_depth) {
    const GLRule& coarse = gl_rule(15);
    const GLRule& fine = gl_rule(31);

    struct Panel {
        Real a, b, coarse_val;
        int depth;
    };

    std::vector<Real> cuts{a};
    for (const Real& h : split_hints)
        if (h > a && h < b) cuts.push_back(h);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    QuadResult out;
    out.value = Real(0L);
    out.error = Real(0L);

    std::vector<Panel> stack;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i] < cuts[i + 1])) continue;
        stack.push_back({cuts[i], cuts[i + 1], panel_gl(f, cuts[i], cuts[i + 1], coarse, out.evals), 0});
    }

    Real scale = abs_floor;  // running magnitude estimate for the relative test
    for (const Panel& p : stack) scale = max(scale, abs(p.coarse_val));

    while (!stack.empty()) {
        Panel p = std::move(stack.back());
        stack.pop_back();
        Real fine_val = panel_gl(f, p.a, p.b, fine, out.evals);
        Real err = abs(fine_val - p.coarse_val);
        scale = max(scale, abs(out.value));
        if (err <= max(abs_floor, rel_tol * scale) || p.depth >= max_depth) {
            if (p.depth >= max_depth && err > max(abs_floor, rel_tol * scale)) out.converged = false;
            out.value += fine_val;
            out.error += err;
            continue;
        }
        Real mid = (p.a + p.b) / Real(2L);
        stack.push_back({p.a, mid, panel_gl(f, p.a, mid, coarse, out.evals), p.depth + 1});
        stack.push_back({mid, p.b, panel_gl(f, mid, p.b, coarse, out.evals), p.depth + 1});
    }
    return out;
}

Real integrate_composite(const Integrand& f, const Real& a, const Real& b, int panels, int order) {
    const GLRule& rule = gl_rule(order);
    Real acc(0L);
    long evals = 0;
    Real width = (b - a) / Real((long)panels);
    for (int i = 0; i < panels; ++i) {
        Real pa = a + width * Real((long)i);
        Real pb = (i + 1 == panels) ? b : a + width * Real((long)(i + 1));
        acc += panel_gl(f, pa, pb, rule, evals);
    }
    return acc;
}

}  // namespace p2mu
