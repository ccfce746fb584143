#include "p2mu/approx.hpp"

#include "p2mu/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace p2mu {

namespace {

// int_{arc} e^{2 pi i n t} dt, closed form.
Complex arc_exp_integral(const Arc& arc, long n) {
    if (n == 0) return Complex(Real(arc.len), Real(0L));
    Complex Eb = Complex::unit_turn(Real(n) * Real(arc.end()));
    Complex Ea = Complex::unit_turn(Real(n) * Real(arc.start));
    // antiderivative e^{2 pi i n t} / (2 pi i n)
    Complex diff = Eb - Ea;
    Real denom = Real(2L) * Real::pi() * Real(n);
    return Complex(diff.im / denom, -diff.re / denom);
}

// hat over a stage-K Cantor set: int_{E_K} e^{-2 pi i k t} dt.
Complex cantor_hat(const FatCantorSet& set, int K, long k) {
    if (k == 0) return Complex(Real(set.stage_measure(K)), Real(0L));
    Real L(set.stage_arc_len(K));
    Real kk(k);
    Real box = sin(Real::pi() * kk * L) / (Real::pi() * kk);
    Real prod(1L);
    for (int j = 1; j <= K; ++j) {
        Real cj, sj;
        sincos_turn(kk * Real(set.center_offset(j)), cj, sj);
        prod *= Real(2L) * cj;
    }
    return Complex::unit_turn(Real(-k) * Real(set.center0())) * (box * prod);
}

// int_{S cap arc-of-piece} w(t) e^{-2 pi i k t} dt for one S-arc against one piece.
Complex restricted_fourier_piece(const BoundaryWeight& w, const WeightPiece& piece, const Arc& sarc,
                                 long k, Real& err) {
    Complex acc(Real(0L), Real(0L));
    for (const Arc& sp : piece.arc.unwrapped()) {
        for (const Arc& sa : sarc.unwrapped()) {
            Arc ov = intersect_unwrapped(sp, sa);
            if (ov.len.sign() <= 0) continue;
            std::visit(
                [&](const auto& prof) {
                    using T = std::decay_t<decltype(prof)>;
                    if constexpr (std::is_same_v<T, ZeroProfile>) {
                        // nothing
                    } else if constexpr (std::is_same_v<T, ConstProfile>) {
                        acc += arc_exp_integral(ov, -k) * Real(prof.value);
                    } else if constexpr (std::is_same_v<T, CantorIndicatorProfile>) {
                        const FatCantorSet& cs = *prof.set;
                        bool covers = true;  // does ov cover the whole base?
                        {
                            Rat off = (cs.base().start - ov.start).frac();
                            covers = (off + cs.base().len <= ov.len) || ov.is_full_circle();
                        }
                        if (covers) {
                            acc += cantor_hat(cs, prof.stage, k) * Real(prof.value);
                            err += Real(prof.value) *
                                   Real(cs.stage_measure(prof.stage) - cs.limit_measure());
                        } else {
                            if (prof.stage > 16)
                                throw std::invalid_argument(
                                    "restricted fourier over a partial cantor overlap needs stage <= 16");
                            for (const Arc& a : cs.stage_arcs(prof.stage))
                                for (const Arc& ap : a.unwrapped()) {
                                    Arc o2 = intersect_unwrapped(ap, ov);
                                    if (o2.len.sign() > 0)
                                        acc += arc_exp_integral(o2, -k) * Real(prof.value);
                                }
                            err += Real(prof.value) *
                                   Real(cs.stage_measure(prof.stage) - cs.limit_measure());
                        }
                    } else {
                        // cusp / sin profiles: adaptive quadrature on the overlap
                        auto wv = [&](const Real& t) {
                            return w.eval(Rat::from_real(t)).value;
                        };
                        auto fre = [&](const Real& t) {
                            Real c, s;
                            sincos_turn(Real(-k) * t, c, s);
                            return wv(t) * c;
                        };
                        auto fim = [&](const Real& t) {
                            Real c, s;
                            sincos_turn(Real(-k) * t, c, s);
                            return wv(t) * s;
                        };
                        Real a(ov.start), b(ov.end());
                        long prec = (long)working_precision();
                        QuadResult qre = integrate_adaptive(fre, a, b, Real::pow2(-prec / 2), Real::pow2(-prec));
                        QuadResult qim = integrate_adaptive(fim, a, b, Real::pow2(-prec / 2), Real::pow2(-prec));
                        acc += Complex(qre.value, qim.value);
                        err += qre.error + qim.error;
                    }
                },
                piece.profile);
        }
    }
    return acc;
}

Complex restricted_fourier(const BoundaryWeight& w, const CircleSet& S, long k, Real& err) {
    Complex acc(Real(0L), Real(0L));
    for (const Arc& sarc : S.arcs())
        for (const WeightPiece& p : w.pieces()) acc += restricted_fourier_piece(w, p, sarc, k, err);
    for (const CantorPart& part : S.cantor_parts()) {
        bool matched = false;
        for (const WeightPiece& p : w.pieces())
            if (const auto* ci = std::get_if<CantorIndicatorProfile>(&p.profile))
                if (ci->set == part.set) {
                    acc += cantor_hat(*part.set, ci->stage, k) * Real(ci->value);
                    err += Real(ci->value) *
                           Real(part.set->stage_measure(ci->stage) - part.set->limit_measure());
                    matched = true;
                    break;
                }
        if (!matched)
            throw std::invalid_argument("target cantor part does not match any weight piece");
    }
    return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// GramSystem

GramSystem::GramSystem(const MeasureSpec& mu, long N) : N_(N) {
    if (N < 0) throw std::invalid_argument("GramSystem: N >= 0");
    if (!mu.disk && !mu.boundary) throw std::invalid_argument("GramSystem: empty measure");
    alpha_.reserve(N + 1);
    for (long n = 0; n <= N; ++n) {
        if (mu.disk) {
            ValueWithError a = alpha_moment(*mu.disk, n);
            alpha_.push_back(a.value);
        } else {
            alpha_.push_back(Real(0L));
        }
    }
    what_.reserve(N + 1);
    for (long k = 0; k <= N; ++k) {
        if (mu.boundary) {
            FourierCoeff f = fourier_w(*mu.boundary, k);
            what_.push_back(f.value);
            werr_ += f.error_bound;
        } else {
            what_.push_back(Complex(Real(0L), Real(0L)));
        }
    }
    scale_.reserve(N + 1);
    for (long n = 0; n <= N; ++n) {
        Real diag = alpha_[n] + what_[0].re;
        if (!(diag > Real(0L))) throw std::invalid_argument("GramSystem: vanishing diagonal");
        scale_.push_back(sqrt(diag));
    }
}

Complex GramSystem::what(long k) const {
    long a = k < 0 ? -k : k;
    if (a > N_) throw std::out_of_range("GramSystem::what");
    return k >= 0 ? what_[a] : what_[a].conj();
}

Complex GramSystem::entry(long i, long j) const {
    Complex v = what(i - j);
    if (i == j) v.re += alpha_[i];
    return v;
}

// ---------------------------------------------------------------------------
// Targets

TargetVector target_vector(const MeasureSpec& mu, const TargetSpec& t, long N) {
    TargetVector tv;
    tv.norm2 = Real(0L);
    tv.b.assign(N + 1, Complex(Real(0L), Real(0L)));
    if (!mu.boundary) return tv;  // targets live on the circle only
    const BoundaryWeight& w = *mu.boundary;
    if (const auto* ind = std::get_if<IndicatorTarget>(&t)) {
        for (const Arc& a : ind->set.arcs()) tv.norm2 += arc_mass(w, a).value;
        for (const CantorPart& part : ind->set.cantor_parts()) {
            bool matched = false;
            for (const WeightPiece& p : w.pieces())
                if (const auto* ci = std::get_if<CantorIndicatorProfile>(&p.profile))
                    if (ci->set == part.set) {
                        tv.norm2 += Real(ci->value) * Real(part.set->stage_measure(ci->stage));
                        matched = true;
                        break;
                    }
            if (!matched)
                throw std::invalid_argument("target cantor part does not match any weight piece");
        }
        Real err(0L);
        for (long n = 0; n <= N; ++n) {
            // b_n = <1_S, z^n> = int_S e^{-2 pi i n t} w dt
            tv.b[n] = restricted_fourier(w, ind->set, n, err);
        }
    } else {
        const auto& coeffs = std::get<CoeffTarget>(t).coeffs;
        long span = 0;
        for (const auto& [k, c] : coeffs) span = std::max(span, std::labs(k));
        // norm^2 = sum_{k,j} c_k conj(c_j) hat w(j-k)
        std::vector<Complex> hatw(2 * span + N + 2, Complex(Real(0L), Real(0L)));
        auto what_at = [&](long m) {
            FourierCoeff f = fourier_w(w, m);
            return f.value;
        };
        for (const auto& [k, ck] : coeffs)
            for (const auto& [j, cj] : coeffs) {
                Complex term = ck * cj.conj() * what_at(j - k);
                tv.norm2 += term.re;
            }
        for (long n = 0; n <= N; ++n) {
            Complex bn(Real(0L), Real(0L));
            for (const auto& [k, ck] : coeffs) bn += ck * what_at(n - k);
            tv.b[n] = bn;
        }
    }
    return tv;
}

// ---------------------------------------------------------------------------
// DistanceSolver

DistanceSolver::DistanceSolver(const MeasureSpec& mu, const TargetSpec& t, long N_max)
    : gs_(mu, N_max), tv_(target_vector(mu, t, N_max)), pivot_min_(Real::inf()), pivot_max_(0L) {
    L_.reserve(N_max + 1);
    c_.reserve(N_max + 1);
    energy_.reserve(N_max + 1);
}

void DistanceSolver::extend(long N) {
    for (long i = built_ + 1; i <= N; ++i) {
        std::vector<Complex> row(i + 1, Complex(Real(0L), Real(0L)));
        for (long j = 0; j < i; ++j) {
            // preconditioned entry G[i][j]/(s_i s_j)
            Complex g = gs_.entry(i, j);
            g /= gs_.diag_scale(i) * gs_.diag_scale(j);
            Complex acc = g;
            for (long k = 0; k < j; ++k) {
                // acc -= L[i][k] * conj(L[j][k])
                Complex prod(Real(0L), Real(0L));
                prod.add_prod_conj(row[k], L_[j][k]);
                acc -= prod;
            }
            acc /= L_[j][j].re;
            row[j] = acc;
        }
        Real diag(1L);  // preconditioned diagonal is exactly 1
        Real s(0L);
        for (long k = 0; k < i; ++k) s += row[k].norm();
        Real piv2 = diag - s;
        if (!(piv2 > Real(0L)))
            throw PivotFailure("Cholesky pivot failure at row " + std::to_string(i));
        Real piv = sqrt(piv2);
        row[i] = Complex(piv, Real(0L));
        pivot_min_ = min(pivot_min_, piv);
        pivot_max_ = max(pivot_max_, piv);

        // forward substitution step for the target
        Complex bi = tv_.b[i];
        bi /= gs_.diag_scale(i);
        for (long k = 0; k < i; ++k) {
            Complex prod(Real(0L), Real(0L));
            prod.add_prod(row[k], c_[k]);
            bi -= prod;
        }
        bi /= piv;
        c_.push_back(bi);
        Real e = (i == 0) ? Real(0L) : energy_[i - 1];
        e += c_[i].norm();
        energy_.push_back(e);
        L_.push_back(std::move(row));
        built_ = i;
    }
}

Real DistanceSolver::distance_sq_at(long N) {
    if (N > gs_.degree()) throw std::out_of_range("DistanceSolver: N beyond assembled degree");
    extend(N);
    return tv_.norm2 - energy_[N];
}

Real DistanceSolver::distance_at(long N) {
    Real d2 = distance_sq_at(N);
    if (d2 < Real(0L)) {
        if (d2 < -Real(1e-12)) throw PivotFailure("distance^2 below -1e-12: precision exhausted");
        return Real(0L);
    }
    return sqrt(d2);
}

Real DistanceSolver::cond_estimate() const {
    if (built_ < 0) return Real(1L);
    Real r = pivot_max_ / pivot_min_;
    return r * r;
}

Real DistanceSolver::quadratic_form_inv(const std::vector<Complex>& rho) {
    long N = (long)rho.size() - 1;
    extend(N);
    std::vector<Complex> y;
    y.reserve(rho.size());
    Real out(0L);
    for (long i = 0; i <= N; ++i) {
        Complex v = rho[i];
        v /= gs_.diag_scale(i);
        for (long k = 0; k < i; ++k) {
            Complex prod(Real(0L), Real(0L));
            prod.add_prod(L_[i][k], y[k]);
            v -= prod;
        }
        v /= L_[i][i].re;
        y.push_back(v);
        out += v.norm();
    }
    return out;
}

namespace {

struct PrecisionGuard {
    mpfr_prec_t saved;
    PrecisionGuard() : saved(working_precision()) {}
    ~PrecisionGuard() { set_working_precision(saved); }
};

}  // namespace

Real distance(const MeasureSpec& mu, const TargetSpec& t, long N) {
    PrecisionGuard guard;
    for (int attempt = 0; attempt < 3; ++attempt) {
        try {
            DistanceSolver solver(mu, t, N);
            return solver.distance_at(N);
        } catch (const PivotFailure&) {
            set_working_precision(working_precision() * 2);
        }
    }
    throw PrecisionError("distance: precision escalation ladder exhausted");
}

DistanceProfile splitting_profile(const MeasureSpec& mu, const TargetSpec& t,
                                  const std::vector<long>& N_list) {
    PrecisionGuard guard;
    DistanceProfile out;
    out.escalations = 0;
    for (int attempt = 0;; ++attempt) {
        try {
            out.rows.clear();
            long N_max = 0;
            for (long n : N_list) N_max = std::max(N_max, n);
            DistanceSolver solver(mu, t, N_max);
            for (long n : N_list) {
                DistanceProfileRow row{n, solver.distance_at(n), solver.cond_estimate()};
                out.rows.push_back(std::move(row));
            }
            break;
        } catch (const PivotFailure&) {
            if (attempt >= 2) throw PrecisionError("splitting_profile: escalation exhausted");
            set_working_precision(working_precision() * 2);
            ++out.escalations;
        }
    }
    out.precision_used = working_precision();
    out.monotone = true;
    for (size_t i = 1; i < out.rows.size(); ++i)
        if (out.rows[i].d > out.rows[i - 1].d + Real::pow2(-(long)working_precision() / 2))
            out.monotone = false;
    out.plateau_valid = false;
    out.plateau_estimate = Real(0L);
    if (out.rows.size() >= 3) {
        // Aitken extrapolation of the last three rows (exploratory: the theory
        // provides no rate)
        const Real& d1 = out.rows[out.rows.size() - 3].d;
        const Real& d2 = out.rows[out.rows.size() - 2].d;
        const Real& d3 = out.rows[out.rows.size() - 1].d;
        Real denom = d1 - Real(2L) * d2 + d3;
        if (abs(denom) > Real::pow2(-(long)working_precision() / 2)) {
            out.plateau_estimate = (d1 * d3 - d2 * d2) / denom;
            out.plateau_valid = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Beurling-Malliavin majorant

Real BMMajorant::ghat_at(long n) const {
    Real x = Real(2L) * Real::pi() * Real(n < 0 ? -n : n);
    Real prod = scale;
    for (const Real& a : widths) {
        if (n == 0)
            prod *= Real(2L) * a;
        else
            prod *= Real(2L) * sin(a * x) / x;
    }
    return prod;
}

Real BMMajorant::ghat_bound(const Real& x) const {
    Real prod = scale;
    for (const Real& a : widths) prod *= min(Real(2L) * a, Real(2L) / abs(x));
    return prod;
}

Complex BMMajorant::coeff(long n) const {
    Real g = (n >= 0 && n < (long)ghat.size()) ? ghat[n]
             : (-n >= 0 && -n < (long)ghat.size()) ? ghat[-n]
                                                   : ghat_at(n);
    return Complex::unit_turn(Real(-n) * Real(center)) * g;
}

Real BMMajorant::eval(const Rat& t, long terms, Real* tail) const {
    // h(t) = lambda [ghat(0) + 2 sum_{n>=1} ghat(2 pi n) cos(2 pi n (t-c))]
    Real acc = (ghat.empty() ? ghat_at(0) : ghat[0]);
    Rat dt = (t - center).frac();
    for (long n = 1; n <= terms; ++n) {
        Real g = (n < (long)ghat.size()) ? ghat[n] : ghat_at(n);
        Real c, s;
        sincos_turn(Real(n) * Real(dt), c, s);
        acc.add_prod(Real(2L) * g, c);
    }
    if (tail) {
        // remainder bound: 2 sum_{n > terms} |ghat|; the bound decays like a
        // power >= 2 once all factors are in their 2/x regime
        Real tb(0L);
        Real block_start(terms + 1);
        for (int j = 0; j < 200; ++j) {
            Real b = ghat_bound(Real(2L) * Real::pi() * block_start) * block_start;  // crude block
            tb += Real(2L) * b;
            block_start *= Real(2L);
            if (b < Real::pow2(-(long)working_precision())) break;
        }
        *tail = tb;
    }
    return acc;
}

BMMajorant bm_majorant(const RadialWeight& G, const Arc& J, long N_max,
                       const std::vector<ValueWithError>& alpha) {
    if ((long)alpha.size() < N_max + 1)
        throw std::invalid_argument("bm_majorant: moment table too short");
    if (!G.check_loglog_int().holds)
        throw std::domain_error("bm_majorant: G violates the log-log integrability condition");
    const long prec = (long)working_precision();
    long K = 20;
    for (int attempt = 0; attempt < 2; ++attempt) {
        BMMajorant bm;
        bm.J = J;
        bm.K = K;
        bm.center = J.midpoint_mod1();
        bm.scale = Real(1L);
        Real A = Real(3L) * Real(J.len) / (Real::pi() * Real::pi());
        for (long k = 1; k <= K; ++k) bm.widths.push_back(A / Real(k * k));

        std::vector<Real> raw(N_max + 1);
        for (long n = 0; n <= N_max; ++n) raw[n] = bm.ghat_at(n);
        Real lambda = Real::inf();
        for (long n = 0; n <= N_max; ++n) {
            Real cap = alpha[n].value / Real(n + 1);
            Real g = abs(raw[n]);
            if (g.is_zero()) continue;
            lambda = min(lambda, cap / g);
        }
        lambda *= Real(1L) - Real::pow2(-prec / 2);
        bm.scale = lambda;
        bm.ghat.resize(N_max + 1);
        for (long n = 0; n <= N_max; ++n) bm.ghat[n] = lambda * raw[n];

        bool ok = true;
        for (long n = 0; n <= N_max; ++n)
            if (abs(bm.ghat[n]) > alpha[n].value / Real(n + 1)) ok = false;
        if (!ok) {
            K += 8;
            continue;
        }

        // h at the center of J, with an explicit series tail bound
        Real tail(0L);
        long T = std::max<long>(4 * N_max, 4096);
        Real acc = bm.ghat[0];
        for (long n = 1; n <= T; ++n) {
            // ghat_at already carries the scale
            Real g = (n <= N_max) ? bm.ghat[n] : bm.ghat_at(n);
            acc += Real(2L) * g;
        }
        {
            Real block_start(T + 1);
            for (int j = 0; j < 200; ++j) {
                Real b = bm.ghat_bound(Real(2L) * Real::pi() * block_start) * block_start;
                tail += Real(2L) * b;
                block_start *= Real(2L);
                if (b < Real::pow2(-prec)) break;
            }
        }
        bm.h_at_center = acc;
        bm.center_tail = tail;

        // measured decay slope on the tabulated tail: log(-log |ghat_n / ghat_0|)
        // against log n between N_max/2 and N_max
        {
            auto ll = [&](long n) {
                Real ratio = abs(bm.ghat[n]) / abs(bm.ghat[0]);
                return log(-log(ratio));
            };
            long n1 = std::max<long>(N_max / 2, 2), n2 = N_max;
            bm.tail_loglog_slope = (ll(n2) - ll(n1)) / (log(Real(n2)) - log(Real(n1)));
        }
        return bm;
    }
    throw PrecisionError("bm_majorant: majorization failed after refinement");
}

// ---------------------------------------------------------------------------
// Annihilator tuple

namespace {

bool weight_is_const_one_on(const BoundaryWeight& w, const Arc& I) {
    for (const Arc& part : I.unwrapped())
        for (const WeightPiece& p : w.pieces()) {
            Arc ov = intersect_unwrapped(p.arc, part);
            if (ov.len.sign() <= 0) continue;
            const auto* c = std::get_if<ConstProfile>(&p.profile);
            if (!c || c->value != Rat(1L)) return false;
        }
    return true;
}

}  // namespace

AnnihilatorTuple annihilator(const MeasureSpec& mu, const Arc& I, long N_max,
                             const AnnihilatorOptions& opt) {
    if (!mu.disk) throw std::invalid_argument("annihilator: needs a disk part");
    if (!mu.boundary) throw std::invalid_argument("annihilator: needs a boundary part");
    const RadialWeight& G = *mu.disk;
    const BoundaryWeight& w = *mu.boundary;
    SzegoMeanResult sm = szego_mean(w, CircleSet::from_arcs({I}));
    if (!sm.finite) throw std::domain_error("annihilator: log w not integrable on I");

    AnnihilatorTuple t;
    t.I = I;
    t.J = Arc((I.start + I.len / Rat(3L)).frac(), I.len / Rat(3L));
    t.N_max = N_max;
    t.alpha.reserve(N_max + 1);
    std::vector<ValueWithError> table;
    table.reserve(N_max + 1);
    for (long n = 0; n <= N_max; ++n) {
        table.push_back(alpha_moment(G, n));
        t.alpha.push_back(table.back().value);
    }
    t.h = bm_majorant(G, t.J, N_max, table);

    t.F.reserve(N_max + 1);
    for (long n = 0; n <= N_max; ++n) {
        Complex Fn = t.h.coeff(n);
        Fn /= t.alpha[n];
        t.F.push_back(-Fn);
    }

    t.u_data = log_modulus_profile(w, I, opt.u_resolution);
    t.u_is_trivial = t.u_data.profile.steps().empty() &&
                     t.u_data.profile.analytic_pieces().empty();

    t.sum_F2alpha = Real(0L);
    t.sum_alpha_over_1pn2 = Real(0L);
    for (long n = 0; n <= N_max; ++n) {
        t.sum_F2alpha.add_prod(t.F[n].norm(), t.alpha[n]);
        t.sum_alpha_over_1pn2 += t.alpha[n] / Real((n + 1) * (n + 1));
    }

    // sup |f_T| <= sup |h| (|u| = min(w,1) cancels at least one power of w)
    {
        Real l1(abs(t.h.ghat[0]));
        for (long n = 1; n <= N_max; ++n) l1 += Real(2L) * abs(t.h.ghat[n]);
        Real tail(0L);
        Real block_start(N_max + 1);
        for (int j = 0; j < 200; ++j) {
            Real b = t.h.ghat_bound(Real(2L) * Real::pi() * block_start) * block_start;
            tail += Real(2L) * b;
            block_start *= Real(2L);
            if (b < Real::pow2(-(long)working_precision())) break;
        }
        t.fT_sup_bound = l1 + tail;
    }

    bool w_is_one = weight_is_const_one_on(w, I) && I.is_full_circle();
    if (t.u_is_trivial && w_is_one) {
        // u = 1, w = 1: the projection of F conj(u) is F itself, f_T = h.
        t.fD = t.F;
        Real fT2(0L);
        for (long n = -N_max; n <= N_max; ++n) fT2 += t.h.coeff(n).norm();
        // Parseval tail of h beyond the tabulated range
        Real tail2(0L);
        Real block_start(N_max + 1);
        for (int j = 0; j < 200; ++j) {
            Real b = t.h.ghat_bound(Real(2L) * Real::pi() * block_start);
            tail2 += Real(2L) * b * b * block_start;
            block_start *= Real(2L);
            if (b < Real::pow2(-(long)working_precision())) break;
        }
        Real fD2 = t.sum_F2alpha;
        t.tuple_norm = sqrt(fD2 + fT2 + tail2);
        t.residual.reserve(N_max + 1);
        t.residual_worst = Real(0L);
        for (long n = 0; n <= N_max; ++n) {
            Complex r = t.fD[n] * t.alpha[n] + t.h.coeff(n);
            t.residual.push_back(r);
            t.residual_worst = max(t.residual_worst, r.abs());
        }
        return t;
    }

    // General path: numeric projection of F conj(u) onto the monomial span.
    const long M_ang = opt.angular_factor * (N_max + 1);
    // near-boundary radius for u's circle samples, clear of the branch guard
    const Real rho_b = Real(1L) - Real::pow2(-(long)working_precision() / 8);

    // circle samples of h, u, w; the h series is cut where the coefficient
    // bound falls below 2^{-prec/2} of the peak
    long T_eval = std::max<long>(4 * N_max, 64);
    {
        Real ref = abs(t.h.ghat[0]) * Real::pow2(-(long)working_precision() / 2);
        while (T_eval < 65536 &&
               t.h.ghat_bound(Real(2L) * Real::pi() * Real(T_eval)) * Real(T_eval) > ref)
            T_eval *= 2;
    }
    std::vector<Complex> u_circ(M_ang);
    std::vector<Real> h_circ(M_ang), w_circ(M_ang);
    for (long j = 0; j < M_ang; ++j) {
        Rat tj(j, M_ang);
        Complex zb = Complex::unit_turn(Real(tj)) * rho_b;
        u_circ[j] = outer_eval(t.u_data.profile, zb).value();
        h_circ[j] = t.h.eval(tj, T_eval);
        w_circ[j] = w.eval(tj).value;
    }

    // disk quadrature: dyadic panels clustered toward r = 1, each split in two
    struct RadialNode { Real r, wgt; };
    std::vector<RadialNode> rad;
    {
        const GLRule& rule = gl_rule(32);
        Real lo(0L);
        for (int p = 0; p < opt.radial_panels; ++p) {
            Real hi = (p + 1 == opt.radial_panels) ? Real(1L) - Real::pow2(-30)
                                                   : Real(1L) - Real::pow2(-(p + 1));
            Real mid_panel = (lo + hi) / Real(2L);
            for (const auto& [a, b] : {std::pair{lo, mid_panel}, std::pair{mid_panel, hi}}) {
                Real mid = (a + b) / Real(2L), half = (b - a) / Real(2L);
                for (size_t i = 0; i < rule.nodes.size(); ++i)
                    rad.push_back({mid + half * rule.nodes[i], half * rule.weights[i]});
            }
            lo = hi;
        }
    }

    // numer_n = <F conj u, z^n>_{mu_D} via radial x angular grid
    std::vector<Complex> numer(N_max + 1, Complex(Real(0L), Real(0L)));
    for (const RadialNode& rn : rad) {
        Real gw = G.eval_raw(Real(1L) - rn.r) * rn.wgt * rn.r * Real(2L) / Real(M_ang);
        // angular ring values of F(z) conj(u(z))
        std::vector<Complex> ring(M_ang);
        for (long j = 0; j < M_ang; ++j) {
            Rat tj(j, M_ang);
            Complex z = Complex::unit_turn(Real(tj)) * rn.r;
            // Horner for F
            Complex Fz(Real(0L), Real(0L));
            for (long n = N_max; n >= 0; --n) Fz = Fz * z + t.F[n];
            Complex uz = outer_eval(t.u_data.profile, z).value();
            ring[j] = Fz * uz.conj();
        }
        Real rpow(1L);  // radial part r^n of conj(z^n)
        for (long n = 0; n <= N_max; ++n) {
            Complex acc(Real(0L), Real(0L));
            for (long j = 0; j < M_ang; ++j) {
                Complex e = Complex::unit_turn(Real(-n) * Real(Rat(j, M_ang)));
                acc.add_prod(ring[j], e);
            }
            numer[n] += acc * (gw * rpow);
            rpow *= rn.r;
        }
    }
    t.fD.reserve(N_max + 1);
    for (long n = 0; n <= N_max; ++n) {
        Complex cn = numer[n];
        cn /= t.alpha[n];
        t.fD.push_back(cn);
    }

    // residuals <f_D + f_T, z^n> = c_n alpha_n + (h conj u / w * w)-hat(n)
    t.residual.reserve(N_max + 1);
    t.residual_worst = Real(0L);
    Real fT2(0L);
    for (long j = 0; j < M_ang; ++j) {
        Real uw = u_circ[j].norm();
        if (w_circ[j] > Real(0L)) fT2 += h_circ[j] * h_circ[j] * uw / w_circ[j] / Real(M_ang);
    }
    for (long n = 0; n <= N_max; ++n) {
        Complex hat(Real(0L), Real(0L));
        for (long j = 0; j < M_ang; ++j) {
            Complex e = Complex::unit_turn(Real(-n) * Real(Rat(j, M_ang)));
            Complex hu = Complex(h_circ[j]) * u_circ[j].conj();
            hat.add_prod(hu, e);
        }
        hat /= Real(M_ang);
        Complex r = t.fD[n] * t.alpha[n] + hat;
        t.residual.push_back(r);
        t.residual_worst = max(t.residual_worst, r.abs());
    }
    Real fD2(0L);
    for (long n = 0; n <= N_max; ++n) fD2.add_prod(t.fD[n].norm(), t.alpha[n]);
    t.tuple_norm = sqrt(fD2 + fT2);
    return t;
}

// ---------------------------------------------------------------------------
// Certificate

CertificateResult certificate(const AnnihilatorTuple& tuple, const MeasureSpec& mu,
                              const TargetSpec& target, long N_for_correction) {
    if (!mu.boundary) throw std::invalid_argument("certificate: needs a boundary part");
    CertificateResult out;
    out.tail_bound = Real(0L);

    Complex inner(Real(0L), Real(0L));
    if (const auto* ind = std::get_if<IndicatorTarget>(&target)) {
        if (!ind->set.cantor_parts().empty())
            throw std::invalid_argument("certificate: cantor-part targets are not supported");
        if (!tuple.u_is_trivial)
            throw std::invalid_argument("certificate: general-u indicator targets not supported");
        // <f, Phi> = int_{S cap I} conj(h) u dm with u = 1
        long T = 4 * tuple.N_max;
        for (const Arc& sarc : ind->set.arcs()) {
            for (const Arc& ip : tuple.I.unwrapped()) {
                Arc ov = intersect_unwrapped(sarc, ip);
                if (ov.len.sign() <= 0) continue;
                for (long n = -T; n <= T; ++n)
                    inner += tuple.h.coeff(n).conj() * arc_exp_integral(ov, n);
                Real block_start(T + 1);
                for (int j = 0; j < 200; ++j) {
                    Real b = tuple.h.ghat_bound(Real(2L) * Real::pi() * block_start) * block_start;
                    out.tail_bound += Real(2L) * b * Real(ov.len);
                    block_start *= Real(2L);
                    if (b < Real::pow2(-(long)working_precision())) break;
                }
            }
        }
    } else {
        const auto& coeffs = std::get<CoeffTarget>(target).coeffs;
        if (!tuple.u_is_trivial)
            throw std::invalid_argument("certificate: general-u coefficient targets not supported");
        for (const auto& [k, ck] : coeffs) inner += ck * tuple.h.coeff(k).conj();
    }
    out.inner_abs = inner.abs();

    // residual vector up to the comparison degree: stored residuals on
    // 0..N_max, then the bare h-tail coefficients (f_D is a polynomial)
    std::vector<Complex> rho;
    rho.reserve(N_for_correction + 1);
    for (long n = 0; n <= N_for_correction; ++n) {
        if (n <= tuple.N_max)
            rho.push_back(tuple.residual[n]);
        else
            rho.push_back(tuple.h.coeff(n));
    }
    DistanceSolver solver(mu, target, N_for_correction);
    Real qf = solver.quadratic_form_inv(rho);
    TargetVector tv = target_vector(mu, target, 0);
    Real fnorm = sqrt(tv.norm2);
    out.correction = Real(2L) * fnorm * sqrt(qf) / tuple.tuple_norm;

    Real numer = out.inner_abs - out.tail_bound;
    if (numer < Real(0L)) numer = Real(0L);
    out.lower_bound = numer / tuple.tuple_norm;
    return out;
}

// ---------------------------------------------------------------------------
// Structure prediction

StructurePrediction predict_structure(const MeasureSpec& mu) {
    StructurePrediction out;
    if (!mu.disk) {
        // pure boundary measure: classical Szego regime, out of scope here
        out.expdec_holds = false;
        out.loglog_holds = false;
        out.expdec_d = Real(0L);
        out.loglog_integral = Real(0L);
        out.in_scope = false;
        out.residual_empty = true;
        out.full_splitting = false;
        out.khrushchev_flag = false;
        out.volberg_flag = false;
        out.decomposition = "no disk part: classical Szego territory (out of scope)";
        if (mu.boundary) out.sets = carrier_and_residual(*mu.boundary);
        return out;
    }
    const RadialWeight& G = *mu.disk;
    RadialWeight::ExpDecResult ed = G.check_exp_dec();
    RadialWeight::LogLogResult ll = G.check_loglog_int();
    out.expdec_holds = ed.holds;
    out.expdec_d = ed.d;
    out.loglog_holds = ll.holds;
    out.loglog_integral = ll.integral;
    if (mu.boundary) out.sets = carrier_and_residual(*mu.boundary);
    bool F_empty = out.sets.F.is_empty();
    bool E_empty = out.sets.E.is_empty();
    bool F_equals_E = !E_empty && out.sets.E.arcs().empty() &&
                      out.sets.E.cantor_parts().size() == out.sets.F.cantor_parts().size();
    out.residual_empty = F_empty;
    out.in_scope = ed.holds && ll.holds;
    out.full_splitting = ed.holds && F_equals_E;
    out.khrushchev_flag = !ed.holds && ll.holds;
    out.volberg_flag = !ll.holds;
    std::ostringstream os;
    if (out.full_splitting) {
        os << "full splitting: P^2(mu) = P^2(mu_D) (+) L^2(mu_T)";
    } else if (out.in_scope) {
        if (F_empty)
            os << "irreducible: P^2(mu) = P^2(mu_D + mu_T), no L^2 summand";
        else
            os << "P^2(mu) = P^2(mu_D + mu_{T\\F}) (+) L^2(mu_F), first part irreducible";
    } else {
        os << "out of theorem scope:";
        if (out.khrushchev_flag) os << " below the exponential-decay cutoff (Khrushchev regime)";
        if (out.volberg_flag) os << " log-log integrability fails (Volberg regime)";
    }
    out.decomposition = os.str();
    return out;
}

}  // namespace p2mu
