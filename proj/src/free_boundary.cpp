#include "levlim/free_boundary.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "levlim/asymptotics.hpp"
#include "levlim/quadrature.hpp"

namespace levlim {

// ---------------------------------------------------------------------------
// Band
// ---------------------------------------------------------------------------

Band Band::from_zetas(double zm, double zp, const MarketParams& p) {
    if (!(zm < zp)) throw DomainError("band requires zeta_minus < zeta_plus");
    Band b;
    b.zeta_minus = zm;
    b.zeta_plus = zp;
    if (zm > 0.0) {
        b.regime = RegimeTag::LongOnly;
    } else if (zp < leveraged_barrier(p)) {
        b.regime = RegimeTag::Leveraged;
    } else {
        throw DomainError("band straddles the inadmissible interval [-1/(1-eps), 0]");
    }
    b.pi_minus = pi_of_zeta(zm);
    b.pi_plus = pi_of_zeta(zp);
    if (!(b.pi_minus < b.pi_plus)) throw DomainError("band weights out of order");
    if (!(b.pi_plus < 1.0 / p.epsilon))
        throw DomainError("band violates the liquidation constraint pi < 1/eps");
    return b;
}

Band Band::degenerate() { return Band{}; }

// ---------------------------------------------------------------------------
// Candidate gradient W
// ---------------------------------------------------------------------------

CandidateGradient::CandidateGradient(double zeta_minus, const MarketParams& p,
                                     const Preference& pref, double rel_tol)
    : zeta_minus_(zeta_minus), params_(p), pref_(pref), rel_tol_(rel_tol),
      exponent_(power_exponent(p)) {
    if (!admissible_zeta(zeta_minus, p))
        throw DomainError("lower boundary outside the admissible domain");
}

GradientValue CandidateGradient::operator()(double zeta) const {
    if (zeta == zeta_minus_) return {0.0, 0.0};
    bool same_side = (zeta_minus_ > 0.0) ? (zeta > 0.0) : (zeta < -1.0);
    if (!same_side)
        throw DomainError("gradient evaluation crossed to the other admissible branch");

    // Parameterize y = zeta_minus + span*t and keep the reward gap in its
    // factored form: the integrand is then free of catastrophic cancellation
    // even a hair above the lower boundary.
    const double a = exponent_;
    const double span = zeta - zeta_minus_;
    const double log_ref = std::log(std::fabs(zeta));
    auto integrand = [&](double t) {
        double y = zeta_minus_ + span * t;
        return reward_rate_gap(zeta_minus_, y, params_, pref_) *
               std::exp((a - 2.0) * (std::log(std::fabs(y)) - log_ref));
    };
    double j = span * integrate(integrand, 0.0, 1.0, rel_tol_);
    double s2z2 = params_.sigma * params_.sigma * zeta * zeta;
    double w = 2.0 * j / s2z2;
    double w_prime = 2.0 * reward_rate_gap(zeta_minus_, zeta, params_, pref_) / s2z2 - a * w / zeta;
    return {w, w_prime};
}

GradientValue eval_gradient(double zeta_minus, double zeta, const MarketParams& p,
                            const Preference& pref, double rel_tol) {
    return CandidateGradient(zeta_minus, p, pref, rel_tol)(zeta);
}

// ---------------------------------------------------------------------------
// Pasting residuals
// ---------------------------------------------------------------------------

PastingResiduals pasting_residuals(double zeta_minus, double zeta_plus,
                                   const MarketParams& p, const Preference& pref,
                                   double rel_tol) {
    if (!(zeta_minus < zeta_plus))
        throw DomainError("pasting_residuals requires zeta_minus < zeta_plus");
    GradientValue gv = eval_gradient(zeta_minus, zeta_plus, p, pref, rel_tol);

    double s2z2 = p.sigma * p.sigma * zeta_plus * zeta_plus;
    double a = power_exponent(p);
    double d1 = 1.0 + zeta_plus;
    double d2 = 1.0 + (1.0 - p.epsilon) * zeta_plus;

    PastingResiduals r;
    r.value_matching = gv.w - p.epsilon / (d1 * d2);
    double h_gap = reward_rate_gap(zeta_minus, zeta_plus, p, pref);
    r.slope_matching = 2.0 * h_gap / s2z2 - a / zeta_plus * gv.w
                       - (1.0 - p.epsilon) * (1.0 - p.epsilon) / (d2 * d2)
                       + 1.0 / (d1 * d1);
    return r;
}

ScaledResiduals rescaled_residuals(double u_minus, double u_plus, double delta,
                                   const MarketParams& p, double rel_tol) {
    if (!(0.0 < u_plus && u_plus < u_minus))
        throw DomainError("rescaled_residuals requires 0 < u_plus < u_minus");
    double a = power_exponent(p);
    double two_mu_s2 = a;
    double base = std::log1p(u_plus * delta);
    // 1/u_minus - 1/xi = (xi - u_minus)/(u_minus xi); parameterizing
    // xi = u_minus + span*t keeps the small factor exact near u_minus.
    double span = u_plus - u_minus;
    auto integrand = [&](double t) {
        double xi = u_minus + span * t;
        return (span * t / (u_minus * xi)) *
               std::exp((a - 2.0) * (std::log1p(xi * delta) - base));
    };
    double d_plus = 1.0 + u_plus * delta;
    double xi_val = 2.0 * p.mu / (p.sigma * p.sigma * d_plus * d_plus) * span *
                    integrate(integrand, 0.0, 1.0, rel_tol);

    ScaledResiduals r;
    double one_m_d2 = 1.0 - delta * delta;
    r.f1 = xi_val - 1.0 / (u_plus * (one_m_d2 * u_plus - delta));
    double denom = u_plus * u_plus * (delta + (delta * delta - 1.0) * u_plus) *
                   (delta + (delta * delta - 1.0) * u_plus);
    // The h-gap term carries a 1/(1+u_plus delta)^2 factor from 1/zeta_plus^2;
    // without it f2 is not delta times the slope-matching condition and the
    // solved band drifts at relative O(delta).
    r.f2 = two_mu_s2 * ((1.0 / u_plus - 1.0 / u_minus) / (d_plus * d_plus)
                        + delta / d_plus * xi_val)
           - (2.0 * one_m_d2 * u_plus - delta) / denom;
    return r;
}

// ---------------------------------------------------------------------------
// Damped Newton on a 2-d residual with finite-difference Jacobian
// ---------------------------------------------------------------------------

namespace {

using Vec2 = std::array<double, 2>;

double inf_norm(const Vec2& v) { return std::max(std::fabs(v[0]), std::fabs(v[1])); }

struct NewtonOutcome {
    Vec2 x{};
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

template <class Resid, class Admissible>
NewtonOutcome damped_newton(Resid&& resid, Admissible&& admissible, Vec2 x,
                            const SolveOptions& opts) {
    NewtonOutcome out;
    out.x = x;
    if (!admissible(x[0], x[1])) return out;

    Vec2 f;
    try {
        f = resid(x[0], x[1]);
    } catch (const NumericalError&) {
        return out;
    }
    double norm = inf_norm(f);
    for (int it = 0; it < opts.max_iterations; ++it) {
        out.x = x;
        out.residual = norm;
        out.iterations = it;
        if (norm < opts.newton_tol) {
            out.converged = true;
            return out;
        }

        // Central-difference Jacobian, step 1e-6 (1+|x_j|); fall back to a
        // one-sided difference when a probe leaves the admissible set.
        double jac[2][2];
        for (int j = 0; j < 2; ++j) {
            double hstep = 1e-6 * (1.0 + std::fabs(x[j]));
            Vec2 hi = x, lo = x;
            hi[j] += hstep;
            lo[j] -= hstep;
            bool ok_hi = admissible(hi[0], hi[1]);
            bool ok_lo = admissible(lo[0], lo[1]);
            Vec2 fhi{}, flo{};
            double span = 0.0;
            try {
                if (ok_hi && ok_lo) {
                    fhi = resid(hi[0], hi[1]);
                    flo = resid(lo[0], lo[1]);
                    span = 2.0 * hstep;
                } else if (ok_hi) {
                    fhi = resid(hi[0], hi[1]);
                    flo = f;
                    span = hstep;
                } else if (ok_lo) {
                    fhi = f;
                    flo = resid(lo[0], lo[1]);
                    span = hstep;
                } else {
                    return out;
                }
            } catch (const NumericalError&) {
                return out;
            }
            jac[0][j] = (fhi[0] - flo[0]) / span;
            jac[1][j] = (fhi[1] - flo[1]) / span;
        }
        double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if (det == 0.0 || !std::isfinite(det)) return out;
        Vec2 step = {(-f[0] * jac[1][1] + f[1] * jac[0][1]) / det,
                     (-f[1] * jac[0][0] + f[0] * jac[1][0]) / det};
        // Cap the step so a rough Jacobian cannot throw the iterate across
        // the domain; the line search recovers the rest.
        double cap = 0.5 * (std::fabs(x[1] - x[0]) + std::fabs(x[0]) + std::fabs(x[1]));
        double step_norm = inf_norm(step);
        if (step_norm > cap) {
            step[0] *= cap / step_norm;
            step[1] *= cap / step_norm;
        }

        bool accepted = false;
        double scale = 1.0;
        for (int k = 0; k <= opts.max_halvings; ++k, scale *= 0.5) {
            Vec2 trial = {x[0] + scale * step[0], x[1] + scale * step[1]};
            if (!admissible(trial[0], trial[1])) continue;
            Vec2 ft;
            try {
                ft = resid(trial[0], trial[1]);
            } catch (const NumericalError&) {
                continue;
            }
            double nt = inf_norm(ft);
            if (std::isfinite(nt) && nt < norm) {
                x = trial;
                f = ft;
                norm = nt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Stagnated at the floating-point floor of the residual.
            out.x = x;
            out.residual = norm;
            out.converged = norm < opts.newton_tol;
            return out;
        }
    }
    out.x = x;
    out.residual = norm;
    out.converged = norm < opts.newton_tol;
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// kappa and the risk-neutral leading constants
// ---------------------------------------------------------------------------

double band_ratio_constant() {
    // f(x) = (3/2)x + log(1-x); f has a single zero on (1/3, 1).
    double x = 0.5;
    for (int i = 0; i < 100; ++i) {
        double f = 1.5 * x + std::log1p(-x);
        double fp = 1.5 - 1.0 / (1.0 - x);
        double step = f / fp;
        x -= step;
        if (x <= 1.0 / 3.0) x = 0.4;
        if (x >= 1.0) x = 0.9;
        if (std::fabs(step) < 1e-16) break;
    }
    return x;
}

std::pair<double, double> leading_scaled_boundaries(const MarketParams& p) {
    if (!(p.mu > 0.0)) throw DomainError("leading boundaries require mu > 0");
    double k = band_ratio_constant();
    double a_plus = std::sqrt(p.sigma * p.sigma / (k * p.mu));
    double a_minus = a_plus / (1.0 - k);
    return {a_minus, a_plus};
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

namespace {

void check_validity_guard(const MarketParams& p, const SolveOptions& opts) {
    if (p.epsilon > 0.1 && !opts.force)
        throw DomainError("eps above the 0.1 validity guard; set force to override");
}

SolveReport degenerate_report(const MarketParams& p, const Preference& pref) {
    SolveReport rep;
    rep.band = Band::degenerate();
    rep.lambda = p.mu - 0.5 * pref.gamma * p.sigma * p.sigma;
    rep.method = SolveMethod::RiskAverse;
    rep.warning = "degenerate full-investment band (gamma = mu/sigma^2)";
    return rep;
}

} // namespace

SolveReport solve_risk_neutral(const MarketParams& p, const SolveOptions& opts) {
    check_validity_guard(p, opts);
    if (!(p.mu > 0.0)) throw DomainError("risk-neutral solve requires mu > 0");
    const double delta = std::sqrt(p.epsilon);
    auto [a_minus, a_plus] = leading_scaled_boundaries(p);

    // The sell boundary must stay below the -1/(1-eps) barrier.
    const double u_plus_floor = delta / (1.0 - p.epsilon);
    auto admissible = [&](double um, double up) {
        return up > u_plus_floor && um > up;
    };
    // f2 is delta times the slope-matching residual; rescale so the Newton
    // tolerance applies to the actual boundary conditions.
    auto resid = [&](double um, double up) -> Vec2 {
        ScaledResiduals r = rescaled_residuals(um, up, delta, p, opts.quad_rel_tol);
        return {r.f1, r.f2 / delta};
    };

    Vec2 start{a_minus, a_plus};
    if (opts.initializer)
        start = {(-1.0 - opts.initializer->first) / delta,
                 (-1.0 - opts.initializer->second) / delta};
    NewtonOutcome nw = damped_newton(resid, admissible, start, opts);
    if (!nw.converged)
        throw SolverError("risk-neutral Newton did not converge",
                          -1.0 - nw.x[0] * delta, -1.0 - nw.x[1] * delta,
                          nw.residual, nw.iterations);

    double zm = -1.0 - nw.x[0] * delta;
    double zp = -1.0 - nw.x[1] * delta;
    SolveReport rep;
    rep.band = Band::from_zetas(zm, zp, p);
    Preference rn(0.0);
    rep.lambda = reward_rate(zm, p, rn);
    rep.residual_norm = nw.residual;
    rep.iterations = nw.iterations;
    rep.method = SolveMethod::RiskNeutral;
    rep.gradient.emplace(zm, p, rn, opts.quad_rel_tol);
    return rep;
}

SolveReport solve_risk_averse(const MarketParams& p, const Preference& pref,
                              const SolveOptions& opts) {
    check_validity_guard(p, opts);
    if (!(pref.gamma > 0.0))
        throw DomainError("solve_risk_averse requires gamma > 0");
    double pistar = merton_fraction(p, pref);
    if (std::fabs(pistar - 1.0) < 1e-12) return degenerate_report(p, pref);

    const bool leveraged = pistar > 1.0;
    const double barrier = leveraged_barrier(p);
    auto admissible = [&](double zm, double zp) {
        if (!(zm < zp)) return false;
        return leveraged ? (zp < barrier) : (zm > 0.0);
    };
    auto resid = [&](double zm, double zp) -> Vec2 {
        PastingResiduals r = pasting_residuals(zm, zp, p, pref, opts.quad_rel_tol);
        return {r.value_matching, r.slope_matching};
    };

    std::vector<std::pair<Vec2, std::string>> starts;
    if (opts.initializer) {
        auto [im, ip] = *opts.initializer;
        if (!admissible(im, ip))
            throw DomainError("supplied initializer is not an admissible band");
        starts.push_back({{im, ip}, "user initializer"});
    } else {
        auto [zm0, zp0] = zeta_boundaries_expansion(p, pref);
        // The expansion is trustworthy only while its terms are properly
        // ordered; deep in leverage (tiny gamma) the eps^(2/3) shift dominates
        // the eps^(1/3) width and the initializer is meaningless.
        double center = pistar / (1.0 - pistar);
        bool ordered = std::fabs(0.5 * (zm0 + zp0) - center) < std::fabs(0.5 * (zp0 - zm0));
        if (ordered) {
            if (admissible(zm0, zp0)) {
                starts.push_back({{zm0, zp0}, ""});
            } else {
                // Shrink the asymptotic offsets toward the regime interior.
                double lo = zm0, hi = zp0;
                for (int k = 0; k < 60 && !admissible(lo, hi); ++k) {
                    lo = 0.5 * (lo + center);
                    hi = 0.5 * (hi + center);
                }
                if (admissible(lo, hi))
                    starts.push_back({{lo, hi},
                                      "asymptotic initializer shrunk toward the regime interior"});
            }
        }
        if (leveraged) {
            try {
                SolveReport rn = solve_risk_neutral(p, opts);
                starts.push_back({{rn.band.zeta_minus, rn.band.zeta_plus},
                                  "initialized from the risk-neutral band"});
            } catch (const std::exception&) {
                // keep whatever initializers we already have
            }
        }
    }
    // An empty candidate list falls through to the gamma-continuation path.

    NewtonOutcome best;
    auto finish = [&](const NewtonOutcome& nw, const std::string& note) {
        SolveReport rep;
        rep.band = Band::from_zetas(nw.x[0], nw.x[1], p);
        rep.band.regime = leveraged ? RegimeTag::Leveraged : RegimeTag::LongOnly;
        rep.lambda = reward_rate(nw.x[0], p, pref);
        rep.residual_norm = nw.residual;
        rep.iterations = nw.iterations;
        rep.method = SolveMethod::RiskAverse;
        rep.gradient.emplace(nw.x[0], p, pref, opts.quad_rel_tol);
        rep.warning = note;
        return rep;
    };
    for (const auto& [x0, note] : starts) {
        NewtonOutcome nw = damped_newton(resid, admissible, x0, opts);
        if (nw.converged) return finish(nw, note);
        if (nw.residual < best.residual) best = nw;
    }

    // Continuation through the shadow of the degenerate point: approach the
    // requested gamma from the well-conditioned side, reusing each solved
    // band as the next initializer.
    if (opts.continuation && !opts.initializer) {
        double g_star = p.mu / (p.sigma * p.sigma);
        double t = pref.gamma / g_star;
        double t0 = leveraged ? std::min(0.5, t) : std::max(2.0, t);
        const int stages = 10;
        SolveOptions stage_opts = opts;
        stage_opts.continuation = false;
        try {
            std::pair<double, double> prev;
            for (int k = 0; k <= stages; ++k) {
                double tk = t0 * std::pow(t / t0, static_cast<double>(k) / stages);
                Preference pk(tk * g_star);
                stage_opts.initializer = k == 0 ? std::nullopt : std::optional(prev);
                SolveReport stage = solve_risk_averse(p, pk, stage_opts);
                prev = {stage.band.zeta_minus, stage.band.zeta_plus};
                if (k == stages) {
                    stage.warning = "reached by continuation in gamma";
                    return stage;
                }
            }
        } catch (const std::exception&) {
            // fall through to the solver error below
        }
    }
    throw SolverError("risk-averse Newton did not converge", best.x[0], best.x[1],
                      best.residual, best.iterations);
}

SolveReport solve_band(const MarketParams& p, const Preference& pref,
                       const SolveOptions& opts) {
    return pref.risk_neutral() ? solve_risk_neutral(p, opts)
                               : solve_risk_averse(p, pref, opts);
}

MultiplierResult multiplier(const MarketParams& p, const SolveOptions& opts) {
    SolveReport rep = solve_risk_neutral(p, opts);
    RiskNeutralExpansion ex = risk_neutral_expansion(p);
    double k = band_ratio_constant();
    MultiplierResult out;
    out.exact = rep.band.pi_minus;
    out.approx = ex.pi_minus;
    out.approx_leading = ex.pi_minus_leading;
    out.leading_constant = (1.0 - k) * std::sqrt(k);
    return out;
}

} // namespace levlim
