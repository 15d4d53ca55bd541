#pragma once

#include <optional>
#include <utility>

#include "levlim/model.hpp"

namespace levlim {

/// No-trade band: buy at the lower edge, sell at the upper edge, in both
/// ratio and weight coordinates.
struct Band {
    double zeta_minus = 0.0;
    double zeta_plus = 0.0;
    double pi_minus = 1.0;
    double pi_plus = 1.0;
    RegimeTag regime = RegimeTag::Degenerate;

    /// Build from ratio coordinates, inferring the regime and checking the
    /// admissibility and liquidation constraints.
    static Band from_zetas(double zm, double zp, const MarketParams& p);

    /// Full-investment point pi- = pi+ = 1 (no trading ever happens).
    static Band degenerate();

    bool is_degenerate() const { return regime == RegimeTag::Degenerate; }
    double width_pi() const { return pi_plus - pi_minus; }
};

/// Candidate value-function gradient W on [zeta_minus, +) for fixed lower
/// boundary, via the integral representation
///   W(z) = 2/(sigma z)^2 * Int_{zm}^{z} (h(y)-h(zm)) (|y|/|z|)^(a-2) dy
/// with a = 2 mu/sigma^2, and its slope recovered from the first-order ODE
///   (sigma^2 z^2/2) W' + mu z W = h(z) - h(zm).
struct GradientValue {
    double w;
    double w_prime;
};

class CandidateGradient {
public:
    CandidateGradient(double zeta_minus, const MarketParams& p, const Preference& pref,
                      double rel_tol = 1e-10);

    /// Value and slope at zeta (same admissible side as zeta_minus).
    GradientValue operator()(double zeta) const;

    double zeta_minus() const { return zeta_minus_; }

private:
    double zeta_minus_;
    MarketParams params_;
    Preference pref_;
    double rel_tol_;
    double exponent_;
};

/// One-shot evaluation of (W, W') at zeta from the lower boundary zeta_minus.
GradientValue eval_gradient(double zeta_minus, double zeta, const MarketParams& p,
                            const Preference& pref, double rel_tol = 1e-10);

/// Smooth-pasting residuals of the candidate at (zm, zp):
///   value_matching = W(zm, zp) - G(zp)
///   slope_matching = 2(h(zp)-h(zm))/(sigma zp)^2 - (a/zp) W - G'(zp)
/// The second expression equals W'(zp) - G'(zp) through the ODE identity.
struct PastingResiduals {
    double value_matching;
    double slope_matching;
};

PastingResiduals pasting_residuals(double zeta_minus, double zeta_plus,
                                   const MarketParams& p, const Preference& pref,
                                   double rel_tol = 1e-10);

/// Risk-neutral residuals in rescaled coordinates u = (-1-zeta)/delta,
/// delta = sqrt(eps); requires 0 < u_plus < u_minus.  f2 equals delta times
/// the slope-matching residual.
struct ScaledResiduals {
    double f1;
    double f2;
};

ScaledResiduals rescaled_residuals(double u_minus, double u_plus, double delta,
                                   const MarketParams& p, double rel_tol = 1e-10);

enum class SolveMethod { RiskAverse, RiskNeutral };

struct SolveReport {
    Band band;
    double lambda = 0.0;         // optimal excess objective rate = h(zeta_minus)
    double residual_norm = 0.0;  // inf-norm of the pasting residuals at the solution
    int iterations = 0;
    SolveMethod method = SolveMethod::RiskAverse;
    std::optional<CandidateGradient> gradient;  // empty only for degenerate bands
    std::string warning;

    GradientValue eval_w(double zeta) const { return (*gradient)(zeta); }
};

struct SolveOptions {
    double newton_tol = 1e-11;
    int max_iterations = 100;
    int max_halvings = 8;
    double quad_rel_tol = 1e-10;
    bool force = false;          // lift the eps <= 0.1 validity guard
    // Walk gamma in from a well-conditioned anchor when the direct
    // initializers fail near the degenerate point.
    bool continuation = true;
    // Replaces the built-in initializer chain when set (ratio coordinates).
    std::optional<std::pair<double, double>> initializer;
};

/// Solve the gamma > 0 smooth-pasting system by damped Newton from the
/// asymptotic initializer (risk-neutral fallback deep in leverage).
/// gamma = mu/sigma^2 returns the degenerate full-investment band.
SolveReport solve_risk_averse(const MarketParams& p, const Preference& pref,
                              const SolveOptions& opts = {});

/// Solve the gamma = 0 system in rescaled coordinates from the closed-form
/// leading boundaries.
SolveReport solve_risk_neutral(const MarketParams& p, const SolveOptions& opts = {});

/// Dispatch on pref.gamma.
SolveReport solve_band(const MarketParams& p, const Preference& pref,
                       const SolveOptions& opts = {});

/// Unique root of (3/2)x + log(1-x) on (0,1), about 0.5828.  The limiting
/// buy/sell boundary ratio is 1 - root.
double band_ratio_constant();

/// Leading closed-form boundary scales: the rescaled band converges to
/// (lower, upper) = (k^(-1/2)/(1-k), k^(-1/2)) * sigma/sqrt(mu) as eps -> 0.
std::pair<double, double> leading_scaled_boundaries(const MarketParams& p);

/// Leverage multiplier: maximum factor by which the asset's return scales.
struct MultiplierResult {
    double exact;             // pi_minus from the risk-neutral solve
    double approx;            // (1-k)sqrt(k) sqrt(mu/sigma^2) eps^(-1/2) + 1
    double approx_leading;    // same without the +1 term
    double leading_constant;  // (1-k)sqrt(k), about 0.3185
};

MultiplierResult multiplier(const MarketParams& p, const SolveOptions& opts = {});

} // namespace levlim
