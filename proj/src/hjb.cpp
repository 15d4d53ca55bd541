#include "levlim/hjb.hpp"

#include <cmath>

#include "levlim/quadrature.hpp"

namespace levlim {

namespace {

// Geometric grid of n points from a to b through the map t -> a*(b/a)^t on
// magnitudes; callers pass positive magnitudes.
std::vector<double> geometric(double a, double b, int n) {
    std::vector<double> out(n);
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(la + (lb - la) * i / (n - 1));
    return out;
}

struct SlackTracker {
    double min_slack = std::numeric_limits<double>::infinity();
    double worst_zeta = 0.0;
    void update(double slack, double zeta) {
        if (slack < min_slack) {
            min_slack = slack;
            worst_zeta = zeta;
        }
    }
};

} // namespace

HjbReport verify_hjb_band(const Band& band, const MarketParams& p,
                          const Preference& pref, const HjbGridSpec& spec) {
    if (band.is_degenerate())
        throw DomainError("verify_hjb: degenerate band has no candidate gradient");
    const int n = spec.points_per_region;
    const double lambda = reward_rate(band.zeta_minus, p, pref);
    const bool leveraged = band.regime == RegimeTag::Leveraged;
    const double barrier = leveraged_barrier(p);

    CandidateGradient gradient(band.zeta_minus, p, pref);

    HjbReport rep;
    rep.grid.reserve(3 * n);
    SlackTracker op_below, op_above, slack_lo, slack_hi;
    double inside_resid = 0.0;

    // Below the band: V' = 0, so the operator residual is lambda - h.
    // Leveraged bands extend toward zeta -> -inf (pi -> 1), long-only ones
    // toward zeta -> 0+ (pi -> 0); both grids cover eight decades.
    {
        std::vector<double> scale = geometric(1.0, 1e8, n);
        for (double s : scale) {
            double z = leveraged ? band.zeta_minus * s : band.zeta_minus / s;
            rep.grid.push_back(z);
            op_below.update(lambda - reward_rate(z, p, pref), z);
        }
    }

    // Inside: W by quadrature, W' from the ODE identity; gradient bounds are
    // the substantive checks here.
    {
        for (int i = 0; i < n; ++i) {
            double z = band.zeta_minus +
                       (band.zeta_plus - band.zeta_minus) * i / (n - 1);
            rep.grid.push_back(z);
            GradientValue gv = gradient(z);
            slack_lo.update(gv.w, z);
            slack_hi.update(marginal_sale_cost(z, p) - gv.w, z);
            double op = 0.5 * p.sigma * p.sigma * z * z * gv.w_prime +
                        p.mu * z * gv.w - reward_rate(z, p, pref) + lambda;
            inside_resid = std::max(inside_resid, std::fabs(op));
        }
    }

    // Above: V' = G, all closed form, up to the liquidation bound.
    {
        std::vector<double> zs;
        if (leveraged) {
            double pi_cap = (1.0 - 1e-6) / p.epsilon;
            double z_cap = pi_cap / (1.0 - pi_cap);
            std::vector<double> d = geometric(barrier - band.zeta_plus,
                                              barrier - z_cap, n);
            for (double di : d) zs.push_back(barrier - di);
        } else {
            double z_cap = (1.0 - 1e-6) / 1e-6;
            zs = geometric(band.zeta_plus, z_cap, n);
        }
        for (double z : zs) {
            rep.grid.push_back(z);
            double g = marginal_sale_cost(z, p);
            double gp = marginal_sale_cost_slope(z, p);
            double op = 0.5 * p.sigma * p.sigma * z * z * gp + p.mu * z * g -
                        reward_rate(z, p, pref) + lambda;
            op_above.update(op, z);
        }
    }

    rep.min_operator_residual = std::min(op_below.min_slack, op_above.min_slack);
    rep.min_gradient_slack_lower = slack_lo.min_slack;
    rep.min_gradient_slack_upper = slack_hi.min_slack;
    rep.inside_residual_max = inside_resid;

    // The candidate must glue into a C^2 function at the sell boundary; a
    // shifted band leaves a kink there even when every pointwise inequality
    // holds.
    {
        GradientValue at_plus = gradient(band.zeta_plus);
        rep.pasting_value_gap =
            std::fabs(at_plus.w - marginal_sale_cost(band.zeta_plus, p));
        rep.pasting_slope_gap =
            std::fabs(at_plus.w_prime - marginal_sale_cost_slope(band.zeta_plus, p));
    }

    double worst = rep.min_operator_residual;
    rep.worst_zeta = op_below.min_slack < op_above.min_slack ? op_below.worst_zeta
                                                             : op_above.worst_zeta;
    for (const SlackTracker* t : {&slack_lo, &slack_hi}) {
        if (t->min_slack < worst) {
            worst = t->min_slack;
            rep.worst_zeta = t->worst_zeta;
        }
    }
    rep.pass = rep.min_operator_residual >= -spec.tol &&
               rep.min_gradient_slack_lower >= -spec.tol &&
               rep.min_gradient_slack_upper >= -spec.tol &&
               rep.inside_residual_max <= spec.tol &&
               rep.pasting_value_gap <= spec.tol &&
               rep.pasting_slope_gap <= spec.tol;
    return rep;
}

HjbReport verify_hjb(const SolveReport& report, const MarketParams& p,
                     const Preference& pref, const HjbGridSpec& spec) {
    if (report.band.is_degenerate())
        throw DomainError("verify_hjb: degenerate band");
    if (!(report.residual_norm < 1e-9))
        throw DomainError("verify_hjb requires a converged solve report");
    return verify_hjb_band(report.band, p, pref, spec);
}

} // namespace levlim
