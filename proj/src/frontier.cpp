#include "levlim/frontier.hpp"

#include <algorithm>
#include <cmath>

namespace levlim {

namespace {

FrontierPoint degenerate_point(const MarketParams& p, double gamma) {
    FrontierPoint pt;
    pt.gamma = gamma;
    pt.band = Band::degenerate();
    pt.m_hat_excess = p.mu;
    pt.s_hat = p.sigma;
    pt.esr = p.r + p.mu - 0.5 * gamma * p.sigma * p.sigma;
    pt.atc = 0.0;
    pt.m_multiple = 1.0;
    pt.s_multiple = 1.0;
    pt.ok = true;
    return pt;
}

FrontierPoint solved_point(const MarketParams& p, double gamma, const SolveOptions& opts) {
    FrontierPoint pt;
    pt.gamma = gamma;
    try {
        Preference pref(gamma);
        SolveReport rep = solve_band(p, pref, opts);
        ErgodicStats stats = long_run_stats(rep.band, p, pref);
        pt.band = rep.band;
        pt.m_hat_excess = stats.m_hat - p.r;
        pt.s_hat = stats.s_hat;
        pt.esr = stats.esr;
        pt.atc = stats.atc;
        pt.m_multiple = pt.m_hat_excess / p.mu;
        pt.s_multiple = pt.s_hat / p.sigma;
        pt.ok = true;
    } catch (const std::exception& e) {
        pt.error = e.what();
    }
    return pt;
}

} // namespace

std::vector<FrontierPoint> sweep(const MarketParams& p, const std::vector<double>& gammas,
                                 const SolveOptions& opts) {
    std::vector<FrontierPoint> out;
    out.reserve(gammas.size() + 1);
    double g_star = p.mu / (p.sigma * p.sigma);
    for (double g : gammas) {
        if (std::fabs(g - g_star) < 1e-6)
            out.push_back(degenerate_point(p, g));
        else
            out.push_back(solved_point(p, g, opts));
    }
    out.push_back(solved_point(p, 0.0, opts));
    return out;
}

std::vector<double> default_gamma_grid(const MarketParams& p, int points_per_decade) {
    double g_hi = 10.0 * p.mu / (p.sigma * p.sigma);
    double g_lo = 1e-5;
    int decades = static_cast<int>(std::ceil(std::log10(g_hi / g_lo)));
    int n = std::max(2, decades * points_per_decade);
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n) + 1);
    double ratio = std::pow(g_lo / g_hi, 1.0 / n);
    double g = g_hi;
    for (int i = 0; i <= n; ++i, g *= ratio) out.push_back(g);
    return out;
}

std::vector<MultiplierCell> multiplier_table(double sharpe, const std::vector<double>& sigmas,
                                             const std::vector<double>& epsilons, double r,
                                             const SolveOptions& opts) {
    std::vector<MultiplierCell> out;
    out.reserve(sigmas.size() * epsilons.size());
    for (double sigma : sigmas) {
        for (double eps : epsilons) {
            MultiplierCell cell;
            cell.sigma = sigma;
            cell.epsilon = eps;
            try {
                MarketParams p(sharpe * sigma, sigma, r, eps);
                MultiplierResult m = multiplier(p, opts);
                cell.exact = m.exact;
                cell.approx = m.approx_leading;
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            out.push_back(cell);
        }
    }
    return out;
}

ConvergenceResult convergence_check(const MarketParams& p, const std::vector<double>& gammas,
                                    const SolveOptions& opts) {
    if (!(p.mu > p.sigma * p.sigma))
        throw DomainError("convergence_check requires mu > sigma^2");
    ConvergenceResult out;
    out.rows.reserve(gammas.size());
    for (double g : gammas) {
        Preference pref(g);
        SolveReport rep = solve_band(p, pref, opts);
        ErgodicStats stats = long_run_stats(rep.band, p, pref);
        out.rows.push_back({g, rep.band.zeta_minus, rep.band.zeta_plus, stats.esr});
    }
    SolveReport rn = solve_risk_neutral(p, opts);
    ErgodicStats stats = long_run_stats(rn.band, p, Preference(0.0));
    out.limit = {0.0, rn.band.zeta_minus, rn.band.zeta_plus, stats.esr};
    return out;
}

} // namespace levlim
