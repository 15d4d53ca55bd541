#pragma once

#include <string>
#include <vector>

#include "levlim/ergodic.hpp"
#include "levlim/free_boundary.hpp"

namespace levlim {

/// One point of the trading-cost efficient frontier.  The multiples are the
/// frontier axes: excess return in units of mu and volatility in units of
/// sigma.
struct FrontierPoint {
    double gamma = 0.0;
    Band band;
    double m_hat_excess = 0.0;
    double s_hat = 0.0;
    double esr = 0.0;
    double atc = 0.0;
    double m_multiple = 0.0;
    double s_multiple = 0.0;
    bool ok = false;
    std::string error;
};

/// Solve and evaluate one frontier point per gamma (sorted descending), then
/// append the gamma = 0 point from the risk-neutral solve.  Individual solve
/// failures are recorded and the sweep continues.  Gammas within 1e-6 of
/// mu/sigma^2 produce the degenerate full-investment point (1, 1).
std::vector<FrontierPoint> sweep(const MarketParams& p, const std::vector<double>& gammas,
                                 const SolveOptions& opts = {});

/// Geometric gamma grid from 10*mu/sigma^2 down to 1e-5 (descending); the
/// risk-neutral endpoint is appended by sweep() itself.
std::vector<double> default_gamma_grid(const MarketParams& p, int points_per_decade = 8);

struct MultiplierCell {
    double sigma = 0.0;
    double epsilon = 0.0;
    double exact = 0.0;   // pi_minus from the risk-neutral solve
    double approx = 0.0;  // leading closed form (1-k)sqrt(k) sqrt(mu/sigma^2) / sqrt(eps)
    bool ok = false;
    std::string error;
};

/// Leverage multipliers over a (sigma, eps) grid at fixed Sharpe ratio
/// mu/sigma.  The approx column is the leading power law, the convention
/// that reproduces the reference approximations (the +1 variant is available
/// from multiplier()).
std::vector<MultiplierCell> multiplier_table(double sharpe, const std::vector<double>& sigmas,
                                             const std::vector<double>& epsilons, double r = 0.0,
                                             const SolveOptions& opts = {});

struct ConvergenceRow {
    double gamma;
    double zeta_minus;
    double zeta_plus;
    double esr;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;  // one per positive gamma, descending
    ConvergenceRow limit;              // gamma = 0 solution
};

/// Track the band and objective along gamma decreasing to 0; requires
/// mu > sigma^2 so the whole family stays leveraged.
ConvergenceResult convergence_check(const MarketParams& p, const std::vector<double>& gammas,
                                    const SolveOptions& opts = {});

} // namespace levlim
