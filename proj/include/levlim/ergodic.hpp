#pragma once

#include <utility>

#include "levlim/free_boundary.hpp"
#include "levlim/model.hpp"

namespace levlim {

/// Stationary density of the reflected risky/safe ratio on [zeta_minus,
/// zeta_plus]: nu(z) = |z|^(a-2) / c with a = 2 mu/sigma^2 and
/// c = sgn(zeta_minus) (|zeta_plus|^(a-1) - |zeta_minus|^(a-1)) / (a-1),
/// switching to the logarithmic normalizer when a is within 1e-8 of 1.
class StationaryDensity {
public:
    StationaryDensity(const Band& band, const MarketParams& p);

    double operator()(double zeta) const;

    /// Exact integral of the density over [z1, z2] (closed form).
    double mass(double z1, double z2) const;

    double normalizer() const { return c_; }
    double exponent() const { return a_; }

private:
    double zeta_minus_, zeta_plus_;
    double a_;
    double c_;
    bool log_form_;
};

StationaryDensity stationary_density(const Band& band, const MarketParams& p);

/// Long-run rate of wealth lost to the spread for an arbitrary admissible
/// band (not just the optimal one):
///   ATC = sigma^2 (a-1)/2 * G(zeta_plus) zeta_plus / (1 - (zm/zp)^(a-1)).
double average_trading_cost(const Band& band, const MarketParams& p);

/// Occupation averages (E[pi], E[pi^2]) under the stationary density, by
/// adaptive quadrature in log-ratio coordinates.  Valid for any admissible
/// band.
std::pair<double, double> occupancy_moments(const Band& band, const MarketParams& p);

struct ErgodicStats {
    double m_hat;          // long-run mean return, per year
    double s_hat;          // long-run volatility, per year
    double atc;            // average trading cost, per year
    double esr;            // equivalent safe rate, per year
    double normalizer_c;   // density normalizer
};

/// Closed-form long-run statistics for a band solving the smooth-pasting
/// system (lambda = h(zeta_minus) is the optimal rate there).  The variance
/// comes from the (1-gamma)-extraction; within 1e-8 of gamma = 1 it falls
/// back to direct quadrature of the second occupation moment.
ErgodicStats long_run_stats(const Band& band, const MarketParams& p, const Preference& pref);

/// Mean-variance objective rate r + E[mu pi - gamma sigma^2 pi^2 / 2] - ATC
/// for an arbitrary admissible band, by quadrature.  Agrees with
/// long_run_stats().esr on optimal bands.
double band_objective(const Band& band, const MarketParams& p, const Preference& pref);

} // namespace levlim
