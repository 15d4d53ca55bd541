#pragma once

#include <utility>

#include "levlim/model.hpp"

namespace levlim {

// Small-spread expansions of the optimal policy and its long-run statistics.
// Root conventions: odd roots of negative reals are negative reals
// (std::cbrt), and fractional even powers go through the square first,
// a^(2/3) = (a^2)^(1/3).  Every expression is evaluated exactly as printed,
// term by term, so it can be audited side by side with the closed forms.

/// (a^2)^(1/3) >= 0.
inline double cbrt_sq(double a) { return std::cbrt(a * a); }

/// (a^4)^(1/3) >= 0.
inline double cbrt_fourth(double a) { return std::cbrt(a * a * a * a); }

struct AsymptoticStats {
    double pi_minus = 0.0;
    double pi_plus = 0.0;
    double m_hat = 0.0;   // long-run mean, per year
    double s_hat = 0.0;   // long-run volatility, per year
    double atc = 0.0;     // average trading cost, per year
    double esr = 0.0;     // equivalent safe rate, per year
    const char* order = "eps^(2/3)";
};

/// Trading boundaries in weight coordinates through O(eps^(2/3)):
///   pi_pm = pi* +- (3/(4g) pi*^2 (pi*-1)^2)^(1/3) eps^(1/3)
///           - ((1-g) pi*/g) (g pi* (pi*-1)/6)^(1/3) eps^(2/3).
/// Requires gamma > 0, gamma != mu/sigma^2.
std::pair<double, double> boundaries_expansion(const MarketParams& p, const Preference& pref);

/// Trading boundaries in ratio coordinates through O(eps^(2/3)); this is the
/// solver initializer.  Same preconditions as boundaries_expansion.
std::pair<double, double> zeta_boundaries_expansion(const MarketParams& p, const Preference& pref);

/// All four long-run statistics through O(eps^(2/3)).
AsymptoticStats stats_expansion(const MarketParams& p, const Preference& pref);

struct RiskNeutralExpansion {
    double pi_minus;          // (1-k) sqrt(k) sqrt(mu/sigma^2) eps^(-1/2) + 1
    double pi_plus;           //       sqrt(k) sqrt(mu/sigma^2) eps^(-1/2) + 1
    double pi_minus_leading;  // same without the +1 term
    double pi_plus_leading;
};

/// Risk-neutral boundary expansions; both the printed form (with the +1
/// term) and the leading power law are reported.
RiskNeutralExpansion risk_neutral_expansion(const MarketParams& p);

} // namespace levlim
