#pragma once

#include <cmath>
#include <string>

#include "levlim/errors.hpp"

namespace levlim {

/// Market with one safe asset (rate r) and one risky asset (annualized excess
/// return mu, volatility sigma) traded at a constant relative bid-ask spread
/// epsilon: buy at S, sell at (1-epsilon)S. All rates are annualized decimals.
struct MarketParams {
    double mu;
    double sigma;
    double r;
    double epsilon;

    MarketParams(double mu_, double sigma_, double r_, double epsilon_)
        : mu(mu_), sigma(sigma_), r(r_), epsilon(epsilon_) {
        if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must be in (0,1)");
        if (!(mu >= 0.0)) throw DomainError("mu must be >= 0");
        if (!(r >= 0.0)) throw DomainError("r must be >= 0");
    }
};

/// Mean-variance preference; gamma = 0 selects the risk-neutral path.
struct Preference {
    double gamma;

    explicit Preference(double gamma_) : gamma(gamma_) {
        if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
    }
    bool risk_neutral() const { return gamma == 0.0; }
};

enum class RegimeTag { LongOnly, Leveraged, Degenerate };

inline const char* to_string(RegimeTag t) {
    switch (t) {
        case RegimeTag::LongOnly: return "long_only";
        case RegimeTag::Leveraged: return "leveraged";
        default: return "degenerate";
    }
}

// ---------------------------------------------------------------------------
// Coordinate transforms between the risky weight pi and the risky/safe
// ratio zeta = pi/(1-pi).  Poles: zeta = -1 and pi = 1.
// ---------------------------------------------------------------------------

inline double pi_of_zeta(double zeta) {
    if (zeta == -1.0) throw DomainError("pi_of_zeta: pole at zeta = -1");
    return zeta / (1.0 + zeta);
}

inline double zeta_of_pi(double pi) {
    if (pi == 1.0) throw DomainError("zeta_of_pi: pole at pi = 1");
    return pi / (1.0 - pi);
}

/// Barrier -1/(1-epsilon); the leveraged regime lives strictly below it.
inline double leveraged_barrier(const MarketParams& p) {
    return -1.0 / (1.0 - p.epsilon);
}

/// Admissible ratios are zeta > 0 (long-only) or zeta < -1/(1-epsilon)
/// (leveraged), matching the solvency restriction on the weight pi.
inline bool admissible_zeta(double zeta, const MarketParams& p) {
    return zeta > 0.0 || zeta < leveraged_barrier(p);
}

// ---------------------------------------------------------------------------
// Scalar building blocks of the control problem, in ratio coordinates.
// ---------------------------------------------------------------------------

/// Instantaneous mean-variance reward mu*pi - (gamma sigma^2/2) pi^2 with
/// pi = zeta/(1+zeta).
inline double reward_rate(double zeta, const MarketParams& p, const Preference& pref) {
    double pi = pi_of_zeta(zeta);
    return p.mu * pi - 0.5 * pref.gamma * p.sigma * p.sigma * pi * pi;
}

/// d/dzeta of reward_rate: (mu - gamma sigma^2 pi) / (1+zeta)^2.
inline double reward_rate_slope(double zeta, const MarketParams& p, const Preference& pref) {
    if (zeta == -1.0) throw DomainError("reward_rate_slope: pole at zeta = -1");
    double pi = zeta / (1.0 + zeta);
    double d = 1.0 + zeta;
    return (p.mu - pref.gamma * p.sigma * p.sigma * pi) / (d * d);
}

/// Marginal cost of selling per unit ratio change,
/// epsilon / ((1+zeta)(1+(1-epsilon)zeta)).  Strictly positive on the
/// admissible domain.
inline double marginal_sale_cost(double zeta, const MarketParams& p) {
    double d1 = 1.0 + zeta;
    double d2 = 1.0 + (1.0 - p.epsilon) * zeta;
    if (d1 == 0.0 || d2 == 0.0)
        throw DomainError("marginal_sale_cost: pole at zeta = -1 or -1/(1-epsilon)");
    return p.epsilon / (d1 * d2);
}

/// d/dzeta of marginal_sale_cost, via the partial-fraction split
/// G = 1/(1+z) - (1-eps)/(1+(1-eps)z), whose derivative is
/// ((1-eps)/(1+(1-eps)z))^2 - 1/(1+z)^2.
inline double marginal_sale_cost_slope(double zeta, const MarketParams& p) {
    double d1 = 1.0 + zeta;
    double d2 = 1.0 + (1.0 - p.epsilon) * zeta;
    if (d1 == 0.0 || d2 == 0.0)
        throw DomainError("marginal_sale_cost_slope: pole at zeta = -1 or -1/(1-epsilon)");
    double a = (1.0 - p.epsilon) / d2;
    double b = 1.0 / d1;
    return a * a - b * b;
}

/// reward_rate(zeta) - reward_rate(zeta_ref) in the cancellation-free
/// factored form (zeta - ref)/((1+zeta)(1+ref)) * (mu - gamma sigma^2
/// (pi + pi_ref)/2); exact algebraically, accurate when the points are close.
inline double reward_rate_gap(double zeta_ref, double zeta, const MarketParams& p,
                              const Preference& pref) {
    double pi_ref = pi_of_zeta(zeta_ref);
    double pi = pi_of_zeta(zeta);
    return (zeta - zeta_ref) / ((1.0 + zeta) * (1.0 + zeta_ref)) *
           (p.mu - 0.5 * pref.gamma * p.sigma * p.sigma * (pi + pi_ref));
}

/// Frictionless optimal weight mu/(gamma sigma^2); requires gamma > 0.
inline double merton_fraction(const MarketParams& p, const Preference& pref) {
    if (!(pref.gamma > 0.0))
        throw DomainError("merton_fraction: undefined for gamma = 0");
    return p.mu / (pref.gamma * p.sigma * p.sigma);
}

/// Exponent 2*mu/sigma^2 governing all |zeta|-power integrals.  Equals
/// 2*gamma*merton_fraction for every gamma > 0.
inline double power_exponent(const MarketParams& p) {
    return 2.0 * p.mu / (p.sigma * p.sigma);
}

} // namespace levlim
