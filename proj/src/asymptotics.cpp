#include "levlim/asymptotics.hpp"

namespace levlim {

namespace {

void require_expandable(const MarketParams& p, const Preference& pref) {
    if (!(pref.gamma > 0.0))
        throw DomainError("expansion requires gamma > 0");
    double pistar = merton_fraction(p, pref);
    if (pistar == 1.0)
        throw DomainError("expansion undefined at gamma = mu/sigma^2");
}

} // namespace

std::pair<double, double> boundaries_expansion(const MarketParams& p, const Preference& pref) {
    require_expandable(p, pref);
    double g = pref.gamma;
    double ps = merton_fraction(p, pref);
    double e13 = std::cbrt(p.epsilon);
    double e23 = e13 * e13;

    double first = std::cbrt(3.0 / (4.0 * g) * ps * ps * (ps - 1.0) * (ps - 1.0));
    double second = (1.0 - g) * ps / g * std::cbrt(g * ps * (ps - 1.0) / 6.0);
    double lo = ps - first * e13 - second * e23;
    double hi = ps + first * e13 - second * e23;
    return {lo, hi};
}

std::pair<double, double> zeta_boundaries_expansion(const MarketParams& p, const Preference& pref) {
    require_expandable(p, pref);
    double g = pref.gamma;
    double ps = merton_fraction(p, pref);
    double e13 = std::cbrt(p.epsilon);
    double e23 = e13 * e13;

    double center = ps / (1.0 - ps);
    double first = std::cbrt(3.0 / (4.0 * g)) * cbrt_sq(ps / ((ps - 1.0) * (ps - 1.0)));
    double second = (5.0 - 2.0 * g) * ps / (2.0 * g * (ps - 1.0) * (ps - 1.0)) *
                    std::cbrt(g * ps * (ps - 1.0) / 6.0);
    double lo = center - first * e13 - second * e23;
    double hi = center + first * e13 - second * e23;
    return {lo, hi};
}

AsymptoticStats stats_expansion(const MarketParams& p, const Preference& pref) {
    require_expandable(p, pref);
    double g = pref.gamma;
    double s2 = p.sigma * p.sigma;
    double ps = merton_fraction(p, pref);
    double e23 = std::cbrt(p.epsilon * p.epsilon);

    double core = std::cbrt(g * ps * (ps - 1.0) / 6.0);

    AsymptoticStats out;
    auto [lo, hi] = boundaries_expansion(p, pref);
    out.pi_minus = lo;
    out.pi_plus = hi;
    // The second-order coefficient follows from the exact identity
    // m = r + g s^2/2 + (esr - r) applied to the s and esr truncations; the
    // 1/g variant circulating for this line is consistent only at g = 1 and
    // fails the measured order of accuracy elsewhere.
    out.m_hat = p.r + p.mu * p.mu / (g * s2)
                - 0.5 * s2 * ps * (5.0 * ps - 3.0) * core * e23;
    out.s_hat = p.mu / (g * p.sigma)
                - p.sigma * (7.0 * ps - 3.0) / (4.0 * g) * core * e23;
    out.atc = 3.0 * s2 / g * cbrt_fourth(g * ps * (ps - 1.0) / 6.0) * e23;
    out.esr = p.r + 0.5 * g * s2 * ps * ps
              - 0.5 * g * s2 * cbrt_sq(3.0 / (4.0 * g) * ps * ps * (ps - 1.0) * (ps - 1.0)) * e23;
    return out;
}

RiskNeutralExpansion risk_neutral_expansion(const MarketParams& p) {
    // kappa is the root of (3/2)x + log(1-x) on (0,1); defined in the band
    // solver but recomputed here so the expansion module stays standalone.
    double k = 0.5;
    for (int i = 0; i < 64; ++i) {
        double f = 1.5 * k + std::log1p(-k);
        double fp = 1.5 - 1.0 / (1.0 - k);
        double step = f / fp;
        k -= step;
        if (std::fabs(step) < 1e-16) break;
    }
    double scale = std::sqrt(p.mu / (p.sigma * p.sigma) / p.epsilon);
    RiskNeutralExpansion out;
    out.pi_minus_leading = (1.0 - k) * std::sqrt(k) * scale;
    out.pi_plus_leading = std::sqrt(k) * scale;
    out.pi_minus = out.pi_minus_leading + 1.0;
    out.pi_plus = out.pi_plus_leading + 1.0;
    return out;
}

} // namespace levlim
