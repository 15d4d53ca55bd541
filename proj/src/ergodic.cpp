#include "levlim/ergodic.hpp"

#include <cmath>

#include "levlim/quadrature.hpp"

namespace levlim {

namespace {

constexpr double kLogFormWindow = 1e-8;

void require_band(const Band& band) {
    if (band.is_degenerate())
        throw DomainError("degenerate band has no stationary density");
}

// Integral of |z|^(a-2) dz over the band, written in log coordinates where it
// is positive in both regimes.
double power_normalizer(double zm, double zp, double a, bool* log_form) {
    double x1 = std::log(std::fabs(zm));
    double x2 = std::log(std::fabs(zp));
    double lo = std::min(x1, x2), hi = std::max(x1, x2);
    if (std::fabs(a - 1.0) < kLogFormWindow) {
        if (log_form) *log_form = true;
        return hi - lo;
    }
    if (log_form) *log_form = false;
    return std::exp((a - 1.0) * lo) * std::expm1((a - 1.0) * (hi - lo)) / (a - 1.0);
}

// pi as a function of x = log|zeta|; side = +1 long-only, -1 leveraged.
inline double pi_of_log(double x, double side) {
    return 1.0 / (1.0 + side * std::exp(-x));
}

} // namespace

StationaryDensity::StationaryDensity(const Band& band, const MarketParams& p)
    : zeta_minus_(band.zeta_minus), zeta_plus_(band.zeta_plus),
      a_(power_exponent(p)) {
    require_band(band);
    c_ = power_normalizer(zeta_minus_, zeta_plus_, a_, &log_form_);
}

double StationaryDensity::operator()(double zeta) const {
    if (zeta < zeta_minus_ || zeta > zeta_plus_) return 0.0;
    return std::pow(std::fabs(zeta), a_ - 2.0) / c_;
}

double StationaryDensity::mass(double z1, double z2) const {
    return power_normalizer(z1, z2, a_, nullptr) / c_;
}

StationaryDensity stationary_density(const Band& band, const MarketParams& p) {
    return StationaryDensity(band, p);
}

double average_trading_cost(const Band& band, const MarketParams& p) {
    require_band(band);
    double a = power_exponent(p);
    double zp = band.zeta_plus;
    double rho = band.zeta_minus / zp;  // positive in both regimes
    double g = marginal_sale_cost(zp, p);
    double ratio;
    if (std::fabs(a - 1.0) < kLogFormWindow) {
        ratio = -1.0 / std::log(rho);
    } else {
        ratio = (a - 1.0) / (-std::expm1((a - 1.0) * std::log(rho)));
    }
    return 0.5 * p.sigma * p.sigma * g * zp * ratio;
}

std::pair<double, double> occupancy_moments(const Band& band, const MarketParams& p) {
    require_band(band);
    double a = power_exponent(p);
    double side = band.zeta_minus > 0.0 ? 1.0 : -1.0;
    double x1 = std::log(std::fabs(band.zeta_minus));
    double x2 = std::log(std::fabs(band.zeta_plus));
    double lo = std::min(x1, x2), hi = std::max(x1, x2);

    // Unit-interval parameterization keeps the integrand O(1) regardless of
    // how narrow the band is.
    double span = hi - lo;
    auto x_of = [&](double t) { return lo + span * t; };
    auto weight = [&](double t) { return std::exp((a - 1.0) * (x_of(t) - hi)); };
    double den = integrate([&](double t) { return weight(t); }, 0.0, 1.0, 1e-10);
    double n1 = integrate([&](double t) { return pi_of_log(x_of(t), side) * weight(t); },
                          0.0, 1.0, 1e-10);
    double n2 = integrate([&](double t) {
        double pi = pi_of_log(x_of(t), side);
        return pi * pi * weight(t);
    }, 0.0, 1.0, 1e-10);
    return {n1 / den, n2 / den};
}

ErgodicStats long_run_stats(const Band& band, const MarketParams& p, const Preference& pref) {
    require_band(band);
    double a = power_exponent(p);
    double atc = average_trading_cost(band, p);
    double lam = reward_rate(band.zeta_minus, p, pref);

    ErgodicStats out;
    out.atc = atc;
    out.normalizer_c = power_normalizer(band.zeta_minus, band.zeta_plus, a, nullptr);
    double g = pref.gamma;
    double s2;
    if (std::fabs(1.0 - g) >= kLogFormWindow) {
        // Variance extraction: s^2 (1-g) = 2(h(zm)+ATC) - sigma^2 Delta / c
        // with Delta = |zp|^a/(1+zp) - |zm|^a/(1+zm).  Scaled by
        // exp(-(a-1) x_ref) to keep magnitudes near unity.
        double x_m = std::log(std::fabs(band.zeta_minus));
        double x_p = std::log(std::fabs(band.zeta_plus));
        double x_ref = std::max(x_m, x_p);
        double dp = std::fabs(band.zeta_plus) * std::exp((a - 1.0) * (x_p - x_ref)) /
                    (1.0 + band.zeta_plus);
        double dm = std::fabs(band.zeta_minus) * std::exp((a - 1.0) * (x_m - x_ref)) /
                    (1.0 + band.zeta_minus);
        double c_scaled = out.normalizer_c * std::exp(-(a - 1.0) * x_ref);
        s2 = (2.0 * (lam + atc) - p.sigma * p.sigma * (dp - dm) / c_scaled) / (1.0 - g);
    } else {
        auto [m1, m2] = occupancy_moments(band, p);
        (void)m1;
        s2 = p.sigma * p.sigma * m2;
    }
    out.s_hat = std::sqrt(s2);
    out.m_hat = p.r + 0.5 * g * s2 + lam;
    out.esr = p.r + lam;
    return out;
}

double band_objective(const Band& band, const MarketParams& p, const Preference& pref) {
    auto [m1, m2] = occupancy_moments(band, p);
    return p.r + p.mu * m1 - 0.5 * pref.gamma * p.sigma * p.sigma * m2 -
           average_trading_cost(band, p);
}

} // namespace levlim
