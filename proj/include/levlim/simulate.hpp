#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "levlim/free_boundary.hpp"
#include "levlim/model.hpp"

namespace levlim {

struct SimConfig {
    double dt = 1e-5;              // years per step
    std::int64_t n_steps = 100000; // steps per path
    std::int64_t n_paths = 64;
    std::uint64_t seed = 1;
    std::int64_t burn_in = -1;     // discarded initial steps; -1 means 10%
    int threads = 1;               // worker cap; clamped by LEVLIM_THREADS
};

struct SimEstimate {
    double m_hat = 0.0, m_se = 0.0;   // long-run mean, cross-path SE
    double s_hat = 0.0, s_se = 0.0;   // long-run volatility, cross-path SE
    double atc = 0.0, atc_se = 0.0;   // average trading cost, cross-path SE
    double esr = 0.0, esr_se = 0.0;   // mean-variance objective rate

    std::vector<double> hist;         // 200 occupancy masses, ascending zeta
    std::vector<double> hist_edges;   // 201 zeta bin edges, ascending

    double buy_turnover = 0.0;        // time-average of d(phi_up)/phi
    double sell_turnover = 0.0;       // time-average of d(phi_down)/phi

    double dt = 0.0;
    double years_per_path = 0.0;
    std::uint64_t seed = 0;
    std::string generator;
    bool dt_guard_ok = true;
    std::string warning;
};

inline constexpr int kHistBins = 200;

/// One reflected log-ratio path step with Skorokhod push accounting.  The
/// overshoot at a boundary is folded back inside (symmetrized reflection);
/// the recorded push is the fold amount 2*(overshoot), which is the
/// increment of the Skorokhod decomposition x' = x + dx + push_lo - push_hi.
class ReflectedWalker {
public:
    ReflectedWalker(double x_lo, double x_hi, double x0)
        : x_lo_(x_lo), x_hi_(x_hi), x_(x0) {}

    /// Advance by increment dx; returns pushes through the out-parameters.
    void step(double dx, double& push_lo, double& push_hi) {
        double xn = x_ + dx;
        push_lo = 0.0;
        push_hi = 0.0;
        while (xn > x_hi_ || xn < x_lo_) {
            if (xn > x_hi_) {
                push_hi += 2.0 * (xn - x_hi_);
                xn = 2.0 * x_hi_ - xn;
            } else {
                push_lo += 2.0 * (x_lo_ - xn);
                xn = 2.0 * x_lo_ - xn;
            }
        }
        x_ = xn;
    }

    double state() const { return x_; }

private:
    double x_lo_, x_hi_, x_;
};

/// Monte Carlo estimate of the long-run statistics of a band policy by Euler
/// simulation of the reflected ratio in log coordinates.  Deterministic for
/// fixed (seed, inputs) regardless of the thread count.
SimEstimate simulate_band(const Band& band, const MarketParams& p, const Preference& pref,
                          const SimConfig& config);

struct SweepPoint {
    double width;   // band width in weight units
    double esr;     // Monte Carlo objective rate
    double se;
    Band band;
};

/// Evaluate the Monte Carlo objective over bands of varying width centered
/// (in weight coordinates) at `center`.
std::vector<SweepPoint> policy_sweep(double center, const std::vector<double>& widths,
                                     const MarketParams& p, const Preference& pref,
                                     const SimConfig& config);

/// Recommended cap: dt <= 1e-4 * (band width in log-ratio) / sigma.
double dt_guard(const Band& band, const MarketParams& p);

/// Worker count: config cap, then LEVLIM_THREADS, then hardware.
int resolve_threads(int requested);

} // namespace levlim
