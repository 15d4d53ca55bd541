#pragma once

#include <vector>

#include "levlim/free_boundary.hpp"

namespace levlim {

struct HjbGridSpec {
    int points_per_region = 2000;
    double tol = 1e-7;
};

/// Outcome of the variational-inequality check
///   min( A V - h + lambda,  G - V',  V' ) = 0
/// with V' = 0 below the band, the solved gradient inside, and G above.
struct HjbReport {
    std::vector<double> grid;              // all evaluated ratio points
    double min_operator_residual = 0.0;    // min of A V - h + lambda outside the band
    double min_gradient_slack_lower = 0.0; // min of V' inside
    double min_gradient_slack_upper = 0.0; // min of G - V' inside
    double inside_residual_max = 0.0;      // max |A V - h + lambda| inside
    double pasting_value_gap = 0.0;        // |W - G| at the sell boundary
    double pasting_slope_gap = 0.0;        // |W' - G'| at the sell boundary
    double worst_zeta = 0.0;               // location of the most negative slack
    bool pass = false;
};

/// Verify the solved candidate on three grids: below the band down to the
/// admissible limit, inside it, and above it up to the liquidation bound.
/// Inside, the slope of V' comes from the first-order ODE identity; outside,
/// everything is closed form.  Requires a converged report.
HjbReport verify_hjb(const SolveReport& report, const MarketParams& p,
                     const Preference& pref, const HjbGridSpec& spec = {});

/// Same check for an arbitrary band (used by falsification probes): the
/// candidate gradient is rebuilt from band.zeta_minus.
HjbReport verify_hjb_band(const Band& band, const MarketParams& p,
                          const Preference& pref, const HjbGridSpec& spec = {});

} // namespace levlim
