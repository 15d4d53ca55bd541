#include <doctest.h>

#include <cmath>

#include "levlim/free_boundary.hpp"
#include "levlim/hjb.hpp"

using namespace levlim;

namespace {
const MarketParams kFig(0.08, 0.16, 0.0, 0.01);
}

TEST_CASE("solved candidates satisfy the variational inequality") {
    for (double g : {0.0, 1.0, 5.0}) {
        Preference pref(g);
        SolveReport rep = solve_band(kFig, pref);
        HjbReport h = verify_hjb(rep, kFig, pref);
        CHECK(h.pass);
        CHECK(h.min_operator_residual >= -1e-7);
        CHECK(h.min_gradient_slack_lower >= -1e-7);
        CHECK(h.min_gradient_slack_upper >= -1e-7);
        CHECK(h.inside_residual_max <= 1e-7);
        CHECK(h.pasting_value_gap <= 1e-7);
        CHECK(h.pasting_slope_gap <= 1e-7);
        CHECK(h.grid.size() >= 6000);
    }
}

TEST_CASE("five-percent boundary shifts are rejected") {
    for (double g : {0.0, 1.0, 5.0}) {
        Preference pref(g);
        SolveReport rep = solve_band(kFig, pref);
        for (double f : {1.05, 0.95}) {
            bool failed = false;
            try {
                Band bad = Band::from_zetas(rep.band.zeta_minus, rep.band.zeta_plus * f, kFig);
                failed = !verify_hjb_band(bad, kFig, pref).pass;
            } catch (const DomainError&) {
                failed = true;  // the shifted pair is not even a band
            }
            CHECK(failed);
            try {
                Band bad = Band::from_zetas(rep.band.zeta_minus * f, rep.band.zeta_plus, kFig);
                failed = !verify_hjb_band(bad, kFig, pref).pass;
            } catch (const DomainError&) {
                failed = true;
            }
            CHECK(failed);
        }
    }
}

TEST_CASE("violations localize near the shifted boundary") {
    Preference pref(1.0);
    SolveReport rep = solve_band(kFig, pref);
    Band bad = Band::from_zetas(rep.band.zeta_minus, rep.band.zeta_plus * 1.05, kFig);
    HjbReport h = verify_hjb_band(bad, kFig, pref);
    CHECK_FALSE(h.pass);
    bool operator_negative = h.min_operator_residual < -1e-7;
    if (operator_negative)
        CHECK(std::fabs(h.worst_zeta - bad.zeta_plus) < 0.05 * std::fabs(bad.zeta_plus));
    // the kink at the junction shows up as a pasting gap in every case
    CHECK(h.pasting_value_gap + h.pasting_slope_gap > 1e-7);
}

TEST_CASE("preconditions") {
    Preference pref(1.0);
    SolveReport rep = solve_band(kFig, pref);
    SolveReport bad = rep;
    bad.residual_norm = 1.0;
    CHECK_THROWS_AS(verify_hjb(bad, kFig, pref), DomainError);
    SolveReport degen;
    CHECK_THROWS_AS(verify_hjb(degen, kFig, pref), DomainError);
}
