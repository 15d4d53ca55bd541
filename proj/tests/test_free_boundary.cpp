#include <doctest.h>

#include <cmath>

#include "levlim/asymptotics.hpp"
#include "levlim/free_boundary.hpp"
#include "levlim/quadrature.hpp"

using namespace levlim;

namespace {
const MarketParams kFig(0.08, 0.16, 0.0, 0.01);
}

TEST_CASE("band construction enforces the admissible domain") {
    CHECK_THROWS_AS(Band::from_zetas(1.0, 0.5, kFig), DomainError);   // order
    CHECK_THROWS_AS(Band::from_zetas(-0.5, 0.5, kFig), DomainError);  // straddles
    Band lev = Band::from_zetas(-1.7, -1.4, kFig);
    CHECK(lev.regime == RegimeTag::Leveraged);
    CHECK(lev.pi_plus < 1.0 / kFig.epsilon);
    Band lo = Band::from_zetas(1.0, 2.0, kFig);
    CHECK(lo.regime == RegimeTag::LongOnly);
    CHECK(lo.pi_minus == doctest::Approx(0.5));
}

TEST_CASE("kappa root") {
    double k = band_ratio_constant();
    CHECK(k > 0.58);
    CHECK(k < 0.59);
    CHECK(k >= 0.5827);
    CHECK(k <= 0.5829);
    CHECK(std::fabs(1.5 * k + std::log1p(-k)) < 1e-14);
    CHECK(k > 1.0 / 3.0);  // the root sits strictly above the stationary point
}

TEST_CASE("leading scaled boundaries solve the limiting system") {
    MarketParams p(0.1, 0.2, 0.0, 1e-4);
    auto [am, ap] = leading_scaled_boundaries(p);
    CHECK(am > ap);
    CHECK(ap > 0.0);
    // closed-form relation between the two scales
    CHECK(am == doctest::Approx(p.mu * ap * ap * ap / (p.mu * ap * ap - p.sigma * p.sigma))
                    .epsilon(1e-12));
    // the delta = 0 residuals vanish at the leading boundaries
    ScaledResiduals r = rescaled_residuals(am, ap, 0.0, p);
    CHECK(std::fabs(r.f1) < 1e-10);
    CHECK(std::fabs(r.f2) < 1e-10);
}

TEST_CASE("candidate gradient basics") {
    Preference pref(1.0);
    SolveReport rep = solve_risk_averse(kFig, pref);
    const Band& b = rep.band;

    GradientValue at_lo = rep.eval_w(b.zeta_minus);
    CHECK(at_lo.w == 0.0);
    CHECK(at_lo.w_prime == 0.0);

    // value matching at the sell boundary, freshly evaluated
    GradientValue at_hi = eval_gradient(b.zeta_minus, b.zeta_plus, kFig, pref);
    CHECK(std::fabs(at_hi.w - marginal_sale_cost(b.zeta_plus, kFig)) < 1e-9);

    // positive on the interior
    for (int i = 1; i <= 50; ++i) {
        double z = b.zeta_minus + (b.zeta_plus - b.zeta_minus) * i / 50.0;
        CHECK(rep.eval_w(z).w > 0.0);
    }

    CHECK_THROWS_AS(eval_gradient(b.zeta_minus, 1.0, kFig, pref), DomainError);
}

TEST_CASE("gradient bounds 0 <= W <= G on a fine grid") {
    for (double g : {1.0, 5.0}) {
        Preference pref(g);
        SolveReport rep = solve_risk_averse(kFig, pref);
        for (int i = 0; i <= 1000; ++i) {
            double z = rep.band.zeta_minus +
                       (rep.band.zeta_plus - rep.band.zeta_minus) * i / 1000.0;
            double w = rep.eval_w(z).w;
            CHECK(w >= -1e-12);
            CHECK(w <= marginal_sale_cost(z, kFig) + 1e-12);
        }
    }
}

TEST_CASE("pasting residuals at and around the solution") {
    for (double g : {1.0, 5.0}) {
        Preference pref(g);
        SolveReport rep = solve_risk_averse(kFig, pref);
        PastingResiduals at = pasting_residuals(rep.band.zeta_minus, rep.band.zeta_plus,
                                                kFig, pref);
        CHECK(std::fabs(at.value_matching) < 1e-10);
        CHECK(std::fabs(at.slope_matching) < 1e-10);

        // moving the sell boundary out makes the slope residual negative,
        // moving it in makes it positive (nondegenerate pasting)
        PastingResiduals up = pasting_residuals(rep.band.zeta_minus,
                                                rep.band.zeta_plus + 1e-3, kFig, pref);
        PastingResiduals dn = pasting_residuals(rep.band.zeta_minus,
                                                rep.band.zeta_plus - 1e-3, kFig, pref);
        CHECK(up.slope_matching < 0.0);
        CHECK(dn.slope_matching > 0.0);
    }
}

TEST_CASE("residuals at the asymptotic initializer shrink with eps") {
    Preference pref(1.0);
    double prev = 0.0;
    for (double e : {1e-2, 1e-3, 1e-4}) {
        MarketParams p(0.08, 0.16, 0.0, e);
        auto [zm, zp] = zeta_boundaries_expansion(p, pref);
        PastingResiduals r = pasting_residuals(zm, zp, p, pref);
        double norm = std::max(std::fabs(r.value_matching), std::fabs(r.slope_matching));
        CHECK(norm > 0.0);
        if (prev > 0.0) CHECK(norm < prev);
        prev = norm;
    }
}

TEST_CASE("solved bands have the reference shapes") {
    // long-only: the band brackets the frictionless weight
    {
        Preference pref(5.0);
        SolveReport rep = solve_risk_averse(kFig, pref);
        double pistar = merton_fraction(kFig, pref);
        CHECK(rep.band.regime == RegimeTag::LongOnly);
        CHECK(rep.band.pi_minus < pistar);
        CHECK(pistar < rep.band.pi_plus);
    }
    // moderate leverage still brackets the frictionless weight
    {
        Preference pref(0.5);
        SolveReport rep = solve_risk_averse(kFig, pref);
        double pistar = merton_fraction(kFig, pref);
        CHECK(rep.band.regime == RegimeTag::Leveraged);
        CHECK(rep.band.pi_minus < pistar);
        CHECK(pistar < rep.band.pi_plus);
    }
    // deep leverage: both boundaries sit below the frictionless weight
    {
        Preference pref(0.1);
        SolveReport rep = solve_risk_averse(kFig, pref);
        double pistar = merton_fraction(kFig, pref);
        CHECK(rep.band.regime == RegimeTag::Leveraged);
        CHECK(rep.band.pi_plus < pistar);
    }
    // log utility: boundaries match pi* +- (3/(4g) pi*^2(pi*-1)^2)^(1/3) eps^(1/3)
    // up to the O(eps) remainder
    {
        Preference pref(1.0);
        MarketParams p(0.08, 0.16, 0.0, 1e-4);
        SolveReport rep = solve_risk_averse(p, pref);
        double pistar = merton_fraction(p, pref);
        double lead = std::cbrt(0.75 * pistar * pistar * (pistar - 1.0) * (pistar - 1.0));
        double width = lead * std::cbrt(p.epsilon);
        CHECK(std::fabs(rep.band.pi_minus - (pistar - width)) < 30.0 * p.epsilon);
        CHECK(std::fabs(rep.band.pi_plus - (pistar + width)) < 30.0 * p.epsilon);
    }
}

TEST_CASE("band width collapses toward the degenerate point") {
    double gstar = kFig.mu / (kFig.sigma * kFig.sigma);
    MarketParams p(0.08, 0.16, 0.0, 1e-5);
    double prev = 1.0;
    for (double f : {1.3, 1.2, 1.1}) {
        SolveReport rep = solve_risk_averse(p, Preference(gstar * f));
        CHECK(rep.band.width_pi() < prev);
        prev = rep.band.width_pi();
    }
    SolveReport deg = solve_risk_averse(p, Preference(gstar));
    CHECK(deg.band.is_degenerate());
    CHECK(deg.band.pi_minus == 1.0);
    CHECK(deg.band.pi_plus == 1.0);
}

TEST_CASE("solver metadata and validity guard") {
    Preference pref(1.0);
    SolveReport rep = solve_risk_averse(kFig, pref);
    CHECK(rep.lambda == reward_rate(rep.band.zeta_minus, kFig, pref));
    CHECK(rep.residual_norm < 1e-11);
    CHECK(rep.method == SolveMethod::RiskAverse);

    MarketParams wide(0.08, 0.16, 0.0, 0.2);
    CHECK_THROWS_AS(solve_risk_averse(wide, Preference(5.0)), DomainError);
    SolveOptions force;
    force.force = true;
    SolveReport forced = solve_risk_averse(wide, Preference(5.0), force);
    CHECK(forced.residual_norm < 1e-11);
}

TEST_CASE("local uniqueness: perturbed initializers reach the same band") {
    for (double g : {1.0, 5.0}) {
        Preference pref(g);
        SolveReport base = solve_risk_averse(kFig, pref);
        auto [zm0, zp0] = zeta_boundaries_expansion(kFig, pref);
        double center = merton_fraction(kFig, pref) /
                        (1.0 - merton_fraction(kFig, pref));
        for (double f : {0.8, 1.2}) {
            SolveOptions opts;
            opts.initializer = {{center + f * (zm0 - center), center + f * (zp0 - center)}};
            SolveReport rep = solve_risk_averse(kFig, pref, opts);
            CHECK(std::fabs(rep.band.zeta_minus - base.band.zeta_minus) < 1e-8);
            CHECK(std::fabs(rep.band.zeta_plus - base.band.zeta_plus) < 1e-8);
        }
    }
}

TEST_CASE("risk-neutral solve hits the reference multipliers") {
    // two spot checks from the nine-cell grid; the acceptance suite runs all
    {
        MarketParams p(0.05, 0.10, 0.0, 1e-3);
        SolveReport rep = solve_risk_neutral(p);
        CHECK(rep.band.pi_minus == doctest::Approx(23.15).epsilon(0.005));
        CHECK(rep.method == SolveMethod::RiskNeutral);
    }
    {
        MarketParams p(0.25, 0.50, 0.0, 1e-2);
        SolveReport rep = solve_risk_neutral(p);
        CHECK(rep.band.pi_minus == doctest::Approx(3.66).epsilon(0.005));
    }
}

TEST_CASE("risk-neutral band ratio approaches 1 - kappa") {
    MarketParams p(0.1, 0.2, 0.0, 1e-5);
    SolveReport rep = solve_risk_neutral(p);
    double k = band_ratio_constant();
    CHECK(rep.band.pi_minus / rep.band.pi_plus == doctest::Approx(1.0 - k).epsilon(0.01));
}

TEST_CASE("risk-averse bands converge to the risk-neutral band") {
    SolveReport rn = solve_risk_neutral(kFig);
    SolveReport ra = solve_risk_averse(kFig, Preference(1e-4));
    CHECK(std::fabs(ra.band.zeta_minus - rn.band.zeta_minus) < 1.0 * 1e-4);
    CHECK(std::fabs(ra.band.zeta_plus - rn.band.zeta_plus) < 1.0 * 1e-4);
}

TEST_CASE("multiplier report and scaling law") {
    MarketParams p(0.1, 0.2, 0.0, 1e-3);
    MultiplierResult m = multiplier(p);
    CHECK(m.exact > m.approx_leading);  // reference tables show the same ordering
    CHECK(m.leading_constant == doctest::Approx(0.3185).epsilon(1e-3));
    CHECK(m.approx == m.approx_leading + 1.0);

    MarketParams p100(0.1, 0.2, 0.0, 1e-5);
    double ratio = multiplier(p).exact / multiplier(p100).exact;
    CHECK(ratio == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("quadrature failure carries the achieved tolerance") {
    bool threw = false;
    try {
        // far too oscillatory for the fixed refinement depth
        integrate([](double x) { return std::sin(3e9 * x); }, 0.0, 1.0, 1e-10);
    } catch (const NumericalError& e) {
        threw = true;
        CHECK(e.achieved_tolerance > 0.0);
    }
    CHECK(threw);
}

TEST_CASE("dispatch on gamma") {
    CHECK(solve_band(kFig, Preference(0.0)).method == SolveMethod::RiskNeutral);
    CHECK(solve_band(kFig, Preference(1.0)).method == SolveMethod::RiskAverse);
}
