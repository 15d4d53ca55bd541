#include <doctest.h>

#include <cmath>

#include "levlim/model.hpp"
#include "levlim/rng.hpp"

using namespace levlim;

namespace {
const MarketParams kBase(0.08, 0.16, 0.0, 0.01);
}

TEST_CASE("parameter validation happens at construction") {
    CHECK_THROWS_AS(MarketParams(0.08, 0.0, 0.0, 0.01), DomainError);
    CHECK_THROWS_AS(MarketParams(0.08, 0.16, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(MarketParams(0.08, 0.16, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(MarketParams(-0.01, 0.16, 0.0, 0.01), DomainError);
    CHECK_THROWS_AS(MarketParams(0.08, 0.16, -0.1, 0.01), DomainError);
    CHECK_THROWS_AS(Preference(-1.0), DomainError);
    CHECK(Preference(0.0).risk_neutral());
}

TEST_CASE("reward rate values") {
    Preference log_util(1.0);
    CHECK(reward_rate(0.0, kBase, log_util) == 0.0);

    // full investment (pi = 1) in the zeta -> inf limit
    CHECK(reward_rate(1e14, kBase, log_util) == doctest::Approx(0.0672).epsilon(1e-9));

    // value at the frictionless optimum equals mu^2/(2 gamma sigma^2)
    double pistar = merton_fraction(kBase, log_util);
    double at_star = reward_rate(zeta_of_pi(pistar), kBase, log_util);
    CHECK(at_star == doctest::Approx(kBase.mu * kBase.mu /
                                     (2.0 * 1.0 * kBase.sigma * kBase.sigma))
                         .epsilon(1e-12));

    // concavity around the optimum
    for (double d : {0.05, 0.2, 0.5}) {
        CHECK(reward_rate(zeta_of_pi(pistar + d), kBase, log_util) < at_star);
        CHECK(reward_rate(zeta_of_pi(pistar - d), kBase, log_util) < at_star);
    }

    CHECK_THROWS_AS(reward_rate(-1.0, kBase, log_util), DomainError);
}

TEST_CASE("reward rate gap matches the direct difference") {
    Preference pref(2.5);
    Xoshiro256pp rng(11, 0);
    for (int i = 0; i < 1000; ++i) {
        double a = 0.1 + 3.0 * rng.uniform();
        double b = 0.1 + 3.0 * rng.uniform();
        double gap = reward_rate_gap(a, b, kBase, pref);
        double direct = reward_rate(b, kBase, pref) - reward_rate(a, kBase, pref);
        CHECK(gap == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("marginal sale cost") {
    CHECK(marginal_sale_cost(0.0, kBase) == kBase.epsilon);
    CHECK(marginal_sale_cost(1.0, kBase) == doctest::Approx(0.01 / (2.0 * 1.99)).epsilon(1e-14));

    // strictly positive on both admissible branches
    Xoshiro256pp rng(12, 0);
    for (int i = 0; i < 1000; ++i) {
        double z_pos = 1e-6 + 50.0 * rng.uniform();
        CHECK(marginal_sale_cost(z_pos, kBase) > 0.0);
        double z_neg = leveraged_barrier(kBase) - 1e-6 - 50.0 * rng.uniform();
        CHECK(marginal_sale_cost(z_neg, kBase) > 0.0);
    }
    CHECK_THROWS_AS(marginal_sale_cost(-1.0, kBase), DomainError);
}

TEST_CASE("weight/ratio transforms invert each other") {
    CHECK(pi_of_zeta(0.0) == 0.0);
    CHECK(zeta_of_pi(0.0) == 0.0);
    CHECK(zeta_of_pi(2.0) == -2.0);
    CHECK(pi_of_zeta(-2.0) == 2.0);
    CHECK_THROWS_AS(pi_of_zeta(-1.0), DomainError);
    CHECK_THROWS_AS(zeta_of_pi(1.0), DomainError);

    Xoshiro256pp rng(13, 0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double pi = 4.0 * rng.uniform() - 2.0;
        if (std::fabs(pi - 1.0) < 1e-3) continue;
        worst = std::max(worst, std::fabs(pi_of_zeta(zeta_of_pi(pi)) - pi));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("merton fraction") {
    CHECK(merton_fraction(kBase, Preference(1.0)) == doctest::Approx(3.125).epsilon(1e-14));
    double gstar = kBase.mu / (kBase.sigma * kBase.sigma);
    CHECK(merton_fraction(kBase, Preference(gstar)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(merton_fraction(kBase, Preference(1e9)) < 1e-8);
    CHECK_THROWS_AS(merton_fraction(kBase, Preference(0.0)), DomainError);
}

TEST_CASE("power exponent identity 2 gamma pi* = 2 mu/sigma^2") {
    for (double g : {0.3, 1.0, 5.0, 42.0}) {
        Preference pref(g);
        CHECK(2.0 * g * merton_fraction(kBase, pref) ==
              doctest::Approx(power_exponent(kBase)).epsilon(1e-15));
    }
}
