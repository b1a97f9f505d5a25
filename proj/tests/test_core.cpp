#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "mmk/core.hpp"
#include "mmk/rng.hpp"

using namespace mmk;

TEST_CASE("validate_env accepts the desk parameter block") {
    CHECK(validate_env(test::baseline_env()).ok());
}

TEST_CASE("validate_env flags boundary violations") {
    MarketEnv env = test::baseline_env();
    env.k = 0.0;
    const auto report = validate_env(env);
    REQUIRE_FALSE(report.ok());
    bool mentions_k = false;
    for (const auto& v : report.violations) mentions_k |= v == "k must be > 0";
    CHECK(mentions_k);
}

TEST_CASE("validate_env allows rebates") {
    MarketEnv env = test::baseline_env();
    env.alpha = -0.1;
    CHECK(validate_env(env).ok());
}

TEST_CASE("ControlSet stores the defining identities") {
    const ControlSet c = ControlSet::from_half_spreads(1.25, 0.75, 3000.0);
    CHECK(c.psi == c.delta_plus + c.delta_minus);
    CHECK(c.r == 3000.0 + 0.5 * (c.delta_plus - c.delta_minus));
    CHECK(c.delta_plus == 1.25);
    CHECK(c.delta_minus == 0.75);
}

TEST_CASE("ControlSet symmetric quotes centre on the mid") {
    const ControlSet c = ControlSet::from_half_spreads(0.9, 0.9, 123.456);
    CHECK(c.r == 123.456);
}

TEST_CASE("ControlSet round-trips half spreads through (psi, r)") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double dp = 2.0 * rng.uniform();
        const double dm = 2.0 * rng.uniform();
        const double s = 1.0 + 4000.0 * rng.uniform();
        const ControlSet c = ControlSet::from_half_spreads(dp, dm, s);
        const double dp_back = 0.5 * c.psi + (c.r - s);
        const double dm_back = 0.5 * c.psi - (c.r - s);
        CHECK(std::abs(dp_back - dp) <= 1e-12);
        CHECK(std::abs(dm_back - dm) <= 1e-12);
    }
}
