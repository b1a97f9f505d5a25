#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "common.hpp"
#include "mmk/quote_engine.hpp"
#include "mmk/rng.hpp"
#include "mmk/verify.hpp"

using namespace mmk;

TEST_CASE("argmax_grid agrees with the closed-form maximizer") {
    const MarketEnv env = test::baseline_env();

    SUBCASE("symmetric case sits at 1/k") {
        const double found = argmax_grid(env, 3000.0, 3000.0, 0.0, 2.0, 1e-4);
        CHECK(std::abs(found - 1.0) <= 1e-4);
    }
    SUBCASE("shifted case") {
        MarketEnv env2 = env;
        env2.k = 2.0;
        const double found = argmax_grid(env2, 3000.3, 3000.0, -0.8, 1.2, 1e-4);
        CHECK(std::abs(found - 0.2) <= 1e-4);
    }
    SUBCASE("random parameter sweep stays within one grid step") {
        Rng rng(55);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            MarketEnv draw = env;
            draw.A = 100.0 + 1900.0 * rng.uniform();
            draw.k = 0.4 + 2.6 * rng.uniform();
            draw.z = rng.uniform();
            const double s = 100.0 * rng.uniform();
            const double theta1 = s + (rng.uniform() - 0.5);
            const double closed = 1.0 / draw.k - s + theta1;
            const double found = argmax_grid(draw, s, theta1, closed - 0.7, closed + 0.9, 1e-4);
            worst = std::max(worst, std::abs(found - closed));
        }
        CHECK(worst <= 1e-4);
    }
    SUBCASE("bid side reduces to the ask side with swapped arguments") {
        // f_bid(delta; s, theta1) = A e^{-k(z+delta)} (delta - s + theta1)
        // is f_ask with s and theta1 exchanged, so the same grid search
        // validates the closed form 1/k + s - theta1.
        Rng rng(56);
        for (int i = 0; i < 20; ++i) {
            const double s = 100.0 * rng.uniform();
            const double theta1 = s + (rng.uniform() - 0.5);
            const double closed = 1.0 / env.k + s - theta1;
            const double found = argmax_grid(env, theta1, s, closed - 0.6, closed + 0.8, 1e-4);
            CHECK(std::abs(found - closed) <= 1e-4);
        }
    }
    SUBCASE("boundary maximizer is inconclusive") {
        CHECK_THROWS_AS(argmax_grid(env, 3000.0, 3000.0, 2.0, 3.0, 1e-3), std::domain_error);
    }
}

TEST_CASE("feynman_kac_mc terminal price target") {
    const MarketEnv env = test::baseline_env();
    const PriceModel mart = test::baseline_martingale();
    const McEstimate m =
        feynman_kac_mc(env, mart, FkTarget::Theta1Zero, 0.0, 3000.0, 1.0, 2000, 10, 1000);
    CHECK(std::abs(m.estimate - 3000.0) <= 3.0 * m.std_error);

    const PriceModel ou = test::baseline_ou();
    const McEstimate o =
        feynman_kac_mc(env, ou, FkTarget::Theta1Zero, 0.0, 3000.0, 1.0, 2000, 11, 1000);
    CHECK(std::abs(o.estimate - 3000.8564632376765) <= 3.0 * o.std_error);
}

TEST_CASE("feynman_kac_mc sinh target vanishes for the martingale") {
    const MarketEnv env = test::baseline_env();
    const McEstimate m = feynman_kac_mc(env, test::baseline_martingale(), FkTarget::Theta11,
                                        0.0, 3000.0, 1.0, 500, 12, 500);
    CHECK(m.estimate == 0.0);
    CHECK(m.std_error == 0.0);
}

TEST_CASE("feynman_kac_mc u_mm agrees with the quadrature") {
    const MarketEnv env = test::baseline_env();
    const PriceModel ou = test::baseline_ou();
    const McEstimate mc =
        feynman_kac_mc(env, ou, FkTarget::Umm, 0.0, 3000.0, 1.0, 4000, 13, 2000);
    const double quad = value_function_zero(env, ou, 0.0, 3000.0, 0, 0.0, 1.0).u_mm;
    CHECK(std::abs(mc.estimate - quad) <= 3.0 * mc.std_error);
}

TEST_CASE("verification ODE at epsilon 0 reproduces the flat closed form") {
    MarketEnv env = test::baseline_env();
    env.epsilon = 0.0;
    const OdeGrid grid = solve_verification_ode(env, 3000.0, 12, 800, 1.0);
    const double gain = (2.0 * env.A / (std::exp(1.0) * env.k)) * std::exp(-env.k * env.z);
    for (int q = -4; q <= 4; ++q) {
        const double increment = grid.at(0, q) - grid.at(grid.n_time, q);
        CHECK(increment == doctest::Approx(gain).epsilon(1e-8));
    }
}

TEST_CASE("verification ODE terminal layer matches the boundary condition") {
    const MarketEnv env = test::baseline_env();
    const OdeGrid grid = solve_verification_ode(env, 3000.0, 6, 400, 1.0);
    for (int q = -6; q <= 6; ++q) {
        const double expected =
            3000.0 * q - env.epsilon * env.eta * env.z * static_cast<double>(q) * q;
        CHECK(grid.at(grid.n_time, q) == expected);
    }
}

TEST_CASE("verification ODE is insensitive to time refinement") {
    const MarketEnv env = test::baseline_env();
    const OdeGrid coarse = solve_verification_ode(env, 3000.0, 15, 1000, 1.0);
    const OdeGrid fine = solve_verification_ode(env, 3000.0, 15, 2000, 1.0);
    for (int q = -5; q <= 5; ++q) {
        const double rel = std::abs(coarse.at(0, q) - fine.at(0, q)) /
                           std::max(1.0, std::abs(fine.at(0, q)));
        CHECK(rel <= 1e-8);
    }
}

TEST_CASE("expansion order check") {
    const MarketEnv env = test::baseline_env();

    SUBCASE("halving epsilon shrinks the error like epsilon squared") {
        const double eps_list[] = {0.002, 0.001};
        const auto errs = expansion_order_check(env, 3000.0, eps_list, 30, 2000, 1.0);
        REQUIRE(errs.size() == 2);
        const double ratio = errs[0].second / errs[1].second;
        CHECK(ratio >= 3.0);
        CHECK(ratio <= 5.5);
    }
    SUBCASE("the expansion is exact at epsilon 0") {
        const double eps_list[] = {0.001, 0.0};
        const auto errs = expansion_order_check(env, 3000.0, eps_list, 30, 2000, 1.0);
        CHECK(errs[1].second <= 1e-6);
    }
    SUBCASE("a single entry is rejected") {
        const double eps_list[] = {0.001};
        CHECK_THROWS_AS(expansion_order_check(env, 3000.0, eps_list, 10, 100, 1.0),
                        std::domain_error);
    }
    SUBCASE("non-decreasing lists are rejected") {
        const double eps_list[] = {0.001, 0.002};
        CHECK_THROWS_AS(expansion_order_check(env, 3000.0, eps_list, 10, 100, 1.0),
                        std::domain_error);
    }
}

TEST_CASE("quick verification suite passes end to end") {
    VerifyOptions options;
    options.n_mc = 2000;
    options.n_grid = 2000;
    options.ode_n_time = 1000;
    const auto results = run_verification_suite(test::baseline_env(), test::baseline_ou(),
                                                3000.0, 1.0, options);
    REQUIRE_FALSE(results.empty());
    for (const auto& check : results) {
        INFO(check.name, ": computed=", check.computed, " reference=", check.reference,
             " tol=", check.tolerance);
        CHECK(check.pass);
    }
}
