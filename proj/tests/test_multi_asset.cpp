#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "common.hpp"
#include "mmk/multi_asset.hpp"
#include "mmk/rng.hpp"

using namespace mmk;

namespace {

// Two-asset book with terminal-penalty correlation rho.
MultiEnv two_asset_env(double rho, double eta = 1.0, double nu = 0.0, double epsilon = 1.0) {
    MultiEnv menv;
    menv.M = 2;
    menv.A = {1000.0, 1000.0};
    menv.k = {1.0, 1.0};
    menv.z = {0.5, 0.5};
    menv.alpha = {0.0, 0.0};
    menv.Lambda = Matrix::from_rows({{0.25, 0.0}, {0.0, 0.25}});
    menv.Omega = Matrix::from_rows({{1.0, rho}, {rho, 1.0}});
    menv.epsilon = epsilon;
    menv.eta = eta;
    menv.nu = nu;
    return menv;
}

MultiEnv single_asset_wrap(const MarketEnv& env) {
    MultiEnv menv;
    menv.M = 1;
    menv.A = {env.A};
    menv.k = {env.k};
    menv.z = {env.z};
    menv.alpha = {env.alpha};
    menv.Lambda = Matrix::from_rows({{env.sigma * env.sigma}});
    menv.Omega = Matrix::from_rows({{env.z}});
    menv.epsilon = env.epsilon;
    menv.eta = env.eta;
    menv.nu = env.nu;
    return menv;
}

}  // namespace

TEST_CASE("penalty_matrix") {
    SUBCASE("terminal-only penalty reproduces Omega") {
        const MultiEnv menv = two_asset_env(0.5);
        const PenaltyMatrix pi = penalty_matrix(menv, 0.0, 1.0);
        CHECK(pi.pi(0, 0) == 1.0);
        CHECK(pi.pi(0, 1) == 0.5);
        CHECK(pi.pi(1, 0) == 0.5);
        CHECK(pi.pi(1, 1) == 1.0);
    }
    SUBCASE("all weights off gives the zero matrix") {
        MultiEnv menv = two_asset_env(0.5, 0.0, 0.0);
        const PenaltyMatrix pi = penalty_matrix(menv, 0.0, 1.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(pi.pi(i, j) == 0.0);
    }
    SUBCASE("symmetric inputs give a symmetric penalty matrix") {
        MultiEnv menv = two_asset_env(0.35, 1.2, 0.8);
        menv.Lambda = Matrix::from_rows({{0.25, 0.1}, {0.1, 0.3}});
        const PenaltyMatrix pi = penalty_matrix(menv, 0.2, 1.0);
        CHECK(pi.pi(0, 1) == pi.pi(1, 0));
    }
    SUBCASE("M = 1 equals the scalar unitary penalty") {
        const MarketEnv env = test::baseline_env();
        const MultiEnv menv = single_asset_wrap(env);
        const PenaltyMatrix pi = penalty_matrix(menv, 0.3, 1.0);
        CHECK(pi.pi(0, 0) == unitary_penalty(env, 0.3, 1.0));
    }
}

TEST_CASE("vector_quotes martingale closed form") {
    MultiEnv menv = two_asset_env(0.5, 1.0, 0.0, 0.001);
    const std::vector<PriceModel> models = {PriceModel::martingale(0.5),
                                            PriceModel::martingale(0.5)};
    const std::vector<double> s = {3000.0, 50.0};
    const std::vector<int> q = {2, 0};
    const VectorControls c = vector_quotes(menv, models, 0.0, s, q, 1.0);
    // psi_i = 2/k_i + 2 eps pi_ii, r = s - 2 eps pi q
    CHECK(c.psi[0] == doctest::Approx(2.0 + 2.0 * 0.001).epsilon(1e-14));
    CHECK(c.psi[1] == doctest::Approx(2.0 + 2.0 * 0.001).epsilon(1e-14));
    CHECK(c.r[0] - s[0] == doctest::Approx(-0.004).epsilon(1e-11));
    CHECK(c.r[1] - s[1] == doctest::Approx(-0.002).epsilon(1e-11));
}

TEST_CASE("vector_quotes M=1 is bit-compatible with the single-asset path") {
    const MarketEnv env = test::baseline_env();
    const MultiEnv menv = single_asset_wrap(env);
    const PriceModel ou = test::baseline_ou();
    Rng rng(17);
    for (int i = 0; i < 50; ++i) {
        MarketState st;
        st.t = 0.95 * rng.uniform();
        st.s = 2950.0 + 110.0 * rng.uniform();
        st.q = static_cast<int>(rng.uniform() * 120) - 60;
        const ControlSet scalar = quotes_with_costs(env, ou, st, 1.0);
        const VectorControls vec =
            vector_quotes(menv, {ou}, st.t, {st.s}, {st.q}, 1.0);
        CHECK(vec.delta_plus[0] == scalar.delta_plus);
        CHECK(vec.delta_minus[0] == scalar.delta_minus);
        CHECK(vec.psi[0] == scalar.psi);
        CHECK(vec.r[0] == scalar.r);
    }
}

TEST_CASE("vector_quotes spreads carry no cross terms") {
    const std::vector<PriceModel> models = {PriceModel::martingale(0.5),
                                            PriceModel::martingale(0.5)};
    const std::vector<double> s = {3000.0, 51.0};
    const std::vector<int> q = {3, -2};
    MultiEnv a = two_asset_env(0.1, 1.0, 0.0, 0.001);
    MultiEnv b = two_asset_env(0.9, 1.0, 0.0, 0.001);
    const VectorControls ca = vector_quotes(a, models, 0.0, s, q, 1.0);
    const VectorControls cb = vector_quotes(b, models, 0.0, s, q, 1.0);
    CHECK(std::abs(ca.psi[0] - cb.psi[0]) <= 1e-14 * ca.psi[0]);
    CHECK(std::abs(ca.psi[1] - cb.psi[1]) <= 1e-14 * ca.psi[1]);
    CHECK(ca.r[0] != cb.r[0]);  // the centre does feel the correlation
}

TEST_CASE("vector_quotes validates dimensions") {
    const MultiEnv menv = two_asset_env(0.5);
    const std::vector<PriceModel> models = {PriceModel::martingale(0.5)};
    CHECK_THROWS_AS(vector_quotes(menv, models, 0.0, {3000.0}, {0}, 1.0), std::domain_error);
}

TEST_CASE("iso_risk reproduces the correlated book example") {
    const MultiEnv menv = two_asset_env(0.5);
    CHECK(iso_risk(menv, {2, 0}, 0.0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(iso_risk(menv, {1, 1}, 0.0, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(iso_risk(menv, {1, -1}, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(iso_risk(menv, {0, 0}, 0.0, 1.0) == 0.0);

    // rho > 1/4: (2,-1) carries less risk than (2,0) despite more shares
    const MultiEnv menv3 = two_asset_env(0.3);
    CHECK(iso_risk(menv3, {2, -1}, 0.0, 1.0) ==
          doctest::Approx(5.0 - 4.0 * 0.3).epsilon(1e-14));
    CHECK(iso_risk(menv3, {2, -1}, 0.0, 1.0) < iso_risk(menv3, {2, 0}, 0.0, 1.0));
}

TEST_CASE("iso_risk is a positive-definite quadratic form") {
    const MultiEnv menv = two_asset_env(0.55, 1.0, 1.0, 1.0);
    Rng rng(23);
    for (int i = 0; i < 40; ++i) {
        const std::vector<int> q = {static_cast<int>(rng.uniform() * 9) - 4,
                                    static_cast<int>(rng.uniform() * 9) - 4};
        const std::vector<int> w = {static_cast<int>(rng.uniform() * 9) - 4,
                                    static_cast<int>(rng.uniform() * 9) - 4};
        const double risk_q = iso_risk(menv, q, 0.0, 1.0);
        if (q[0] != 0 || q[1] != 0) CHECK(risk_q > 0.0);
        const std::vector<int> q2 = {2 * q[0], 2 * q[1]};
        CHECK(iso_risk(menv, q2, 0.0, 1.0) == doctest::Approx(4.0 * risk_q).epsilon(1e-12));
        // triangle inequality of the induced norm
        const std::vector<int> sum = {q[0] + w[0], q[1] + w[1]};
        const double lhs = std::sqrt(iso_risk(menv, sum, 0.0, 1.0));
        const double rhs =
            std::sqrt(risk_q) + std::sqrt(iso_risk(menv, w, 0.0, 1.0));
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("rank_inventory_configs") {
    SUBCASE("the diversified book wins under positive correlation") {
        const MultiEnv menv = two_asset_env(0.5);
        const auto ranked =
            rank_inventory_configs(menv, {{2, 0}, {1, 1}, {1, -1}}, 0.0, 1.0);
        REQUIRE(ranked.size() == 3);
        CHECK(ranked[0].q == std::vector<int>{1, -1});
        CHECK(ranked[0].risk == doctest::Approx(1.0));
        CHECK(ranked[1].q == std::vector<int>{1, 1});
        CHECK(ranked[1].risk == doctest::Approx(3.0));
        CHECK(ranked[2].q == std::vector<int>{2, 0});
        CHECK(ranked[2].risk == doctest::Approx(4.0));
    }
    SUBCASE("decoupled assets tie and break lexicographically") {
        const MultiEnv menv = two_asset_env(0.0);
        const auto ranked = rank_inventory_configs(menv, {{1, 1}, {1, -1}}, 0.0, 1.0);
        CHECK(ranked[0].q == std::vector<int>{1, -1});
        CHECK(ranked[1].q == std::vector<int>{1, 1});
        CHECK(ranked[0].risk == ranked[1].risk);
    }
    SUBCASE("a flat book always ranks first") {
        const MultiEnv menv = two_asset_env(0.5);
        const auto ranked =
            rank_inventory_configs(menv, {{2, 0}, {0, 0}, {1, -1}}, 0.0, 1.0);
        CHECK(ranked[0].q == std::vector<int>{0, 0});
        CHECK(ranked[0].risk == 0.0);
    }
    SUBCASE("singleton and empty lists") {
        const MultiEnv menv = two_asset_env(0.5);
        const auto one = rank_inventory_configs(menv, {{3, 1}}, 0.0, 1.0);
        CHECK(one.size() == 1);
        CHECK_THROWS_AS(rank_inventory_configs(menv, {}, 0.0, 1.0), std::domain_error);
    }
}

TEST_CASE("correlated_step") {
    const std::vector<PriceModel> models = {test::baseline_ou(),
                                            PriceModel::martingale(0.5)};

    SUBCASE("diagonal covariance reduces to componentwise steps") {
        MultiEnv menv = two_asset_env(0.5);
        const std::vector<double> s = {3000.0, 50.0};
        const std::vector<double> g = {0.7, -1.3};
        const auto next = correlated_step(menv, models, s, 0.001, g);
        CHECK(next[0] == step(models[0], s[0], 0.001, g[0]));
        CHECK(next[1] == step(models[1], s[1], 0.001, g[1]));
    }

    SUBCASE("zero draws leave only the drift") {
        MultiEnv menv = two_asset_env(0.5);
        menv.Lambda = Matrix::from_rows({{0.25, 0.125}, {0.125, 0.25}});
        const auto next = correlated_step(menv, models, {3000.0, 50.0}, 0.001, {0.0, 0.0});
        CHECK(next[0] == doctest::Approx(3000.0009).epsilon(1e-15));
        CHECK(next[1] == 50.0);
    }

    SUBCASE("non-positive-definite covariance is rejected") {
        MultiEnv menv = two_asset_env(0.5);
        menv.Lambda = Matrix::from_rows({{0.25, 0.3}, {0.3, 0.25}});
        const std::vector<double> s = {3000.0, 50.0};
        const std::vector<double> g = {0.0, 0.0};
        CHECK_THROWS_AS(correlated_step(menv, models, s, 0.001, g), std::domain_error);
    }

    SUBCASE("sampled increment covariance matches Lambda") {
        MultiEnv menv = two_asset_env(0.5);
        menv.Lambda = Matrix::from_rows({{0.25, 0.125}, {0.125, 0.25}});
        const std::vector<PriceModel> pure = {PriceModel::martingale(0.5),
                                              PriceModel::martingale(0.5)};
        const Matrix chol = cholesky_lower(menv.Lambda);
        const int n = 100000;
        const double dt = 0.001;
        Rng rng(301);
        double c00 = 0.0, c01 = 0.0, c11 = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::vector<double> g = {rng.normal(), rng.normal()};
            const auto next = correlated_step(chol, pure, {0.0, 0.0}, dt, g);
            c00 += next[0] * next[0];
            c01 += next[0] * next[1];
            c11 += next[1] * next[1];
        }
        c00 /= n * dt;
        c01 /= n * dt;
        c11 /= n * dt;
        // SE of a Gaussian covariance estimate: sqrt((Sii Sjj + Sij^2)/n)/dt
        auto se = [&](double sii, double sjj, double sij) {
            return std::sqrt((sii * sjj + sij * sij) / n);
        };
        CHECK(std::abs(c00 - 0.25) <= 3.0 * se(0.25, 0.25, 0.25));
        CHECK(std::abs(c11 - 0.25) <= 3.0 * se(0.25, 0.25, 0.25));
        CHECK(std::abs(c01 - 0.125) <= 3.0 * se(0.25, 0.25, 0.125));
    }
}

TEST_CASE("validate_multi_env catches structural problems") {
    MultiEnv menv = two_asset_env(0.5);
    CHECK(validate_multi_env(menv, {PriceModel::martingale(0.5), PriceModel::martingale(0.5)})
              .ok());
    menv.Omega = Matrix::from_rows({{1.0, 0.2}, {0.3, 1.0}});
    CHECK_FALSE(validate_multi_env(menv, {}).ok());
}
