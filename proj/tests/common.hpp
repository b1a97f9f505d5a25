#pragma once

#include "mmk/core.hpp"
#include "mmk/price_model.hpp"

namespace mmk::test {

// Desk-scale parameter block used throughout the tests.
inline MarketEnv baseline_env() {
    MarketEnv env;
    env.A = 1000.0;
    env.k = 1.0;
    env.z = 0.5;
    env.sigma = 0.5;
    env.alpha = 0.05;
    env.epsilon = 0.001;
    env.eta = 1.0;
    env.nu = 1.0;
    return env;
}

inline PriceModel baseline_ou() { return PriceModel::ornstein_uhlenbeck(0.5, 0.1, 3009.0); }

inline PriceModel baseline_martingale() { return PriceModel::martingale(0.5); }

inline constexpr double kBaselineS0 = 3000.0;
inline constexpr double kBaselineT = 1.0;

}  // namespace mmk::test
