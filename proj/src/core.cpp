#include "mmk/core.hpp"

#include <cmath>

namespace mmk {

ControlSet ControlSet::from_half_spreads(double delta_plus, double delta_minus, double s) {
    ControlSet c;
    c.delta_plus = delta_plus;
    c.delta_minus = delta_minus;
    c.psi = delta_plus + delta_minus;
    c.r = s + 0.5 * (delta_plus - delta_minus);
    return c;
}

ValidationReport validate_env(const MarketEnv& env) {
    ValidationReport report;
    auto require = [&](bool cond, const char* msg) {
        if (!cond) report.violations.emplace_back(msg);
    };
    require(std::isfinite(env.A) && env.A > 0.0, "A must be > 0");
    require(std::isfinite(env.k) && env.k > 0.0, "k must be > 0");
    require(std::isfinite(env.z) && env.z >= 0.0, "z must be >= 0");
    require(std::isfinite(env.sigma) && env.sigma > 0.0, "sigma must be > 0");
    require(std::isfinite(env.alpha), "alpha must be finite");
    require(std::isfinite(env.epsilon) && env.epsilon >= 0.0, "epsilon must be >= 0");
    require(std::isfinite(env.eta) && env.eta >= 0.0, "eta must be >= 0");
    require(std::isfinite(env.nu) && env.nu >= 0.0, "nu must be >= 0");
    return report;
}

}  // namespace mmk
