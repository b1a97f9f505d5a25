#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmk/core.hpp"
#include "mmk/price_model.hpp"

namespace mmk {

// Grid-search maximizer of the sell-side jump Hamiltonian
//   f(delta) = A exp(-k(z+delta)) (s + delta - theta1),
// used as an independent check of the closed-form quote. Throws
// std::domain_error when the maximum sits on the grid boundary
// (inconclusive search window).
double argmax_grid(const MarketEnv& env, double s, double theta1, double grid_lo,
                   double grid_hi, double grid_step);

enum class FkTarget {
    Theta1Zero,  // E[S(T)], the centre of the zero-order quotes
    Umm,         // market-making value integral
    Theta11,     // first-order sinh integral (equals -bias_integral)
};

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Monte Carlo evaluation of the defining expectation of the target:
// paths stepped with Euler-Maruyama on an n_grid grid, time integrals by
// trapezoid. Independent of the quadrature implementation it cross-checks.
McEstimate feynman_kac_mc(const MarketEnv& env, const PriceModel& model, FkTarget target,
                          double t, double s, double T, int n_mc, std::uint64_t seed,
                          int n_grid = 10000);

// All three targets from one set of simulated paths.
struct FkJointEstimates {
    McEstimate theta1_zero;
    McEstimate u_mm;
    McEstimate theta1_1;
};
FkJointEstimates feynman_kac_mc_joint(const MarketEnv& env, const PriceModel& model, double t,
                                      double s, double T, int n_mc, std::uint64_t seed,
                                      int n_grid = 10000);

// Backward solution of the truncated nonlinear verification ODE system for
// the martingale constant-parameter case, v_q(t) on q in [-q_cap, q_cap].
// Layer l holds time t_l = l*T/n_time; layer n_time is the terminal
// condition v_q(T) = s*q - epsilon*eta*z*q^2.
struct OdeGrid {
    int q_cap = 0;
    int n_time = 0;
    double T = 0.0;
    double s_frozen = 0.0;
    std::vector<double> values;  // (n_time+1) layers x (2*q_cap+1) entries

    double at(int layer, int q) const {
        return values[static_cast<std::size_t>(layer) * (2 * q_cap + 1) + (q + q_cap)];
    }
};

// RK4 backward integration; inventory truncated at +-q_cap with
// quadratically extrapolated ghost values (exact for value functions that
// are quadratic in q, which covers the expansion being tested). Throws
// std::runtime_error if the solution loses finiteness.
OdeGrid solve_verification_ode(const MarketEnv& env, double s_frozen, int q_cap, int n_time,
                               double T);

// Closed-form v^(0) + eps*v^(1) for the same martingale constant-parameter
// case, evaluated at (t, q).
double first_order_expansion_value(const MarketEnv& env, double s_frozen, double eps, int q,
                                   double t, double T);

// For each epsilon (strictly decreasing, >= 0): max over |q| <= q_cap/3 of
// |ODE solution - closed-form expansion| at t = 0.
std::vector<std::pair<double, double>> expansion_order_check(const MarketEnv& env,
                                                             double s_frozen,
                                                             std::span<const double> eps_list,
                                                             int q_cap, int n_time, double T);

struct CheckResult {
    std::string name;
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    int n_mc = 20000;
    int n_grid = 10000;
    int ode_q_cap = 30;
    int ode_n_time = 2000;
    double tol_scale = 1.0;  // < 1 tightens every tolerance
    std::uint64_t seed = 20240901;
};

// The full cross-check battery: grid argmax vs closed forms, Feynman-Kac
// Monte Carlo vs quadrature, quadrature node-doubling stability and the
// epsilon-expansion order study.
std::vector<CheckResult> run_verification_suite(const MarketEnv& env, const PriceModel& ou_model,
                                                double s0, double T,
                                                const VerifyOptions& options = {});

}  // namespace mmk
