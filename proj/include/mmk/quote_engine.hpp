#pragma once

#include <functional>
#include <vector>

#include "mmk/core.hpp"
#include "mmk/price_model.hpp"

namespace mmk {

inline constexpr int kDefaultQuadNodes = 32;

// Full keeps the whole first-order correction. Simplified drops the
// time-integral terms (both the sinh integral and the running volatility
// inside the unitary penalty), leaving only the terminal-spread penalty.
enum class ExpansionMode { Full, Simplified };

// First-order penalty ingredients at a given state.
struct PenaltyTerms {
    double pi_tilde = 0.0;       // unitary inventory-risk penalty
    double bias_integral = 0.0;  // expected marginal-profit x penalty integral
};

// Split of the zero-risk value function into buy-and-hold and
// market-making components.
struct ValueDecomposition {
    double u_hold = 0.0;
    double u_mm = 0.0;
};

// Coefficients of the first-order value correction: theta2_q2 multiplies
// q^2, theta1_q1 multiplies q.
struct FirstOrderThetas {
    double theta2_q2 = 0.0;
    double theta1_q1 = 0.0;
};

// Fill intensity A*exp(-k*(z+delta)); extrapolated for delta <= -z.
double intensity(const MarketEnv& env, double delta);

// Unitary inventory-risk penalty eta*z + nu*sigma^2*(T-t).
double unitary_penalty(const MarketEnv& env, double t, double T);

// Deterministic integral over [t, T] of the expected marginal
// market-making profit weighted by the unitary penalty,
//   int (4/e) A exp(-k z) E[sinh(k Delta(xi, S(xi)))] pi(xi) dxi,
// evaluated by Gauss-Legendre with the Gaussian moment identity
// E[sinh(X)] = sinh(mean) exp(var/2). Exactly zero for the martingale.
double bias_integral(const MarketEnv& env, const PriceModel& model, double t, double s,
                     double T, int quad_nodes = kDefaultQuadNodes);

PenaltyTerms penalty_terms(const MarketEnv& env, const PriceModel& model, double t, double s,
                           double T, int quad_nodes = kDefaultQuadNodes);

// Optimal quotes at zero inventory risk: delta+- = 1/k +- Delta,
// psi = 2/k, r = s + Delta.
ControlSet quotes_zero_order(const MarketEnv& env, const PriceModel& model, double t, double s,
                             double T);

// First-order-in-epsilon optimal quotes with inventory penalties.
ControlSet quotes_first_order(const MarketEnv& env, const PriceModel& model,
                              const MarketState& state, double T,
                              ExpansionMode mode = ExpansionMode::Full,
                              int quad_nodes = kDefaultQuadNodes);

// As quotes_first_order, widened by the transaction cost: both half
// spreads gain +alpha and the bias integral carries exp(-k(z+alpha)).
ControlSet quotes_with_costs(const MarketEnv& env, const PriceModel& model,
                             const MarketState& state, double T,
                             ExpansionMode mode = ExpansionMode::Full,
                             int quad_nodes = kDefaultQuadNodes);

// Zero-risk value function split u = u_hold + u_mm.
ValueDecomposition value_function_zero(const MarketEnv& env, const PriceModel& model, double t,
                                       double s, int q, double x, double T,
                                       int quad_nodes = kDefaultQuadNodes);

// First-order value coefficients: theta2_q2 = -pi_tilde,
// theta1_q1 = -bias_integral.
FirstOrderThetas theta_first_order(const MarketEnv& env, const PriceModel& model, double t,
                                   double s, double T, int quad_nodes = kDefaultQuadNodes);

namespace detail {

// Node-staged evaluation of the bias integral: everything except the
// sinh of the current mid-price is precomputed, so repeated evaluation
// along a simulation grid is cheap and bit-identical to bias_integral().
class BiasIntegralEval {
  public:
    // penalty_at(xi) supplies the penalty weight inside the integrand;
    // cost_shift is added to z in the exponential prefactor.
    BiasIntegralEval(const MarketEnv& env, const PriceModel& model, double t, double T,
                     int quad_nodes, double cost_shift,
                     const std::function<double(double)>& penalty_at);

    double operator()(double s) const;

  private:
    std::vector<double> coef_;
    std::vector<double> slope_;
    double mu_ = 0.0;
    bool zero_ = false;
};

// Shared assembly of the optimal quote from its ingredients; both the
// single-asset and the per-asset vector paths funnel through this so the
// two are bit-compatible.
ControlSet assemble_quote(double inv_k, double alpha, double delta_bet, double epsilon,
                          double bias, double q_pi, double pi_diag, double s);

}  // namespace detail

}  // namespace mmk
