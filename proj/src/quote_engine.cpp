#include "mmk/quote_engine.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mmk/quadrature.hpp"

namespace mmk {

namespace {

void require_ordered(double t, double T, const char* what) {
    if (!(t <= T)) throw std::domain_error(std::string(what) + ": requires t <= T");
}

}  // namespace

double intensity(const MarketEnv& env, double delta) {
    return env.A * std::exp(-env.k * (env.z + delta));
}

double unitary_penalty(const MarketEnv& env, double t, double T) {
    require_ordered(t, T, "unitary_penalty");
    return env.eta * env.z + env.nu * (env.sigma * env.sigma) * (T - t);
}

namespace detail {

BiasIntegralEval::BiasIntegralEval(const MarketEnv& env, const PriceModel& model, double t,
                                   double T, int quad_nodes, double cost_shift,
                                   const std::function<double(double)>& penalty_at) {
    require_ordered(t, T, "bias_integral");
    if (quad_nodes < 2) throw std::domain_error("bias_integral: quad_nodes must be >= 2");
    if (model.kind == PriceKind::Martingale) {
        zero_ = true;  // sinh(k*Delta) vanishes identically
        return;
    }
    mu_ = model.mu;
    const GaussLegendre rule(quad_nodes);
    const double half = 0.5 * (T - t);
    const double mid = 0.5 * (t + T);
    const double prefactor =
        (4.0 / std::numbers::e) * env.A * std::exp(-env.k * (env.z + cost_shift));
    coef_.resize(quad_nodes);
    slope_.resize(quad_nodes);
    for (int i = 0; i < quad_nodes; ++i) {
        const double xi = mid + half * rule.nodes()[i];
        const double w = half * rule.weights()[i];
        // k*Delta(xi, S(xi)) = k*c*(mu - S(xi)) is affine in S(xi), so its
        // law under the transition kernel is Gaussian with
        //   mean = k*c*decay*(mu - s),  var = (k*c)^2 * Var[S(xi)].
        const double c = 1.0 - std::exp(-model.a * (T - xi));
        const double decay = std::exp(-model.a * (xi - t));
        const double var_s = transition_law(model, t, 0.0, xi).var;
        const double kc = env.k * c;
        slope_[i] = kc * decay;
        coef_[i] = w * prefactor * penalty_at(xi) * std::exp(0.5 * (kc * kc) * var_s);
    }
}

double BiasIntegralEval::operator()(double s) const {
    if (zero_) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < coef_.size(); ++i) {
        acc += coef_[i] * std::sinh(slope_[i] * (mu_ - s));
    }
    return acc;
}

ControlSet assemble_quote(double inv_k, double alpha, double delta_bet, double epsilon,
                          double bias, double q_pi, double pi_diag, double s) {
    const double ask = inv_k + alpha + delta_bet + epsilon * (-bias - 2.0 * q_pi + pi_diag);
    const double bid = inv_k + alpha - delta_bet + epsilon * (bias + 2.0 * q_pi + pi_diag);
    return ControlSet::from_half_spreads(ask, bid, s);
}

}  // namespace detail

double bias_integral(const MarketEnv& env, const PriceModel& model, double t, double s, double T,
                     int quad_nodes) {
    const detail::BiasIntegralEval eval(env, model, t, T, quad_nodes, 0.0,
                                        [&](double xi) { return unitary_penalty(env, xi, T); });
    return eval(s);
}

PenaltyTerms penalty_terms(const MarketEnv& env, const PriceModel& model, double t, double s,
                           double T, int quad_nodes) {
    PenaltyTerms terms;
    terms.pi_tilde = unitary_penalty(env, t, T);
    terms.bias_integral = bias_integral(env, model, t, s, T, quad_nodes);
    return terms;
}

ControlSet quotes_zero_order(const MarketEnv& env, const PriceModel& model, double t, double s,
                             double T) {
    require_ordered(t, T, "quotes_zero_order");
    const double delta_bet = directional_bet(model, t, s, T);
    return detail::assemble_quote(1.0 / env.k, 0.0, delta_bet, 0.0, 0.0, 0.0, 0.0, s);
}

namespace {

ControlSet first_order_quotes(const MarketEnv& env, const PriceModel& model,
                              const MarketState& state, double T, ExpansionMode mode,
                              int quad_nodes, double alpha) {
    require_ordered(state.t, T, "quotes_first_order");
    const double delta_bet = directional_bet(model, state.t, state.s, T);
    double pi = 0.0;
    double bias = 0.0;
    if (mode == ExpansionMode::Full) {
        pi = unitary_penalty(env, state.t, T);
        const detail::BiasIntegralEval eval(
            env, model, state.t, T, quad_nodes, alpha,
            [&](double xi) { return unitary_penalty(env, xi, T); });
        bias = eval(state.s);
    } else {
        pi = env.eta * env.z;  // terminal-spread penalty only
    }
    const double q_pi = pi * static_cast<double>(state.q);
    return detail::assemble_quote(1.0 / env.k, alpha, delta_bet, env.epsilon, bias, q_pi, pi,
                                  state.s);
}

}  // namespace

ControlSet quotes_first_order(const MarketEnv& env, const PriceModel& model,
                              const MarketState& state, double T, ExpansionMode mode,
                              int quad_nodes) {
    return first_order_quotes(env, model, state, T, mode, quad_nodes, 0.0);
}

ControlSet quotes_with_costs(const MarketEnv& env, const PriceModel& model,
                             const MarketState& state, double T, ExpansionMode mode,
                             int quad_nodes) {
    return first_order_quotes(env, model, state, T, mode, quad_nodes, env.alpha);
}

ValueDecomposition value_function_zero(const MarketEnv& env, const PriceModel& model, double t,
                                       double s, int q, double x, double T, int quad_nodes) {
    require_ordered(t, T, "value_function_zero");
    if (quad_nodes < 2) throw std::domain_error("value_function_zero: quad_nodes must be >= 2");
    ValueDecomposition out;
    const double delta_bet = directional_bet(model, t, s, T);
    out.u_hold = x + static_cast<double>(q) * (s + delta_bet);

    const GaussLegendre rule(quad_nodes);
    const double half = 0.5 * (T - t);
    const double mid = 0.5 * (t + T);
    const double prefactor =
        (2.0 / std::numbers::e) * (env.A / env.k) * std::exp(-env.k * env.z);
    double acc = 0.0;
    for (int i = 0; i < quad_nodes; ++i) {
        const double xi = mid + half * rule.nodes()[i];
        const double w = half * rule.weights()[i];
        if (model.kind == PriceKind::Martingale) {
            acc += w * prefactor;  // cosh(0) = 1
            continue;
        }
        const double c = 1.0 - std::exp(-model.a * (T - xi));
        const double decay = std::exp(-model.a * (xi - t));
        const double var_s = transition_law(model, t, 0.0, xi).var;
        const double kc = env.k * c;
        const double mean = kc * decay * (model.mu - s);
        acc += w * prefactor * std::exp(0.5 * (kc * kc) * var_s) * std::cosh(mean);
    }
    out.u_mm = acc;
    return out;
}

FirstOrderThetas theta_first_order(const MarketEnv& env, const PriceModel& model, double t,
                                   double s, double T, int quad_nodes) {
    FirstOrderThetas thetas;
    thetas.theta2_q2 = -unitary_penalty(env, t, T);
    thetas.theta1_q1 = -bias_integral(env, model, t, s, T, quad_nodes);
    return thetas;
}

}  // namespace mmk
