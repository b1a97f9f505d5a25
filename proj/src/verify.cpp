#include "mmk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mmk/quote_engine.hpp"
#include "mmk/rng.hpp"

namespace mmk {

double argmax_grid(const MarketEnv& env, double s, double theta1, double grid_lo, double grid_hi,
                   double grid_step) {
    if (!(grid_step > 0.0) || !(grid_hi > grid_lo))
        throw std::domain_error("argmax_grid: bad grid");
    const long n = static_cast<long>(std::floor((grid_hi - grid_lo) / grid_step));
    double best_delta = grid_lo;
    double best_value = -std::numeric_limits<double>::infinity();
    long best_index = 0;
    for (long i = 0; i <= n; ++i) {
        const double delta = grid_lo + grid_step * static_cast<double>(i);
        const double value = env.A * std::exp(-env.k * (env.z + delta)) * (s + delta - theta1);
        if (value > best_value) {
            best_value = value;
            best_delta = delta;
            best_index = i;
        }
    }
    if (best_index == 0 || best_index == n)
        throw std::domain_error("argmax_grid: maximizer on grid boundary, search inconclusive");
    return best_delta;
}

namespace {

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    long n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    McEstimate finish() const {
        McEstimate e;
        e.estimate = sum / static_cast<double>(n);
        const double var =
            (sum_sq - sum * sum / static_cast<double>(n)) / (static_cast<double>(n) - 1.0);
        e.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
        return e;
    }
};

}  // namespace

FkJointEstimates feynman_kac_mc_joint(const MarketEnv& env, const PriceModel& model, double t,
                                      double s, double T, int n_mc, std::uint64_t seed,
                                      int n_grid) {
    if (n_mc < 100) throw std::domain_error("feynman_kac_mc: n_mc must be >= 100");
    if (n_grid < 2) throw std::domain_error("feynman_kac_mc: n_grid must be >= 2");
    if (!(t <= T)) throw std::domain_error("feynman_kac_mc: requires t <= T");

    const double dxi = (T - t) / n_grid;
    const bool is_ou = model.kind == PriceKind::OrnsteinUhlenbeck;

    // Per-grid-point constants: trapezoid weight, bet coefficient
    // Delta(xi, y) = c(xi)*(mu - y) for the OU model, penalty pi(xi).
    std::vector<double> bet_coef(n_grid + 1, 0.0);
    std::vector<double> weight(n_grid + 1, dxi);
    std::vector<double> pi_xi(n_grid + 1, 0.0);
    weight.front() = 0.5 * dxi;
    weight.back() = 0.5 * dxi;
    for (int i = 0; i <= n_grid; ++i) {
        const double xi = t + i * dxi;
        if (is_ou) bet_coef[i] = 1.0 - std::exp(-model.a * (T - xi));
        pi_xi[i] = env.eta * env.z + env.nu * (env.sigma * env.sigma) * (T - xi);
    }
    const double pref_umm =
        (2.0 / std::numbers::e) * (env.A / env.k) * std::exp(-env.k * env.z);
    const double pref_th =
        (4.0 / std::numbers::e) * env.A * std::exp(-env.k * env.z);
    const double drift_coef = is_ou ? model.a * dxi : 0.0;
    const double noise_scale = model.sigma * std::sqrt(dxi);

    Accumulator acc_terminal, acc_umm, acc_th;
    for (int p = 0; p < n_mc; ++p) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
        double cur = s;
        double integral_umm = 0.0;
        double integral_th = 0.0;
        for (int i = 0; i <= n_grid; ++i) {
            if (is_ou) {
                const double arg = env.k * (bet_coef[i] * (model.mu - cur));
                const double ex = std::exp(arg);
                const double inv = 1.0 / ex;
                integral_umm += weight[i] * pref_umm * (0.5 * (ex + inv));
                integral_th += weight[i] * pref_th * (0.5 * (ex - inv)) * (-pi_xi[i]);
            } else {
                integral_umm += weight[i] * pref_umm;  // cosh(0) = 1, sinh(0) = 0
            }
            if (i < n_grid)
                cur += drift_coef * (model.mu - cur) + noise_scale * rng.normal();
        }
        acc_terminal.add(cur);
        acc_umm.add(integral_umm);
        acc_th.add(integral_th);
    }
    FkJointEstimates out;
    out.theta1_zero = acc_terminal.finish();
    out.u_mm = acc_umm.finish();
    out.theta1_1 = acc_th.finish();
    return out;
}

McEstimate feynman_kac_mc(const MarketEnv& env, const PriceModel& model, FkTarget target,
                          double t, double s, double T, int n_mc, std::uint64_t seed,
                          int n_grid) {
    const FkJointEstimates joint = feynman_kac_mc_joint(env, model, t, s, T, n_mc, seed, n_grid);
    switch (target) {
        case FkTarget::Theta1Zero: return joint.theta1_zero;
        case FkTarget::Umm: return joint.u_mm;
        case FkTarget::Theta11: return joint.theta1_1;
    }
    throw std::domain_error("feynman_kac_mc: unknown target");
}

namespace {

// Time derivative of the truncated verification system. Ghost levels
// beyond +-q_cap are filled by quadratic extrapolation, which leaves any
// value function quadratic in q unperturbed by the truncation.
void ode_rhs(const MarketEnv& env, double s, int q_cap, const std::vector<double>& v,
             std::vector<double>& dv) {
    const int n = 2 * q_cap + 1;
    const double inv_k = 1.0 / env.k;
    const double scale = env.A / env.k;
    const double run_pen = env.epsilon * env.nu * env.sigma * env.sigma;
    for (int idx = 0; idx < n; ++idx) {
        const double q = static_cast<double>(idx - q_cap);
        const double v_down =
            idx > 0 ? v[idx - 1] : 3.0 * v[0] - 3.0 * v[1] + v[2];
        const double v_up =
            idx < n - 1 ? v[idx + 1] : 3.0 * v[n - 1] - 3.0 * v[n - 2] + v[n - 3];
        const double delta_plus = inv_k - s + v[idx] - v_down;
        const double delta_minus = inv_k + s + v[idx] - v_up;
        const double gain = scale * (std::exp(-env.k * (env.z + delta_plus)) +
                                     std::exp(-env.k * (env.z + delta_minus)));
        dv[idx] = -gain + run_pen * q * q;
    }
}

}  // namespace

OdeGrid solve_verification_ode(const MarketEnv& env, double s_frozen, int q_cap, int n_time,
                               double T) {
    if (q_cap < 1) throw std::domain_error("solve_verification_ode: q_cap must be >= 1");
    if (n_time < 1) throw std::domain_error("solve_verification_ode: n_time must be >= 1");
    const int n = 2 * q_cap + 1;
    OdeGrid grid;
    grid.q_cap = q_cap;
    grid.n_time = n_time;
    grid.T = T;
    grid.s_frozen = s_frozen;
    grid.values.assign(static_cast<std::size_t>(n_time + 1) * n, 0.0);

    std::vector<double> v(n);
    for (int idx = 0; idx < n; ++idx) {
        const double q = static_cast<double>(idx - q_cap);
        v[idx] = s_frozen * q - env.epsilon * env.eta * env.z * q * q;
    }
    std::copy(v.begin(), v.end(), grid.values.begin() + static_cast<std::size_t>(n_time) * n);

    const double h = -T / n_time;  // backward in time
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int layer = n_time; layer > 0; --layer) {
        ode_rhs(env, s_frozen, q_cap, v, k1);
        for (int i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * h * k1[i];
        ode_rhs(env, s_frozen, q_cap, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * h * k2[i];
        ode_rhs(env, s_frozen, q_cap, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = v[i] + h * k3[i];
        ode_rhs(env, s_frozen, q_cap, tmp, k4);
        for (int i = 0; i < n; ++i)
            v[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (double value : v) {
            if (!std::isfinite(value))
                throw std::runtime_error(
                    "solve_verification_ode: non-finite value at layer " +
                    std::to_string(layer - 1) + "; reduce the step or the inventory cap");
        }
        std::copy(v.begin(), v.end(),
                  grid.values.begin() + static_cast<std::size_t>(layer - 1) * n);
    }
    return grid;
}

double first_order_expansion_value(const MarketEnv& env, double s_frozen, double eps, int q,
                                   double t, double T) {
    const double tau = T - t;
    const double base = (2.0 * env.A / (std::numbers::e * env.k)) * std::exp(-env.k * env.z);
    const double v0 = s_frozen * q + base * tau;
    const double theta2 = -(env.eta * env.z + env.nu * env.sigma * env.sigma * tau);
    const double theta0 = -(2.0 * env.A / std::numbers::e) * std::exp(-env.k * env.z) *
                          (env.eta * env.z * tau + 0.5 * env.nu * env.sigma * env.sigma * tau * tau);
    return v0 + eps * (theta0 + static_cast<double>(q) * q * theta2);
}

std::vector<std::pair<double, double>> expansion_order_check(const MarketEnv& env,
                                                             double s_frozen,
                                                             std::span<const double> eps_list,
                                                             int q_cap, int n_time, double T) {
    if (eps_list.size() < 2)
        throw std::domain_error("expansion_order_check: need at least two epsilon values");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (eps_list[i] < 0.0)
            throw std::domain_error("expansion_order_check: epsilon must be >= 0");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw std::domain_error("expansion_order_check: epsilon list must be decreasing");
    }
    const int q_window = q_cap / 3;
    std::vector<std::pair<double, double>> out;
    out.reserve(eps_list.size());
    for (double eps : eps_list) {
        MarketEnv env_eps = env;
        env_eps.epsilon = eps;
        const OdeGrid grid = solve_verification_ode(env_eps, s_frozen, q_cap, n_time, T);
        double max_err = 0.0;
        for (int q = -q_window; q <= q_window; ++q) {
            const double err =
                std::abs(grid.at(0, q) - first_order_expansion_value(env, s_frozen, eps, q, 0.0, T));
            max_err = std::max(max_err, err);
        }
        out.emplace_back(eps, max_err);
    }
    return out;
}

std::vector<CheckResult> run_verification_suite(const MarketEnv& env, const PriceModel& ou_model,
                                                double s0, double T,
                                                const VerifyOptions& options) {
    std::vector<CheckResult> results;
    auto push = [&](const std::string& name, double computed, double reference,
                    double tolerance) {
        CheckResult r;
        r.name = name;
        r.computed = computed;
        r.reference = reference;
        r.tolerance = tolerance * options.tol_scale;
        r.pass = std::abs(computed - reference) <= r.tolerance;
        results.push_back(r);
    };

    // Closed-form argmax against grid search over random parameter draws.
    {
        Rng rng(derive_seed(options.seed, 1));
        double worst = 0.0;
        const double step = 1e-4;
        for (int i = 0; i < 100; ++i) {
            MarketEnv draw = env;
            draw.A = 100.0 + 900.0 * rng.uniform();
            draw.k = 0.5 + 2.5 * rng.uniform();
            draw.z = rng.uniform();
            const double s = 10.0 + 90.0 * rng.uniform();
            const double theta1 = s + 2.0 * rng.uniform() - 1.0;
            const double closed = 1.0 / draw.k - s + theta1;
            const double found =
                argmax_grid(draw, s, theta1, closed - 1.0, closed + 1.0, step);
            worst = std::max(worst, std::abs(found - closed));
        }
        push("argmax_grid_vs_closed_form", worst, 0.0, step);
    }

    const PriceModel mart = PriceModel::martingale(env.sigma);

    // Feynman-Kac Monte Carlo vs quadrature, both models.
    auto fk_checks = [&](const std::string& label, const PriceModel& model) {
        const FkJointEstimates joint = feynman_kac_mc_joint(
            env, model, 0.0, s0, T, options.n_mc, derive_seed(options.seed, 2), options.n_grid);
        const double ref_terminal = expected_terminal(model, 0.0, s0, T);
        push("fk_terminal_price_" + label, joint.theta1_zero.estimate, ref_terminal,
             std::max(3.0 * joint.theta1_zero.std_error, 1e-9 * std::abs(ref_terminal)));
        const double ref_umm = value_function_zero(env, model, 0.0, s0, 0, 0.0, T).u_mm;
        push("fk_umm_" + label, joint.u_mm.estimate, ref_umm,
             std::max(3.0 * joint.u_mm.std_error, 1e-9 * std::abs(ref_umm)));
        const double ref_th11 = theta_first_order(env, model, 0.0, s0, T).theta1_q1;
        push("fk_theta11_" + label, joint.theta1_1.estimate, ref_th11,
             std::max(3.0 * joint.theta1_1.std_error, 1e-9 * std::max(1.0, std::abs(ref_th11))));
    };
    fk_checks("martingale", mart);
    fk_checks("ou", ou_model);

    // Quadrature stability under node doubling.
    {
        const double u32 = value_function_zero(env, ou_model, 0.0, s0, 0, 0.0, T, 32).u_mm;
        const double u64 = value_function_zero(env, ou_model, 0.0, s0, 0, 0.0, T, 64).u_mm;
        push("umm_node_doubling_relative", (u64 - u32) / u32, 0.0, 1e-10);
        const double b32 = bias_integral(env, ou_model, 0.0, s0, T, 32);
        const double b64 = bias_integral(env, ou_model, 0.0, s0, T, 64);
        push("bias_node_doubling_relative", (b64 - b32) / std::max(1.0, std::abs(b32)), 0.0,
             1e-10);
    }

    // Expansion order study at the martingale constant-parameter case.
    {
        const double eps_pair[] = {2.0 * env.epsilon, env.epsilon};
        if (env.epsilon > 0.0) {
            const auto errs = expansion_order_check(env, s0, eps_pair, options.ode_q_cap,
                                                    options.ode_n_time, T);
            const double ratio = errs[0].second / errs[1].second;
            push("ode_expansion_error_ratio", ratio, 4.25, 1.25);
        }
        MarketEnv env0 = env;
        env0.epsilon = 0.0;
        const OdeGrid grid = solve_verification_ode(env0, s0, options.ode_q_cap,
                                                    options.ode_n_time, T);
        double max_err = 0.0;
        for (int q = -options.ode_q_cap / 3; q <= options.ode_q_cap / 3; ++q)
            max_err = std::max(
                max_err,
                std::abs(grid.at(0, q) - first_order_expansion_value(env0, s0, 0.0, q, 0.0, T)));
        push("ode_eps0_exactness", max_err, 0.0, 1e-6);

        const OdeGrid fine = solve_verification_ode(env0, s0, options.ode_q_cap,
                                                    2 * options.ode_n_time, T);
        double rel = 0.0;
        for (int q = -options.ode_q_cap / 3; q <= options.ode_q_cap / 3; ++q) {
            const double denom = std::max(1.0, std::abs(fine.at(0, q)));
            rel = std::max(rel, std::abs(grid.at(0, q) - fine.at(0, q)) / denom);
        }
        push("ode_time_refinement_relative", rel, 0.0, 1e-8);
    }

    return results;
}

}  // namespace mmk
