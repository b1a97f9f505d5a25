#include "mmk/sim_engine.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mmk/rng.hpp"

namespace mmk {

namespace {

void check_config(const SimConfig& config) {
    if (config.n_steps < 1) throw std::domain_error("SimConfig: n_steps must be >= 1");
    if (config.n_paths < 1) throw std::domain_error("SimConfig: n_paths must be >= 1");
    if (!(config.T > 0.0)) throw std::domain_error("SimConfig: T must be > 0");
}

// Per-step quote tables shared by every path of a batch. The arithmetic
// mirrors the quote-engine entry points exactly, so recomputing a recorded
// state through quotes_first_order/quotes_with_costs reproduces the
// simulated quotes bit for bit.
class StepQuoter {
  public:
    StepQuoter(const MarketEnv& env, const PriceModel& model, const SimConfig& config)
        : epsilon_(env.epsilon),
          inv_k_(1.0 / env.k),
          kind_(model.kind),
          mu_(model.mu),
          policy_(config.policy) {
        const int n = config.n_steps;
        const double dt = config.T / n;
        const double T = config.T;
        if (policy_ == Policy::WithCosts) {
            alpha_quote_ = env.alpha;
            fill_cost_ = env.alpha;
        }
        if (kind_ == PriceKind::OrnsteinUhlenbeck) {
            decay_.resize(n);
            for (int i = 0; i < n; ++i) decay_[i] = std::exp(-model.a * (T - i * dt));
        }
        switch (policy_) {
            case Policy::ZeroOrder:
                break;
            case Policy::FirstOrderSimplified:
                pi_.assign(n, env.eta * env.z);
                break;
            case Policy::FirstOrderFull:
            case Policy::WithCosts: {
                pi_.resize(n);
                for (int i = 0; i < n; ++i) pi_[i] = unitary_penalty(env, i * dt, T);
                if (kind_ == PriceKind::OrnsteinUhlenbeck) {
                    bias_.reserve(n);
                    for (int i = 0; i < n; ++i) {
                        bias_.emplace_back(
                            env, model, i * dt, T, config.quad_nodes, alpha_quote_,
                            [&](double xi) { return unitary_penalty(env, xi, T); });
                    }
                }
                break;
            }
        }
    }

    ControlSet quotes(int step, double s, int q) const {
        double delta_bet = 0.0;
        if (kind_ == PriceKind::OrnsteinUhlenbeck) {
            const double decay = decay_[step];
            delta_bet = (s * decay + mu_ * (1.0 - decay)) - s;
        }
        if (policy_ == Policy::ZeroOrder) {
            return detail::assemble_quote(inv_k_, 0.0, delta_bet, 0.0, 0.0, 0.0, 0.0, s);
        }
        const double pi = pi_[step];
        const double bias = bias_.empty() ? 0.0 : bias_[step](s);
        const double q_pi = pi * static_cast<double>(q);
        return detail::assemble_quote(inv_k_, alpha_quote_, delta_bet, epsilon_, bias, q_pi, pi,
                                      s);
    }

    double fill_cost() const { return fill_cost_; }

  private:
    double epsilon_;
    double inv_k_;
    PriceKind kind_;
    double mu_;
    Policy policy_;
    double alpha_quote_ = 0.0;
    double fill_cost_ = 0.0;
    std::vector<double> decay_;
    std::vector<double> pi_;
    std::vector<detail::BiasIntegralEval> bias_;
};

PathResult run_path_impl(const MarketEnv& env, const PriceModel& model, const SimConfig& config,
                         const StepQuoter& quoter, std::uint64_t path_seed) {
    const int n = config.n_steps;
    const double dt = config.T / n;
    Rng rng(path_seed);

    PathResult res;
    if (config.record_paths) res.series.reserve(n);
    double s = config.s0;
    double x = 0.0;
    int q = 0;
    const double cost = quoter.fill_cost();

    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        const ControlSet c = quoter.quotes(i, s, q);
        const double p_sell = -std::expm1(-intensity(env, c.delta_plus) * dt);
        const double p_buy = -std::expm1(-intensity(env, c.delta_minus) * dt);
        const double u_sell = rng.uniform();
        const double u_buy = rng.uniform();
        if (u_sell < p_sell) {
            q -= 1;
            x += s + c.delta_plus - cost;
            ++res.n_sell_fills;
        }
        if (u_buy < p_buy) {
            q += 1;
            x -= (s - c.delta_minus) + cost;
            ++res.n_buy_fills;
        }
        if (q < res.q_min) res.q_min = q;
        if (q > res.q_max) res.q_max = q;
        if (config.record_paths)
            res.series.push_back({i, t, s, c.delta_plus, c.delta_minus, q, x});
        s = step(model, s, dt, rng.normal());
    }
    res.q_terminal = q;
    res.x_terminal = x;
    res.s_terminal = s;
    res.terminal_pnl = x + static_cast<double>(q) * s;
    return res;
}

template <class PathFn>
PnlSample run_indexed(const SimConfig& config, PathFn&& path_fn) {
    PnlSample sample;
    sample.config = config;
    sample.path_seeds.resize(config.n_paths);
    for (int i = 0; i < config.n_paths; ++i)
        sample.path_seeds[i] = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    sample.paths.resize(config.n_paths);

    const int workers = std::max(1, config.workers);
    if (workers == 1) {
        for (int i = 0; i < config.n_paths; ++i)
            sample.paths[i] = path_fn(sample.path_seeds[i]);
        return sample;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < config.n_paths; i = next.fetch_add(1))
                sample.paths[i] = path_fn(sample.path_seeds[i]);
        });
    }
    for (auto& th : pool) th.join();
    return sample;
}

}  // namespace

PathResult run_path(const MarketEnv& env, const PriceModel& model, const SimConfig& config,
                    std::uint64_t path_seed) {
    check_config(config);
    const StepQuoter quoter(env, model, config);
    return run_path_impl(env, model, config, quoter, path_seed);
}

PnlSample run_batch(const MarketEnv& env, const PriceModel& model, const SimConfig& config) {
    check_config(config);
    const StepQuoter quoter(env, model, config);
    return run_indexed(config, [&](std::uint64_t seed) {
        return run_path_impl(env, model, config, quoter, seed);
    });
}

namespace {

// Multi-asset analogue of StepQuoter; per-asset tables built with the same
// expressions as vector_quotes.
class MultiStepQuoter {
  public:
    MultiStepQuoter(const MultiEnv& menv, const std::vector<PriceModel>& models,
                    const SimConfig& config)
        : menv_(menv), models_(models) {
        const int n = config.n_steps;
        const int m = menv.M;
        const double dt = config.T / n;
        const double T = config.T;
        switch (config.policy) {
            case Policy::ZeroOrder:
                epsilon_ = 0.0;
                break;
            case Policy::FirstOrderSimplified:
                epsilon_ = menv.epsilon;
                simplified_ = true;
                break;
            case Policy::FirstOrderFull:
                epsilon_ = menv.epsilon;
                break;
            case Policy::WithCosts:
                epsilon_ = menv.epsilon;
                alpha_quote_ = menv.alpha;
                fill_cost_ = menv.alpha;
                break;
        }
        if (alpha_quote_.empty()) alpha_quote_.assign(m, 0.0);
        if (fill_cost_.empty()) fill_cost_.assign(m, 0.0);

        decay_.assign(m, {});
        for (int i = 0; i < m; ++i) {
            if (models[i].kind != PriceKind::OrnsteinUhlenbeck) continue;
            decay_[i].resize(n);
            for (int j = 0; j < n; ++j)
                decay_[i][j] = std::exp(-models[i].a * (T - j * dt));
        }
        pi_.reserve(n);
        for (int j = 0; j < n; ++j) {
            const double t = j * dt;
            Matrix pi(m);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    pi(a, b) = simplified_
                                   ? menv.eta * menv.Omega(a, b)
                                   : menv.eta * menv.Omega(a, b) +
                                         menv.nu * menv.Lambda(a, b) * (T - t);
            pi_.push_back(std::move(pi));
        }
        if (epsilon_ != 0.0 && !simplified_) {
            bias_.assign(m, {});
            for (int i = 0; i < m; ++i) {
                if (models[i].kind != PriceKind::OrnsteinUhlenbeck) continue;
                MarketEnv env_i;
                env_i.A = menv.A[i];
                env_i.k = menv.k[i];
                env_i.z = menv.z[i];
                bias_[i].reserve(n);
                for (int j = 0; j < n; ++j) {
                    bias_[i].emplace_back(
                        env_i, models[i], j * dt, T, config.quad_nodes, alpha_quote_[i],
                        [&, i](double xi) {
                            double row = 0.0;
                            for (int b = 0; b < m; ++b)
                                row += menv_.eta * menv_.Omega(i, b) +
                                       menv_.nu * menv_.Lambda(i, b) * (T - xi);
                            return row;
                        });
                }
            }
        }
    }

    void quotes(int step, const std::vector<double>& s, const std::vector<int>& q,
                std::vector<double>& delta_plus, std::vector<double>& delta_minus) const {
        const int m = menv_.M;
        const Matrix& pi = pi_[step];
        for (int i = 0; i < m; ++i) {
            double delta_bet = 0.0;
            if (models_[i].kind == PriceKind::OrnsteinUhlenbeck) {
                const double decay = decay_[i][step];
                delta_bet = (s[i] * decay + models_[i].mu * (1.0 - decay)) - s[i];
            }
            const double bias =
                (!bias_.empty() && !bias_[i].empty()) ? bias_[i][step](s[i]) : 0.0;
            double q_pi = 0.0;
            for (int b = 0; b < m; ++b) q_pi += pi(i, b) * static_cast<double>(q[b]);
            const ControlSet c =
                detail::assemble_quote(1.0 / menv_.k[i], alpha_quote_[i], delta_bet, epsilon_,
                                       bias, q_pi, pi(i, i), s[i]);
            delta_plus[i] = c.delta_plus;
            delta_minus[i] = c.delta_minus;
        }
    }

    const std::vector<double>& fill_cost() const { return fill_cost_; }

  private:
    const MultiEnv& menv_;
    const std::vector<PriceModel>& models_;
    double epsilon_ = 0.0;
    bool simplified_ = false;
    std::vector<double> alpha_quote_;
    std::vector<double> fill_cost_;
    std::vector<std::vector<double>> decay_;
    std::vector<Matrix> pi_;
    std::vector<std::vector<detail::BiasIntegralEval>> bias_;
};

PathResult run_path_multi(const MultiEnv& menv, const std::vector<PriceModel>& models,
                          const SimConfig& config, const MultiStepQuoter& quoter,
                          const Matrix& chol, const std::vector<double>& s0,
                          std::uint64_t path_seed) {
    const int m = menv.M;
    const int n = config.n_steps;
    const double dt = config.T / n;

    // Asset 0 consumes the path stream itself; further assets use derived
    // streams. Matched single-asset runs then see identical draws.
    std::vector<Rng> streams;
    streams.reserve(m);
    streams.emplace_back(path_seed);
    for (int i = 1; i < m; ++i) streams.emplace_back(derive_seed(path_seed, i));

    PathResult res;
    res.buy_fills_by_asset.assign(m, 0);
    res.sell_fills_by_asset.assign(m, 0);
    if (config.record_paths) res.series.reserve(n);

    std::vector<MarketEnv> envs(m);
    for (int a = 0; a < m; ++a) {
        envs[a].A = menv.A[a];
        envs[a].k = menv.k[a];
        envs[a].z = menv.z[a];
    }

    std::vector<double> s = s0;
    std::vector<int> q(m, 0);
    double x = 0.0;
    std::vector<double> dp(m), dm(m), g(m);
    const std::vector<double>& cost = quoter.fill_cost();

    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        quoter.quotes(i, s, q, dp, dm);
        const double s0_start = s[0];
        for (int a = 0; a < m; ++a) {
            const double p_sell = -std::expm1(-intensity(envs[a], dp[a]) * dt);
            const double p_buy = -std::expm1(-intensity(envs[a], dm[a]) * dt);
            const double u_sell = streams[a].uniform();
            const double u_buy = streams[a].uniform();
            if (u_sell < p_sell) {
                q[a] -= 1;
                x += s[a] + dp[a] - cost[a];
                ++res.sell_fills_by_asset[a];
            }
            if (u_buy < p_buy) {
                q[a] += 1;
                x -= (s[a] - dm[a]) + cost[a];
                ++res.buy_fills_by_asset[a];
            }
            if (q[a] < res.q_min) res.q_min = q[a];
            if (q[a] > res.q_max) res.q_max = q[a];
        }
        if (config.record_paths) {
            int q_total = 0;
            for (int a = 0; a < m; ++a) q_total += q[a];
            res.series.push_back({i, t, s0_start, dp[0], dm[0], q_total, x});
        }
        for (int a = 0; a < m; ++a) g[a] = streams[a].normal();
        s = correlated_step(chol, models, s, dt, g);
    }
    double mark = 0.0;
    int q_total = 0;
    for (int a = 0; a < m; ++a) {
        mark += static_cast<double>(q[a]) * s[a];
        q_total += q[a];
        res.n_sell_fills += res.sell_fills_by_asset[a];
        res.n_buy_fills += res.buy_fills_by_asset[a];
    }
    res.q_terminal = q_total;
    res.x_terminal = x;
    res.s_terminal = s[0];
    res.terminal_pnl = x + mark;
    return res;
}

}  // namespace

PnlSample run_batch_multi(const MultiEnv& menv, const std::vector<PriceModel>& models,
                          const SimConfig& config) {
    check_config(config);
    const std::size_t m = static_cast<std::size_t>(menv.M);
    if (menv.M < 1 || models.size() != m || menv.A.size() != m || menv.k.size() != m ||
        menv.z.size() != m || menv.alpha.size() != m || menv.Lambda.dim() != menv.M ||
        menv.Omega.dim() != menv.M)
        throw std::domain_error("run_batch_multi: dimension mismatch");
    std::vector<double> s0 = config.s0_vec;
    if (s0.empty()) s0.assign(menv.M, config.s0);
    if (static_cast<int>(s0.size()) != menv.M)
        throw std::domain_error("run_batch_multi: s0_vec dimension mismatch");

    const MultiStepQuoter quoter(menv, models, config);
    const Matrix chol = cholesky_lower(menv.Lambda);
    return run_indexed(config, [&](std::uint64_t seed) {
        return run_path_multi(menv, models, config, quoter, chol, s0, seed);
    });
}

}  // namespace mmk
