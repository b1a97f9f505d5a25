#pragma once

#include <cstdint>
#include <vector>

#include "mmk/core.hpp"
#include "mmk/multi_asset.hpp"
#include "mmk/price_model.hpp"
#include "mmk/quote_engine.hpp"

namespace mmk {

enum class Policy {
    ZeroOrder,             // quotes ignore the inventory penalty entirely
    FirstOrderFull,        // first-order quotes with all integral terms
    FirstOrderSimplified,  // terminal-spread penalty only
    WithCosts,             // first-order quotes and accounting with alpha
};

struct SimConfig {
    int n_steps = 1000;
    double T = 1.0;
    int n_paths = 10000;
    std::uint64_t seed = 0;
    Policy policy = Policy::FirstOrderFull;
    bool record_paths = false;
    double s0 = 3000.0;
    std::vector<double> s0_vec;  // multi-asset initial prices; defaults to s0
    int quad_nodes = kDefaultQuadNodes;
    int workers = 1;
};

// One recorded grid point: quotes are computed from the state at the start
// of the step (s is the pre-move mid), q and x include the step's fills.
struct SeriesPoint {
    int step = 0;
    double t = 0.0;
    double s = 0.0;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    int q = 0;
    double x = 0.0;
};

struct PathResult {
    double terminal_pnl = 0.0;  // x(T) + q(T).s(T)
    int q_min = 0;
    int q_max = 0;
    long n_buy_fills = 0;
    long n_sell_fills = 0;
    int q_terminal = 0;
    double x_terminal = 0.0;
    double s_terminal = 0.0;
    std::vector<SeriesPoint> series;  // only when record_paths
    // Per-asset fill counts, populated by multi-asset runs.
    std::vector<long> buy_fills_by_asset;
    std::vector<long> sell_fills_by_asset;
};

struct PnlSample {
    SimConfig config;
    std::vector<std::uint64_t> path_seeds;
    std::vector<PathResult> paths;
};

// Simulate one trading day. Per step: quote from the current state, draw
// at most one fill per side (Bernoulli thinning with p = 1 - exp(-lambda dt)),
// settle cash, then advance the mid-price. Deterministic in path_seed.
PathResult run_path(const MarketEnv& env, const PriceModel& model, const SimConfig& config,
                    std::uint64_t path_seed);

// n_paths independent paths with per-path seeds derived from config.seed.
// Output is bit-identical for any worker count.
PnlSample run_batch(const MarketEnv& env, const PriceModel& model, const SimConfig& config);

// Multi-asset batch: correlated mid-prices, per-asset fills, vector quotes.
// Asset i consumes its own derived RNG stream, so with a diagonal Lambda the
// per-asset dynamics reproduce matched single-asset runs draw for draw.
PnlSample run_batch_multi(const MultiEnv& menv, const std::vector<PriceModel>& models,
                          const SimConfig& config);

}  // namespace mmk
