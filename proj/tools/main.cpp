// Command-line front end: experiment orchestration over the quoting and
// simulation library. Subcommands: simulate, compare, sweep, isorisk,
// verify. Exit codes: 0 success, 1 verification failure, 2 config error,
// 3 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmk/csv.hpp"
#include "mmk/multi_asset.hpp"
#include "mmk/price_model.hpp"
#include "mmk/quote_engine.hpp"
#include "mmk/sim_engine.hpp"
#include "mmk/stats.hpp"
#include "mmk/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    mmk::MarketEnv env;
    std::string model = "ou";
    double ou_a = 0.1;
    double ou_mu = 3009.0;
    double s0 = 3000.0;
    mmk::Horizon horizon{1.0};
    mmk::SimConfig sim;
    std::string label;
    std::optional<mmk::MultiEnv> multi;
    std::vector<mmk::PriceModel> multi_models;
    std::vector<std::vector<int>> inventory_configs;
};

mmk::Policy parse_policy(const std::string& name) {
    if (name == "zero_order") return mmk::Policy::ZeroOrder;
    if (name == "first_order_full") return mmk::Policy::FirstOrderFull;
    if (name == "first_order_simplified") return mmk::Policy::FirstOrderSimplified;
    if (name == "with_costs") return mmk::Policy::WithCosts;
    throw ConfigError("unknown policy '" + name +
                      "' (expected zero_order, first_order_full, first_order_simplified or "
                      "with_costs)");
}

std::string policy_name(mmk::Policy policy) {
    switch (policy) {
        case mmk::Policy::ZeroOrder: return "zero_order";
        case mmk::Policy::FirstOrderFull: return "first_order_full";
        case mmk::Policy::FirstOrderSimplified: return "first_order_simplified";
        case mmk::Policy::WithCosts: return "with_costs";
    }
    return "?";
}

bool is_model_name(const std::string& name) { return name == "ou" || name == "martingale"; }

mmk::PriceModel model_from_name(const std::string& name, double sigma, double a, double mu) {
    if (name == "martingale") return mmk::PriceModel::martingale(sigma);
    if (name == "ou") return mmk::PriceModel::ornstein_uhlenbeck(sigma, a, mu);
    throw ConfigError("unknown model '" + name + "' (expected martingale or ou)");
}

mmk::PriceModel parse_asset_model(const json& j, int index) {
    const std::string where = "multi.models[" + std::to_string(index) + "]";
    for (const char* key : {"model", "sigma"})
        if (!j.contains(key))
            throw ConfigError("missing required key " + where + "." + key);
    const std::string kind = j.at("model").get<std::string>();
    const double sigma = j.at("sigma").get<double>();
    if (kind == "martingale") return mmk::PriceModel::martingale(sigma);
    if (kind == "ou") {
        for (const char* key : {"a", "mu"})
            if (!j.contains(key))
                throw ConfigError("missing required key " + where + "." + key);
        return mmk::PriceModel::ornstein_uhlenbeck(sigma, j.at("a").get<double>(),
                                                   j.at("mu").get<double>());
    }
    throw ConfigError(where + ": unknown model '" + kind + "'");
}

mmk::Matrix parse_matrix(const json& j, const std::string& key) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : j) rows.push_back(row.get<std::vector<double>>());
    try {
        return mmk::Matrix::from_rows(rows);
    } catch (const std::domain_error& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

void parse_multi(const json& j, ExperimentConfig& cfg) {
    mmk::MultiEnv menv;
    for (const char* key : {"M", "A", "k", "z", "alpha", "Lambda", "Omega", "models"})
        if (!j.contains(key))
            throw ConfigError(std::string("missing required key multi.") + key);
    menv.M = j.at("M").get<int>();
    menv.A = j.at("A").get<std::vector<double>>();
    menv.k = j.at("k").get<std::vector<double>>();
    menv.z = j.at("z").get<std::vector<double>>();
    menv.alpha = j.at("alpha").get<std::vector<double>>();
    menv.Lambda = parse_matrix(j.at("Lambda"), "multi.Lambda");
    menv.Omega = parse_matrix(j.at("Omega"), "multi.Omega");
    menv.epsilon = cfg.env.epsilon;
    menv.eta = cfg.env.eta;
    menv.nu = cfg.env.nu;
    if (j.contains("epsilon")) menv.epsilon = j.at("epsilon").get<double>();
    if (j.contains("eta")) menv.eta = j.at("eta").get<double>();
    if (j.contains("nu")) menv.nu = j.at("nu").get<double>();

    cfg.multi_models.clear();
    int index = 0;
    for (const auto& jm : j.at("models"))
        cfg.multi_models.push_back(parse_asset_model(jm, index++));
    if (j.contains("S0")) cfg.sim.s0_vec = j.at("S0").get<std::vector<double>>();

    const auto report = validate_multi_env(menv, cfg.multi_models);
    if (!report.ok()) throw ConfigError("multi: " + report.violations.front());
    cfg.multi = std::move(menv);
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg;
    // Desk defaults; a config file overrides key by key.
    cfg.env.A = 1000.0;
    cfg.env.k = 1.0;
    cfg.env.z = 0.5;
    cfg.env.sigma = 0.5;
    cfg.env.alpha = 0.05;
    cfg.env.epsilon = 0.001;
    cfg.env.eta = 1.0;
    cfg.env.nu = 1.0;
    cfg.sim.n_steps = 1000;
    cfg.sim.n_paths = 10000;
    cfg.sim.T = 1.0;
    cfg.sim.seed = 42;
    cfg.sim.policy = mmk::Policy::FirstOrderFull;

    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError("config parse error in " + path + ": " + e.what());
        }
        if (!j.is_object()) throw ConfigError("config root must be a JSON object");

        for (const auto& [key, value] : j.items()) {
            try {
                if (key == "A") cfg.env.A = value.get<double>();
                else if (key == "k") cfg.env.k = value.get<double>();
                else if (key == "z") cfg.env.z = value.get<double>();
                else if (key == "sigma") cfg.env.sigma = value.get<double>();
                else if (key == "alpha") cfg.env.alpha = value.get<double>();
                else if (key == "epsilon") cfg.env.epsilon = value.get<double>();
                else if (key == "eta") cfg.env.eta = value.get<double>();
                else if (key == "nu") cfg.env.nu = value.get<double>();
                else if (key == "a") cfg.ou_a = value.get<double>();
                else if (key == "mu") cfg.ou_mu = value.get<double>();
                else if (key == "S0") cfg.s0 = value.get<double>();
                else if (key == "T") cfg.horizon.T = value.get<double>();
                else if (key == "n_steps") cfg.sim.n_steps = value.get<int>();
                else if (key == "n_paths") cfg.sim.n_paths = value.get<int>();
                else if (key == "seed") cfg.sim.seed = value.get<std::uint64_t>();
                else if (key == "policy") cfg.sim.policy = parse_policy(value.get<std::string>());
                else if (key == "model") cfg.model = value.get<std::string>();
                else if (key == "record_paths") cfg.sim.record_paths = value.get<bool>();
                else if (key == "quad_nodes") cfg.sim.quad_nodes = value.get<int>();
                else if (key == "workers") cfg.sim.workers = value.get<int>();
                else if (key == "label") cfg.label = value.get<std::string>();
                else if (key == "multi") parse_multi(value, cfg);
                else if (key == "inventory_configs")
                    cfg.inventory_configs = value.get<std::vector<std::vector<int>>>();
                else throw ConfigError("unknown config key '" + key + "'");
            } catch (const json::exception& e) {
                throw ConfigError("config key '" + key + "': " + e.what());
            }
        }
    }
    if (!is_model_name(cfg.model)) throw ConfigError("unknown model '" + cfg.model + "'");

    if (!(cfg.horizon.T > 0.0)) throw ConfigError("T must be > 0");
    cfg.sim.T = cfg.horizon.T;
    cfg.sim.s0 = cfg.s0;
    const auto report = mmk::validate_env(cfg.env);
    if (!report.ok()) {
        std::string msg = "invalid parameters:";
        for (const auto& v : report.violations) msg += " " + v + ";";
        throw ConfigError(msg);
    }
    return cfg;
}

mmk::PriceModel single_model(const ExperimentConfig& cfg) {
    return model_from_name(cfg.model, cfg.env.sigma, cfg.ou_a, cfg.ou_mu);
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
    return dir;
}

std::vector<std::string> summary_header() {
    return {"label", "mean", "median", "sd",  "skewness", "excess_kurtosis", "q01",
            "q05",   "q25",  "q75",    "q95", "q99",      "sharpe"};
}

std::vector<std::string> summary_row(const std::string& label, const mmk::SummaryStats& s) {
    using mmk::csv_double;
    return {label,
            csv_double(s.mean),
            csv_double(s.median),
            csv_double(s.sd),
            csv_double(s.skewness),
            csv_double(s.excess_kurtosis),
            csv_double(s.q01),
            csv_double(s.q05),
            csv_double(s.q25),
            csv_double(s.q75),
            csv_double(s.q95),
            csv_double(s.q99),
            s.sharpe_daily ? csv_double(*s.sharpe_daily) : std::string("")};
}

std::vector<double> pnl_of(const mmk::PnlSample& sample) {
    std::vector<double> pnl;
    pnl.reserve(sample.paths.size());
    for (const auto& p : sample.paths) pnl.push_back(p.terminal_pnl);
    return pnl;
}

void write_paths_csv(const fs::path& file, const mmk::PnlSample& sample) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(sample.paths.size());
    for (std::size_t i = 0; i < sample.paths.size(); ++i) {
        const auto& p = sample.paths[i];
        rows.push_back({std::to_string(i), mmk::csv_double(p.terminal_pnl),
                        std::to_string(p.q_min), std::to_string(p.q_max),
                        std::to_string(p.n_buy_fills), std::to_string(p.n_sell_fills)});
    }
    mmk::write_csv(file.string(),
                   {"path_id", "terminal_pnl", "q_min", "q_max", "n_buy_fills", "n_sell_fills"},
                   rows);
}

void write_timeseries_csv(const fs::path& file, const mmk::PnlSample& sample) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sample.paths.size(); ++i) {
        if (sample.paths[i].series.empty()) continue;
        for (const auto& pt : sample.paths[i].series) {
            rows.push_back({std::to_string(i), std::to_string(pt.step), mmk::csv_double(pt.t),
                            mmk::csv_double(pt.s), mmk::csv_double(pt.delta_plus),
                            mmk::csv_double(pt.delta_minus), std::to_string(pt.q),
                            mmk::csv_double(pt.x)});
        }
        break;  // first recorded path only
    }
    mmk::write_csv(file.string(),
                   {"path_id", "step", "t", "s", "delta_plus", "delta_minus", "q", "x"}, rows);
}

mmk::PnlSample run_configured(const ExperimentConfig& cfg, bool multi) {
    if (multi) {
        if (!cfg.multi) throw ConfigError("missing required key multi");
        return mmk::run_batch_multi(*cfg.multi, cfg.multi_models, cfg.sim);
    }
    return mmk::run_batch(cfg.env, single_model(cfg), cfg.sim);
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out, bool multi) {
    const mmk::PnlSample sample = run_configured(cfg, multi);
    const mmk::SummaryStats stats = mmk::summarize(pnl_of(sample));
    const fs::path dir = prepare_out_dir(out);
    const std::string label = cfg.label.empty() ? policy_name(cfg.sim.policy) : cfg.label;
    write_paths_csv(dir / "paths.csv", sample);
    mmk::write_csv((dir / "summary.csv").string(), summary_header(),
                   {summary_row(label, stats)});
    if (cfg.sim.record_paths) write_timeseries_csv(dir / "timeseries.csv", sample);
    std::cout << label << ": mean " << stats.mean << " sd " << stats.sd << " sharpe "
              << (stats.sharpe_daily ? std::to_string(*stats.sharpe_daily) : "n/a") << " ("
              << sample.paths.size() << " paths)\n";
    return kExitOk;
}

int cmd_compare(const ExperimentConfig& cfg, const std::string& out,
                const std::vector<std::string>& arms) {
    if (arms.size() < 2) throw ConfigError("compare needs at least two arms");
    std::vector<std::vector<std::string>> rows;
    for (const std::string& arm : arms) {
        ExperimentConfig run = cfg;
        std::string model_part = arm;
        std::string policy_part;
        if (const auto colon = arm.find(':'); colon != std::string::npos) {
            model_part = arm.substr(0, colon);
            policy_part = arm.substr(colon + 1);
        }
        if (is_model_name(model_part)) run.model = model_part;
        else if (policy_part.empty()) policy_part = model_part;
        else throw ConfigError("unknown model '" + model_part + "' in arm '" + arm + "'");
        if (!policy_part.empty()) run.sim.policy = parse_policy(policy_part);
        const mmk::PnlSample sample = run_configured(run, false);
        const mmk::SummaryStats stats = mmk::summarize(pnl_of(sample));
        rows.push_back(summary_row(arm, stats));
        std::cout << arm << ": mean " << stats.mean << " sd " << stats.sd << "\n";
    }
    const fs::path dir = prepare_out_dir(out);
    mmk::write_csv((dir / "compare.csv").string(), summary_header(), rows);
    return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out, const std::string& param,
              const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep needs a non-empty value list");
    if (param != "epsilon" && param != "alpha")
        throw ConfigError("sweep parameter must be epsilon or alpha");
    std::vector<std::vector<std::string>> rows;
    for (double value : values) {
        ExperimentConfig run = cfg;
        if (param == "epsilon") {
            run.env.epsilon = value;
        } else {
            run.env.alpha = value;
            run.sim.policy = mmk::Policy::WithCosts;
        }
        const mmk::PnlSample sample = run_configured(run, false);
        const mmk::SummaryStats stats = mmk::summarize(pnl_of(sample));
        const std::string label = param + "=" + mmk::csv_double(value);
        rows.push_back(summary_row(label, stats));
        std::cout << label << ": mean " << stats.mean << " sd " << stats.sd << " sharpe "
                  << (stats.sharpe_daily ? std::to_string(*stats.sharpe_daily) : "n/a") << "\n";
    }
    const fs::path dir = prepare_out_dir(out);
    mmk::write_csv((dir / "sweep.csv").string(), summary_header(), rows);
    return kExitOk;
}

std::vector<std::vector<int>> parse_inventory_arg(const std::string& arg) {
    std::vector<std::vector<int>> configs;
    std::stringstream outer(arg);
    std::string group;
    while (std::getline(outer, group, ';')) {
        std::vector<int> q;
        std::stringstream inner(group);
        std::string item;
        while (std::getline(inner, item, ',')) q.push_back(std::stoi(item));
        if (!q.empty()) configs.push_back(std::move(q));
    }
    return configs;
}

int cmd_isorisk(const ExperimentConfig& cfg, const std::string& out, const std::string& q_arg) {
    if (!cfg.multi) throw ConfigError("missing required key multi");
    const std::vector<std::vector<int>> configs =
        q_arg.empty() ? cfg.inventory_configs : parse_inventory_arg(q_arg);
    if (configs.empty())
        throw ConfigError("isorisk needs inventory configurations (--q or inventory_configs)");
    std::vector<mmk::RankedConfig> ranked;
    try {
        ranked = mmk::rank_inventory_configs(*cfg.multi, configs, 0.0, cfg.horizon.T);
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        std::string q_text = "(";
        for (std::size_t j = 0; j < ranked[i].q.size(); ++j) {
            if (j) q_text += ",";
            q_text += std::to_string(ranked[i].q[j]);
        }
        q_text += ")";
        std::cout << (i + 1) << ". q=" << q_text << " risk=" << ranked[i].risk << "\n";
        rows.push_back({std::to_string(i + 1), q_text, mmk::csv_double(ranked[i].risk)});
    }
    const fs::path dir = prepare_out_dir(out);
    mmk::write_csv((dir / "isorisk.csv").string(), {"rank", "q", "risk"}, rows);
    return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& out, double tol_scale,
               int mc_paths) {
    mmk::VerifyOptions options;
    options.tol_scale = tol_scale;
    if (mc_paths > 0) options.n_mc = mc_paths;
    options.seed = cfg.sim.seed;
    const mmk::PriceModel ou =
        mmk::PriceModel::ornstein_uhlenbeck(cfg.env.sigma, cfg.ou_a, cfg.ou_mu);
    const auto results =
        mmk::run_verification_suite(cfg.env, ou, cfg.s0, cfg.horizon.T, options);

    std::vector<std::vector<std::string>> rows;
    int failures = 0;
    for (const auto& check : results) {
        const char* status = check.pass ? "PASS" : "FAIL";
        if (!check.pass) ++failures;
        std::cout << status << "  " << check.name << "  computed=" << check.computed
                  << " reference=" << check.reference << " tol=" << check.tolerance << "\n";
        rows.push_back({check.name, mmk::csv_double(check.computed),
                        mmk::csv_double(check.reference), mmk::csv_double(check.tolerance),
                        status});
    }
    const fs::path dir = prepare_out_dir(out);
    mmk::write_csv((dir / "verification.csv").string(),
                   {"check", "computed", "reference", "tolerance", "status"}, rows);
    if (failures > 0) {
        std::cout << failures << " check(s) failed\n";
        return kExitVerifyFailure;
    }
    std::cout << "all " << results.size() << " checks passed\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"market-making quote engine, simulator and verification suite"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> paths_override;
    std::optional<int> workers_override;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory (default: current)");
    app.add_option("--seed", seed_override, "master RNG seed override");
    app.add_option("--paths", paths_override, "path count override");
    app.add_option("--workers", workers_override, "worker thread count");

    auto* simulate = app.add_subcommand("simulate", "run one Monte Carlo batch");
    bool multi = false;
    simulate->add_flag("--multi", multi, "use the multi-asset book from the config");

    auto* compare = app.add_subcommand("compare", "summaries across models/policies");
    std::vector<std::string> arms = {"martingale", "ou"};
    compare->add_option("--arms", arms, "comma-separated arms: model, policy or model:policy")
        ->delimiter(',');

    auto* sweep = app.add_subcommand("sweep", "summaries across one parameter");
    std::string sweep_param;
    std::vector<double> sweep_values;
    sweep->add_option("--param", sweep_param, "epsilon or alpha")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")
        ->required()
        ->delimiter(',');

    auto* isorisk = app.add_subcommand("isorisk", "rank inventory configurations by risk");
    std::string q_arg;
    isorisk->add_option("--q", q_arg, "configs like \"2,0;1,1;1,-1\"");

    auto* verify = app.add_subcommand("verify", "run the closed-form verification suite");
    double tol_scale = 1.0;
    int mc_paths = 0;
    verify->add_option("--tol-scale", tol_scale, "scale all tolerances (<1 tightens)");
    verify->add_option("--mc-paths", mc_paths, "Monte Carlo paths for the oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (seed_override) cfg.sim.seed = *seed_override;
        if (paths_override) cfg.sim.n_paths = *paths_override;
        if (workers_override) cfg.sim.workers = *workers_override;

        if (simulate->parsed()) return cmd_simulate(cfg, out_dir, multi);
        if (compare->parsed()) return cmd_compare(cfg, out_dir, arms);
        if (sweep->parsed()) return cmd_sweep(cfg, out_dir, sweep_param, sweep_values);
        if (isorisk->parsed()) return cmd_isorisk(cfg, out_dir, q_arg);
        if (verify->parsed()) return cmd_verify(cfg, out_dir, tol_scale, mc_paths);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    }
    return kExitOk;
}
