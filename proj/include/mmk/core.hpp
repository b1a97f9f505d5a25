#pragma once

#include <string>
#include <vector>

namespace mmk {

// Single-asset market parameters. Fills arrive at rate A*exp(-k*(z+delta))
// when quoting at distance delta from the mid-price; z is the half market
// spread. epsilon scales the inventory penalty, eta weighs the terminal
// spread penalty and nu the running volatility penalty.
struct MarketEnv {
    double A = 0.0;        // order-arrival intensity scale, > 0
    double k = 0.0;        // intensity decay rate (1/price), > 0
    double z = 0.0;        // half market spread, >= 0
    double sigma = 0.0;    // mid-price volatility, > 0
    double alpha = 0.0;    // per-share transaction cost; negative = rebate
    double epsilon = 0.0;  // inventory-risk weight, >= 0
    double eta = 0.0;      // terminal-penalty weight, >= 0
    double nu = 0.0;       // running-penalty weight, >= 0
};

// Snapshot of the trading state. Inventory is an integer share count;
// every fill moves it by exactly +-1.
struct MarketState {
    double t = 0.0;  // current time in [0, T]
    double s = 0.0;  // mid-price
    int q = 0;       // inventory (signed shares)
    double x = 0.0;  // cash
};

// Trading horizon, T > 0.
struct Horizon {
    double T = 0.0;
};

// A two-sided quote. psi and r are stored as computed from the half
// spreads at construction, so psi == delta_plus + delta_minus and
// r == s + (delta_plus - delta_minus)/2 hold identically.
struct ControlSet {
    double delta_plus = 0.0;   // half ask spread
    double delta_minus = 0.0;  // half bid spread
    double psi = 0.0;          // market-maker spread
    double r = 0.0;            // centre of the quoted spread

    static ControlSet from_half_spreads(double delta_plus, double delta_minus, double s);
};

// Report-style validation: empty == usable everywhere.
struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate_env(const MarketEnv& env);

}  // namespace mmk
