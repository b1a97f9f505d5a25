#include "mmk/price_model.hpp"

#include <cmath>
#include <stdexcept>

namespace mmk {

PriceModel PriceModel::martingale(double sigma) {
    PriceModel m;
    m.kind = PriceKind::Martingale;
    m.sigma = sigma;
    return m;
}

PriceModel PriceModel::ornstein_uhlenbeck(double sigma, double a, double mu) {
    PriceModel m;
    m.kind = PriceKind::OrnsteinUhlenbeck;
    m.sigma = sigma;
    m.a = a;
    m.mu = mu;
    return m;
}

namespace {

void require_ordered(double t, double T, const char* what) {
    if (!(t <= T)) throw std::domain_error(std::string(what) + ": requires t <= T");
}

}  // namespace

double expected_terminal(const PriceModel& model, double t, double s, double T) {
    require_ordered(t, T, "expected_terminal");
    if (model.kind == PriceKind::Martingale) return s;
    const double decay = std::exp(-model.a * (T - t));
    return s * decay + model.mu * (1.0 - decay);
}

double directional_bet(const PriceModel& model, double t, double s, double T) {
    require_ordered(t, T, "directional_bet");
    if (model.kind == PriceKind::Martingale) return 0.0;
    return expected_terminal(model, t, s, T) - s;
}

GaussianLaw transition_law(const PriceModel& model, double t, double s, double xi) {
    require_ordered(t, xi, "transition_law");
    GaussianLaw law;
    if (model.kind == PriceKind::Martingale) {
        law.mean = s;
        law.var = model.sigma * model.sigma * (xi - t);
        return law;
    }
    const double decay = std::exp(-model.a * (xi - t));
    law.mean = s * decay + model.mu * (1.0 - decay);
    law.var = model.sigma * model.sigma * (1.0 - decay * decay) / (2.0 * model.a);
    return law;
}

double step(const PriceModel& model, double s, double dt, double g) {
    const double noise = model.sigma * (g * std::sqrt(dt));
    if (model.kind == PriceKind::Martingale) return s + noise;
    return s + model.a * (model.mu - s) * dt + noise;
}

}  // namespace mmk
