#pragma once

namespace mmk {

enum class PriceKind {
    Martingale,          // arithmetic Brownian motion
    OrnsteinUhlenbeck,   // mean reverting: dS = a*(mu - S)dt + sigma dW
};

// Mid-price process descriptor. The quoting formulas only consume the
// conditional law of S, so everything here is closed form.
struct PriceModel {
    PriceKind kind = PriceKind::Martingale;
    double sigma = 0.0;  // diffusion volatility (price / sqrt(time))
    double a = 0.0;      // OU mean-reversion speed (1/time)
    double mu = 0.0;     // OU long-run mean (price)

    static PriceModel martingale(double sigma);
    static PriceModel ornstein_uhlenbeck(double sigma, double a, double mu);
};

// Conditional Gaussian law of S(xi) given S(t) = s.
struct GaussianLaw {
    double mean = 0.0;
    double var = 0.0;
};

// E[S(T) | S(t) = s]. Throws std::domain_error if t > T.
double expected_terminal(const PriceModel& model, double t, double s, double T);

// Directional bet Delta = E[S(T) | S(t) = s] - s. Exactly zero for the
// martingale.
double directional_bet(const PriceModel& model, double t, double s, double T);

// Conditional law of S(xi) given S(t) = s. Throws if xi < t.
GaussianLaw transition_law(const PriceModel& model, double t, double s, double xi);

// One Euler-Maruyama step of size dt driven by a standard normal draw g.
double step(const PriceModel& model, double s, double dt, double g);

}  // namespace mmk
