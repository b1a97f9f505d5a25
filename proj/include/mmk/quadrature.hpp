#pragma once

#include <vector>

namespace mmk {

// Gauss-Legendre rule on [-1, 1]. Nodes and weights are computed once by
// Newton iteration on the Legendre polynomial; accurate to machine
// precision for any order used here.
class GaussLegendre {
  public:
    explicit GaussLegendre(int n);

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    // Integrate f over [a, b].
    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double acc = 0.0;
        for (int i = 0; i < size(); ++i) {
            acc += half * weights_[i] * f(mid + half * nodes_[i]);
        }
        return acc;
    }

  private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

}  // namespace mmk
