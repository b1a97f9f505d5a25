#include "mmk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmk {

namespace {

// Quantile by linear interpolation between closest order statistics of
// sorted data (the common h = (n-1)p rule).
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = (static_cast<double>(n) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

SummaryStats summarize(std::span<const double> sample) {
    if (sample.size() < 2) throw std::domain_error("summarize: need at least 2 values");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    double sum = 0.0;
    for (double v : sorted) sum += v;
    const double mean = sum / n;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : sorted) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    SummaryStats out;
    out.mean = mean;
    out.median = quantile_sorted(sorted, 0.50);
    out.sd = std::sqrt(m2 * n / (n - 1.0));
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    out.q01 = quantile_sorted(sorted, 0.01);
    out.q05 = quantile_sorted(sorted, 0.05);
    out.q25 = quantile_sorted(sorted, 0.25);
    out.q75 = quantile_sorted(sorted, 0.75);
    out.q95 = quantile_sorted(sorted, 0.95);
    out.q99 = quantile_sorted(sorted, 0.99);
    if (out.sd > 0.0) out.sharpe_daily = out.mean / out.sd;
    return out;
}

Histogram histogram(std::span<const double> values, int n_bins) {
    if (values.empty()) throw std::domain_error("histogram: empty input");
    if (n_bins < 1) throw std::domain_error("histogram: n_bins must be >= 1");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (lo == hi) hi = lo + 1.0;  // degenerate span: one unit-width bin

    Histogram h;
    h.edges.resize(n_bins + 1);
    const double width = (hi - lo) / n_bins;
    for (int i = 0; i <= n_bins; ++i) h.edges[i] = lo + width * i;
    h.edges[n_bins] = hi;
    h.counts.assign(n_bins, 0);
    for (double v : values) {
        int bin = static_cast<int>((v - lo) / width);
        if (bin >= n_bins) bin = n_bins - 1;  // right-inclusive last bin
        if (bin < 0) bin = 0;
        ++h.counts[bin];
    }
    return h;
}

}  // namespace mmk
