#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mmk {

// Descriptive statistics of a PNL sample. Kurtosis is reported as excess
// kurtosis (normal -> 0). sharpe_daily = mean/sd is absent when sd == 0.
struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;  // unbiased
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double q01 = 0.0;
    double q05 = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double q95 = 0.0;
    double q99 = 0.0;
    std::optional<double> sharpe_daily;
};

// Sample moments and order-statistic quantiles (linear interpolation).
// Internally works on a sorted copy, so the result is permutation
// invariant. Throws std::domain_error for fewer than two values.
SummaryStats summarize(std::span<const double> sample);

struct Histogram {
    std::vector<double> edges;        // n_bins + 1 uniform edges
    std::vector<std::size_t> counts;  // sums to the sample size
};

// Uniform bins spanning [min, max], last bin right inclusive. A degenerate
// span (all values equal) is widened to a unit-width bin.
Histogram histogram(std::span<const double> values, int n_bins);

}  // namespace mmk
