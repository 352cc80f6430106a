#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ktau/summation.hpp"

namespace ktau {

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;        // n - 1 denominator
    double variance = 0.0;  // sd^2
    double se = 0.0;        // sd / sqrt(count)
};

/// Two-pass mean and sample variance. Deterministic for a given input order.
[[nodiscard]] inline Summary summarize(std::span<const double> xs) {
    Summary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    CompensatedSum sum;
    for (double x : xs) sum += x;
    s.mean = sum.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return s;
    CompensatedSum ss;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss.value() / static_cast<double>(xs.size() - 1);
    s.sd = std::sqrt(s.variance);
    s.se = s.sd / std::sqrt(static_cast<double>(xs.size()));
    return s;
}

/// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
template <class Cdf>
[[nodiscard]] double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double f = cdf(xs[k]);
        d = std::max(d, std::max(static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n));
    }
    return d;
}

/// Asymptotic KS critical distance at significance `alpha`:
/// sqrt(-ln(alpha / 2) / 2) / sqrt(n).
[[nodiscard]] inline double ks_critical(std::size_t n, double alpha) {
    return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

/// Two-sided standard normal quantile for 99% intervals.
inline constexpr double kZ99 = 2.5758293035489004;

}  // namespace ktau
