#pragma once

// Sample correlation coefficients for a bivariate sample (X_1,Y_1),...,(X_n,Y_n).
//
// The rank coefficients work on the concomitant sequence c_1..c_n: the
// y-values listed in increasing order of their x-values. With
// C = #{ j < i : c_j <= c_i },
//
//   kendall   = 4C / (n(n-1)) - 1
//   spearman  = 1 - 6 sum_i (R_i - i)^2 / (n^3 - n),  R_i = #{ j : c_j <= c_i }
//   blended_r = (3 kendall - spearman) / 2

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ktau/error.hpp"
#include "ktau/families.hpp"
#include "ktau/summation.hpp"

namespace ktau {

/// Strict rejects any exactly tied x's or y's. Literal applies the "<="
/// indicator as written and reports the tie counts.
enum class TiesPolicy { Strict, Literal };

struct TieReport {
    std::uint64_t x_pairs = 0;
    std::uint64_t y_pairs = 0;

    [[nodiscard]] bool any() const noexcept { return x_pairs != 0 || y_pairs != 0; }
};

struct SimulatedOrigin {
    FamilySpec family;
    std::uint64_t seed;
};

struct IngestedOrigin {
    std::string path;
};

using Provenance = std::variant<SimulatedOrigin, IngestedOrigin>;

struct Sample {
    std::vector<Point> points;
    Provenance provenance;
};

struct CoefficientSelection {
    bool kendall = true;
    bool spearman = true;
    bool blended_r = true;
    bool pearson = true;
};

struct CoefficientSet {
    std::optional<double> kendall;
    std::optional<double> spearman;
    std::optional<double> blended_r;
    std::optional<double> pearson;
    std::size_t n = 0;
    TieReport ties;
};

namespace detail {

inline std::uint64_t tied_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t pairs = 0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i]) ++j;
        const std::uint64_t g = j - i;
        pairs += g * (g - 1) / 2;
        i = j;
    }
    return pairs;
}

inline void require_finite(std::span<const Point> points) {
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!std::isfinite(points[k].x) || !std::isfinite(points[k].y)) {
            throw Error(ErrorKind::InvalidArgument,
                        "non-finite observation at row " + std::to_string(k + 1));
        }
    }
}

inline void require_size(std::span<const Point> points) {
    if (points.size() < 2) {
        throw Error(ErrorKind::SampleTooSmall,
                    "need at least 2 observations, got " + std::to_string(points.size()));
    }
}

/// Pairs j < i with c[j] > c[i], by bottom-up merge sort. Sorts `c`.
inline std::uint64_t count_inversions(std::vector<double>& c) {
    const std::size_t n = c.size();
    std::vector<double> buf(n);
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t a = lo, b = mid, out = lo;
            while (a < mid && b < hi) {
                if (c[a] <= c[b]) {
                    buf[out++] = c[a++];
                } else {
                    inversions += mid - a;
                    buf[out++] = c[b++];
                }
            }
            while (a < mid) buf[out++] = c[a++];
            while (b < hi) buf[out++] = c[b++];
        }
        c.swap(buf);
    }
    return inversions;
}

inline double kendall_from_count(std::uint64_t concordant, std::size_t n) {
    const double nn = static_cast<double>(n);
    return 4.0 * static_cast<double>(concordant) / (nn * (nn - 1.0)) - 1.0;
}

}  // namespace detail

[[nodiscard]] inline TieReport tie_report(std::span<const Point> points) {
    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& p : points) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    return {detail::tied_pairs(std::move(xs)), detail::tied_pairs(std::move(ys))};
}

/// y-values ordered by x (stable). Validates size, finiteness and ties.
[[nodiscard]] inline std::vector<double> concomitants(std::span<const Point> points,
                                                      TiesPolicy policy = TiesPolicy::Strict) {
    detail::require_size(points);
    detail::require_finite(points);
    if (policy == TiesPolicy::Strict) {
        const TieReport ties = tie_report(points);
        if (ties.any()) {
            throw Error(ErrorKind::Ties, "tied observations in strict mode: " +
                                             std::to_string(ties.x_pairs) + " tied x-pairs, " +
                                             std::to_string(ties.y_pairs) + " tied y-pairs");
        }
    }
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a].x < points[b].x; });
    std::vector<double> c;
    c.reserve(points.size());
    for (std::size_t k : order) c.push_back(points[k].y);
    return c;
}

/// C = #{ j < i : c_j <= c_i } by the quadratic double loop.
[[nodiscard]] inline std::uint64_t concordance_count_naive(std::span<const double> c) {
    std::uint64_t count = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (c[j] <= c[i]) ++count;
        }
    }
    return count;
}

/// Same count in O(n log n): all pairs minus strict inversions.
[[nodiscard]] inline std::uint64_t concordance_count_fast(std::span<const double> c) {
    std::vector<double> work(c.begin(), c.end());
    const std::uint64_t n = work.size();
    return n * (n - 1) / 2 - detail::count_inversions(work);
}

[[nodiscard]] inline double kendall_naive(std::span<const Point> points,
                                          TiesPolicy policy = TiesPolicy::Strict) {
    const auto c = concomitants(points, policy);
    return detail::kendall_from_count(concordance_count_naive(c), c.size());
}

[[nodiscard]] inline double kendall_fast(std::span<const Point> points,
                                         TiesPolicy policy = TiesPolicy::Strict) {
    const auto c = concomitants(points, policy);
    return detail::kendall_from_count(concordance_count_fast(c), c.size());
}

[[nodiscard]] inline double kendall(std::span<const Point> points,
                                    TiesPolicy policy = TiesPolicy::Strict) {
    return kendall_fast(points, policy);
}

namespace detail {

inline double spearman_from_concomitants(std::span<const double> c) {
    std::vector<double> sorted(c.begin(), c.end());
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t sum_sq = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto rank = static_cast<std::int64_t>(
            std::upper_bound(sorted.begin(), sorted.end(), c[i]) - sorted.begin());
        const std::int64_t d = rank - static_cast<std::int64_t>(i + 1);
        sum_sq += static_cast<std::uint64_t>(d * d);
    }
    const double n = static_cast<double>(c.size());
    return 1.0 - 6.0 * static_cast<double>(sum_sq) / (n * n * n - n);
}

}  // namespace detail

[[nodiscard]] inline double spearman(std::span<const Point> points,
                                     TiesPolicy policy = TiesPolicy::Strict) {
    return detail::spearman_from_concomitants(concomitants(points, policy));
}

[[nodiscard]] inline double blended_r(std::span<const Point> points,
                                      TiesPolicy policy = TiesPolicy::Strict) {
    const auto c = concomitants(points, policy);
    const double k = detail::kendall_from_count(concordance_count_fast(c), c.size());
    const double s = detail::spearman_from_concomitants(c);
    return (3.0 * k - s) / 2.0;
}

/// Sample product-moment correlation (two-pass, centered).
[[nodiscard]] inline double pearson(std::span<const Point> points) {
    detail::require_size(points);
    detail::require_finite(points);
    CompensatedSum sx, sy;
    for (const auto& p : points) {
        sx += p.x;
        sy += p.y;
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx.value() / n;
    const double my = sy.value() / n;
    CompensatedSum sxx, syy, sxy;
    for (const auto& p : points) {
        const double dx = p.x - mx;
        const double dy = p.y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx.value() <= 0.0 || syy.value() <= 0.0) {
        throw Error(ErrorKind::ZeroVariance,
                    sxx.value() <= 0.0 ? "x has zero variance" : "y has zero variance");
    }
    const double r = sxy.value() / std::sqrt(sxx.value() * syy.value());
    return std::clamp(r, -1.0, 1.0);
}

/// All requested coefficients from one concomitant pass. Pearson is left
/// empty (not an error) when a coordinate has zero variance.
[[nodiscard]] inline CoefficientSet compute_coefficients(std::span<const Point> points,
                                                         TiesPolicy policy = TiesPolicy::Strict,
                                                         CoefficientSelection which = {}) {
    CoefficientSet out;
    out.n = points.size();
    const auto c = concomitants(points, policy);
    out.ties = policy == TiesPolicy::Strict ? TieReport{} : tie_report(points);
    std::optional<double> k, s;
    if (which.kendall || which.blended_r) {
        k = detail::kendall_from_count(concordance_count_fast(c), c.size());
    }
    if (which.spearman || which.blended_r) s = detail::spearman_from_concomitants(c);
    if (which.kendall) out.kendall = k;
    if (which.spearman) out.spearman = s;
    if (which.blended_r) out.blended_r = (3.0 * *k - *s) / 2.0;
    if (which.pearson) {
        try {
            out.pearson = pearson(points);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroVariance) throw;
        }
    }
    return out;
}

}  // namespace ktau
