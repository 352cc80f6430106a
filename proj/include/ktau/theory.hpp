#pragma once

// Theoretical Kendall coefficient for independent, non-identically
// distributed vectors (X_i, Y_i) ~ F_i, i = 1..n:
//
//   tau_n = 4 / (n(n-1)) * sum_{i != j} P(X_j <= X_i, Y_j <= Y_i) - 1
//
// Per family, with p_ij from pair_expectation():
//   normal : tau_n = 4 / (pi n(n-1)) * sum_{j<i} asin((t_i + t_j)/2)
//   fgm    : tau_n = 2 sum_i t_i / (9n)
//   pareto : O(n^2) double sum; for t_i = i the single sum
//            4/(n(n-1)) sum_j j(j+1)(n-j) / ((2j+1)(n+j+1))

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ktau/error.hpp"
#include "ktau/families.hpp"
#include "ktau/parallel.hpp"
#include "ktau/rng.hpp"
#include "ktau/seqspec.hpp"
#include "ktau/summation.hpp"

namespace ktau {

enum class TheoryMode { ClosedDoubleSum, ClosedReduction, MonteCarlo };

inline const char* to_string(TheoryMode mode) noexcept {
    switch (mode) {
        case TheoryMode::ClosedDoubleSum: return "closed-double-sum";
        case TheoryMode::ClosedReduction: return "closed-reduction";
        case TheoryMode::MonteCarlo: return "monte-carlo";
    }
    return "";
}

enum class Summation { Compensated, Naive };

struct TheoryOptions {
    /// Largest number of unordered pairs the exact double sum may visit.
    std::uint64_t pair_budget = 10'000'000'000ULL;
    /// Fall back to the subsampled Monte Carlo estimate over budget.
    bool mc_fallback = false;
    std::int64_t mc_pairs = 20'000;
    std::int64_t mc_reps_per_pair = 100;
    std::uint64_t mc_seed = 0x6b74617525ULL;
    unsigned threads = 0;
    Summation summation = Summation::Compensated;
};

struct TheoryResult {
    std::int64_t n = 0;
    double tau_n = 0.0;
    TheoryMode mode = TheoryMode::ClosedDoubleSum;
    std::optional<double> standard_error;  // Monte Carlo mode only
    std::optional<double> analytic_limit;
};

/// t_1..t_n with every value checked against the family domain.
[[nodiscard]] inline std::vector<double> sequence_values(FamilySpec family, const SeqSpec& seq,
                                                         std::int64_t n) {
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
    for (std::int64_t i = 1; i <= n; ++i) {
        double v = 0.0;
        try {
            v = seq.eval(i);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(e.what()), static_cast<std::size_t>(i));
        }
        family.require(v, i);
        t.push_back(v);
    }
    return t;
}

/// Kendall tau of a single (iid) family member.
[[nodiscard]] inline double iid_tau(FamilySpec family, double t) {
    family.require(t);
    switch (family.kind()) {
        case Family::BivariateNormal: return 2.0 / std::numbers::pi * std::asin(t);
        case Family::FgmCopula: return 2.0 * t / 9.0;
        case Family::BivariatePareto: return 1.0 / (2.0 * t + 1.0);
    }
    return 0.0;
}

namespace detail {

inline void require_n(std::int64_t n) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "n must be >= 2, got " + std::to_string(n));
}

inline std::uint64_t unordered_pairs(std::int64_t n) {
    const auto u = static_cast<std::uint64_t>(n);
    return u * (u - 1) / 2;
}

/// Contribution of the unordered pair {i, j} to the ordered-pair sum.
inline double normal_pair_term(double a, double b) { return std::asin(0.5 * (a + b)); }

inline double pareto_pair_term(double a, double b) {
    const double s = a + b;
    return (a * a + a + b * b + b) / (s * (s + 1.0));
}

/// sum_{i > j} term(t_i, t_j). Rows are cut into fixed blocks, each summed
/// with its own compensated accumulator; block totals are combined in block
/// order, so the result does not depend on the thread count.
template <class Term>
double pair_sum(std::span<const double> t, Term term, Summation mode, unsigned threads) {
    const std::size_t n = t.size();
    if (mode == Summation::Naive) {
        double s = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) s += term(t[i], t[j]);
        }
        return s;
    }
    constexpr std::size_t kRowsPerBlock = 256;
    const std::size_t blocks = n <= 1 ? 0 : (n - 1 + kRowsPerBlock - 1) / kRowsPerBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(blocks, resolve_threads(threads), [&](std::size_t b) {
        const std::size_t first = 1 + b * kRowsPerBlock;
        const std::size_t last = std::min(n, first + kRowsPerBlock);
        CompensatedSum block;
        for (std::size_t i = first; i < last; ++i) {
            CompensatedSum row;
            const double ti = t[i];
            for (std::size_t j = 0; j < i; ++j) row += term(ti, t[j]);
            block += row.value();
        }
        partial[b] = block.value();
    });
    CompensatedSum total;
    for (double v : partial) total += v;
    return total.value();
}

}  // namespace detail

/// Closed form of tau_n from explicit parameters t_1..t_n (no budget check).
[[nodiscard]] inline TheoryResult tau_n_closed(FamilySpec family, std::span<const double> t,
                                               const TheoryOptions& opts = {}) {
    const auto n = static_cast<std::int64_t>(t.size());
    detail::require_n(n);
    for (std::size_t k = 0; k < t.size(); ++k) family.require(t[k], static_cast<std::int64_t>(k + 1));
    const double nn = static_cast<double>(n);
    TheoryResult out;
    out.n = n;
    switch (family.kind()) {
        case Family::BivariateNormal: {
            const double s = detail::pair_sum(t, detail::normal_pair_term, opts.summation, opts.threads);
            out.tau_n = 4.0 / (std::numbers::pi * nn * (nn - 1.0)) * s;
            out.mode = TheoryMode::ClosedDoubleSum;
            break;
        }
        case Family::FgmCopula: {
            CompensatedSum s;
            for (double v : t) s += v;
            out.tau_n = 2.0 * s.value() / (9.0 * nn);
            out.mode = TheoryMode::ClosedReduction;
            break;
        }
        case Family::BivariatePareto: {
            const double s = detail::pair_sum(t, detail::pareto_pair_term, opts.summation, opts.threads);
            out.tau_n = 4.0 * s / (nn * (nn - 1.0)) - 1.0;
            out.mode = TheoryMode::ClosedDoubleSum;
            break;
        }
    }
    return out;
}

/// Pareto tau_n for t_i = i via the single-sum reduction.
[[nodiscard]] inline double pareto_identity_tau(std::int64_t n) {
    detail::require_n(n);
    const double nn = static_cast<double>(n);
    CompensatedSum s;
    for (std::int64_t j = 1; j <= n; ++j) {
        const double jj = static_cast<double>(j);
        s += jj * (jj + 1.0) * (nn - jj) / ((2.0 * jj + 1.0) * (nn + jj + 1.0));
    }
    return 4.0 / (nn * (nn - 1.0)) * s.value();
}

/// Unbiased Monte Carlo estimate of tau_n: `pairs` ordered pairs (i, j),
/// i != j, drawn uniformly; each pair probability estimated from
/// `reps_per_pair` independent draws. The standard error comes from the
/// spread of the per-pair estimates.
[[nodiscard]] inline Estimate tau_n_mc(FamilySpec family, std::span<const double> t,
                                       std::int64_t pairs, std::int64_t reps_per_pair, Rng& rng) {
    const auto n = static_cast<std::int64_t>(t.size());
    detail::require_n(n);
    if (pairs < 2 || reps_per_pair < 1) {
        throw Error(ErrorKind::InvalidArgument, "tau_n_mc needs pairs >= 2 and reps_per_pair >= 1");
    }
    for (std::size_t k = 0; k < t.size(); ++k) family.require(t[k], static_cast<std::int64_t>(k + 1));
    CompensatedSum sum, sum_sq;
    for (std::int64_t k = 0; k < pairs; ++k) {
        const auto i = rng.below(static_cast<std::uint64_t>(n));
        auto j = rng.below(static_cast<std::uint64_t>(n - 1));
        if (j >= i) ++j;
        std::int64_t hits = 0;
        for (std::int64_t r = 0; r < reps_per_pair; ++r) {
            const Point a = sample(family, t[i], rng);
            const Point b = sample(family, t[j], rng);
            if (b.x <= a.x && b.y <= a.y) ++hits;
        }
        const double p = static_cast<double>(hits) / static_cast<double>(reps_per_pair);
        sum += p;
        sum_sq += p * p;
    }
    const double m = static_cast<double>(pairs);
    const double mean = sum.value() / m;
    const double var = std::max(0.0, (sum_sq.value() - m * mean * mean) / (m - 1.0));
    return {4.0 * mean - 1.0, 4.0 * std::sqrt(var / m)};
}

namespace detail {

inline bool same_expression(const SeqSpec& seq, const char* text) {
    return seq == SeqSpec::parse(text);
}

}  // namespace detail

/// Limit of tau_n where it is known in closed form: constant sequences
/// (the iid case, tau_n = tau for every n) and the four worked sequences.
[[nodiscard]] inline std::optional<double> known_limit(FamilySpec family, const SeqSpec& seq) {
    if (seq.is_constant()) {
        const double t = seq.eval(1);
        if (!family.contains(t)) return std::nullopt;
        return iid_tau(family, t);
    }
    switch (family.kind()) {
        case Family::BivariateNormal:
            if (detail::same_expression(seq, "sin(i)")) return 0.0;
            break;
        case Family::FgmCopula:
            if (detail::same_expression(seq, "1/i")) return 0.0;
            if (detail::same_expression(seq, "3/5 - 1/i")) return 2.0 / 15.0;
            break;
        case Family::BivariatePareto:
            // 2 * integral_0^1 x(1-x)/(1+x) dx
            if (detail::same_expression(seq, "i")) return 3.0 - 4.0 * std::numbers::ln2;
            break;
    }
    return std::nullopt;
}

/// tau_n for the sequence t_i = seq(i), i = 1..n.
[[nodiscard]] inline TheoryResult tau_n(FamilySpec family, const SeqSpec& seq, std::int64_t n,
                                        const TheoryOptions& opts = {}) {
    detail::require_n(n);
    const auto t = sequence_values(family, seq, n);
    TheoryResult out;
    const bool pareto_identity =
        family.kind() == Family::BivariatePareto && detail::same_expression(seq, "i");
    const bool quadratic = family.kind() != Family::FgmCopula && !pareto_identity;
    if (pareto_identity) {
        out.n = n;
        out.tau_n = pareto_identity_tau(n);
        out.mode = TheoryMode::ClosedReduction;
    } else if (quadratic && detail::unordered_pairs(n) > opts.pair_budget) {
        if (!opts.mc_fallback) {
            throw Error(ErrorKind::Budget, std::to_string(detail::unordered_pairs(n)) +
                                               " pairs exceed the pair budget of " +
                                               std::to_string(opts.pair_budget));
        }
        Rng rng(opts.mc_seed);
        const Estimate e = tau_n_mc(family, t, opts.mc_pairs, opts.mc_reps_per_pair, rng);
        out.n = n;
        out.tau_n = e.value;
        out.standard_error = e.se;
        out.mode = TheoryMode::MonteCarlo;
    } else {
        out = tau_n_closed(family, t, opts);
    }
    out.analytic_limit = known_limit(family, seq);
    return out;
}

struct Increment {
    std::int64_t m = 0;
    double tau_m = 0.0;
    double tau_next = 0.0;
    double delta = 0.0;  // |tau_{m+1} - tau_m|
};

/// |tau_{m+1} - tau_m| at each m in `ms` (sorted, each >= 2).
[[nodiscard]] inline std::vector<Increment> increment_diagnostics(FamilySpec family, const SeqSpec& seq,
                                                                  std::span<const std::int64_t> ms,
                                                                  const TheoryOptions& opts = {}) {
    std::vector<Increment> out;
    for (std::size_t k = 0; k < ms.size(); ++k) {
        if (ms[k] < 2) throw Error(ErrorKind::InvalidArgument, "increment points must be >= 2");
        if (k > 0 && ms[k] < ms[k - 1]) {
            throw Error(ErrorKind::InvalidArgument, "increment points must be sorted");
        }
    }
    for (std::int64_t m : ms) {
        TheoryOptions exact = opts;
        exact.mc_fallback = false;
        const double a = tau_n(family, seq, m, exact).tau_n;
        const double b = tau_n(family, seq, m + 1, exact).tau_n;
        out.push_back({m, a, b, std::fabs(b - a)});
    }
    return out;
}

/// Upper bound on Var(tau~_n):
/// 16 (n(n-1)/2 + 3 * n(n-1)(n-2)/3) / (n-1)^4.
[[nodiscard]] inline double variance_bound(std::int64_t n) {
    detail::require_n(n);
    const double nn = static_cast<double>(n);
    const double e1 = nn * (nn - 1.0) / 2.0;
    const double e234 = nn * (nn - 1.0) * (nn - 2.0);
    return 16.0 * (e1 + e234) / std::pow(nn - 1.0, 4);
}

}  // namespace ktau
