#pragma once

// Seeded Monte Carlo experiments on non-identically distributed samples.
//
// Replication r draws its sample from Rng::stream(seed, r), and every
// per-replication value is stored at index r before aggregation, so a
// report depends only on the config, never on scheduling or thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ktau/error.hpp"
#include "ktau/families.hpp"
#include "ktau/parallel.hpp"
#include "ktau/rankcoef.hpp"
#include "ktau/rng.hpp"
#include "ktau/seqspec.hpp"
#include "ktau/stats.hpp"
#include "ktau/theory.hpp"

namespace ktau {

/// Largest R * n (sampled points) accepted without an explicit override.
inline constexpr std::uint64_t kSampleBudget = 1'000'000'000ULL;

/// |bias z| above this fails the unbiasedness verdict.
inline constexpr double kBiasZThreshold = 4.0;

struct ExperimentConfig {
    FamilySpec family{Family::BivariateNormal};
    SeqSpec seq = SeqSpec::parse("0");
    std::int64_t n = 2;
    std::int64_t replications = 1;
    std::uint64_t seed = 0;
    CoefficientSelection coefficients{};
    TiesPolicy ties = TiesPolicy::Strict;
    bool allow_over_budget = false;
    TheoryOptions theory{};
    unsigned threads = 0;
};

struct SingleRunReport {
    TheoryResult theory;
    CoefficientSet coefficients;
    std::vector<Point> sample;
};

struct CoefficientSummary {
    std::string name;
    Summary summary;
    double ci_low = 0.0;  // 99%
    double ci_high = 0.0;
};

struct ReplicationReport {
    TheoryResult theory;
    std::vector<CoefficientSet> estimates;  // index = replication
    std::vector<CoefficientSummary> summaries;
    Summary kendall;
    double variance_bound_value = 0.0;
    double bias_z = 0.0;
    bool bias_ok = false;
    bool bound_ok = false;
};

/// One independent draw (X_i, Y_i) ~ family(t_i) for each i.
[[nodiscard]] inline std::vector<Point> draw_sample(FamilySpec family, std::span<const double> t, Rng& rng) {
    std::vector<Point> out;
    out.reserve(t.size());
    for (double ti : t) out.push_back(sample(family, ti, rng));
    return out;
}

namespace detail {

inline void validate_config(const ExperimentConfig& c) {
    require_n(c.n);
    if (c.replications < 1) throw Error(ErrorKind::InvalidArgument, "replications must be >= 1");
    const auto points = static_cast<std::uint64_t>(c.n) * static_cast<std::uint64_t>(c.replications);
    if (points > kSampleBudget && !c.allow_over_budget) {
        throw Error(ErrorKind::Budget, "R * n = " + std::to_string(points) +
                                           " sampled points exceeds the budget of " +
                                           std::to_string(kSampleBudget));
    }
}

inline TheoryResult theory_for(const ExperimentConfig& c) {
    TheoryOptions opts = c.theory;
    if (opts.threads == 0) opts.threads = c.threads;
    return tau_n(c.family, c.seq, c.n, opts);
}

inline double z_score(double mean, double target, double se) {
    const double diff = mean - target;
    if (se > 0.0) return diff / se;
    if (diff == 0.0) return 0.0;
    return std::copysign(INFINITY, diff);
}

inline CoefficientSummary summarize_coefficient(const std::string& name, std::span<const double> xs) {
    CoefficientSummary cs;
    cs.name = name;
    cs.summary = summarize(xs);
    cs.ci_low = cs.summary.mean - kZ99 * cs.summary.se;
    cs.ci_high = cs.summary.mean + kZ99 * cs.summary.se;
    return cs;
}

}  // namespace detail

/// One replication (stream 0): sample, coefficients and theoretical tau_n.
[[nodiscard]] inline SingleRunReport run_single(const ExperimentConfig& config) {
    detail::validate_config(config);
    const auto t = sequence_values(config.family, config.seq, config.n);
    SingleRunReport report;
    report.theory = detail::theory_for(config);
    Rng rng = Rng::stream(config.seed, 0);
    report.sample = draw_sample(config.family, t, rng);
    report.coefficients = compute_coefficients(report.sample, config.ties, config.coefficients);
    return report;
}

[[nodiscard]] inline ReplicationReport run_replicated(const ExperimentConfig& config) {
    detail::validate_config(config);
    if (config.replications < 2) {
        throw Error(ErrorKind::InvalidArgument, "run_replicated needs at least 2 replications");
    }
    const auto t = sequence_values(config.family, config.seq, config.n);
    ReplicationReport report;
    report.theory = detail::theory_for(config);

    CoefficientSelection which = config.coefficients;
    which.kendall = true;
    const auto reps = static_cast<std::size_t>(config.replications);
    report.estimates.resize(reps);
    parallel_for(reps, resolve_threads(config.threads), [&](std::size_t r) {
        Rng rng = Rng::stream(config.seed, r);
        const auto pts = draw_sample(config.family, t, rng);
        report.estimates[r] = compute_coefficients(pts, config.ties, which);
    });

    auto column = [&](auto member) {
        std::vector<double> xs;
        xs.reserve(reps);
        for (const auto& e : report.estimates) {
            if ((e.*member).has_value()) xs.push_back(*(e.*member));
        }
        return xs;
    };
    const auto kendalls = column(&CoefficientSet::kendall);
    report.summaries.push_back(detail::summarize_coefficient("kendall", kendalls));
    if (which.spearman) report.summaries.push_back(detail::summarize_coefficient("spearman", column(&CoefficientSet::spearman)));
    if (which.blended_r) report.summaries.push_back(detail::summarize_coefficient("blended_r", column(&CoefficientSet::blended_r)));
    if (which.pearson) report.summaries.push_back(detail::summarize_coefficient("pearson", column(&CoefficientSet::pearson)));

    report.kendall = report.summaries.front().summary;
    report.variance_bound_value = variance_bound(config.n);
    report.bias_z = detail::z_score(report.kendall.mean, report.theory.tau_n, report.kendall.se);
    report.bias_ok = std::fabs(report.bias_z) <= kBiasZThreshold;
    report.bound_ok = report.kendall.variance <= report.variance_bound_value;
    return report;
}

// ---------------------------------------------------------------------------
// Oracle battery

struct Verdict {
    std::string name;
    bool passed = false;
    double value = 0.0;      // observed statistic
    double threshold = 0.0;  // pass limit for `value`
    std::string detail;
};

struct VerdictTable {
    std::uint64_t seed = 0;
    std::vector<Verdict> verdicts;

    [[nodiscard]] bool all_passed() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
    }
};

struct VerifyOptions {
    std::int64_t grid_reps = 1'000'000;
    std::int64_t ks_draws = 100'000;
    std::int64_t kendall_cases = 1'000;
    std::int64_t kendall_max_n = 1'000;
    /// Negative control: check the FGM grid against a deliberately wrong
    /// closed form (1/4 + (t_i + t_j)/18).
    bool corrupt_fgm = false;
    unsigned threads = 0;
};

namespace detail {

// Fixed stream indices so each check draws the same numbers regardless of
// which other checks run.
enum VerifyStream : std::uint64_t {
    kGridNormal = 1000,
    kGridFgm = 2000,
    kGridPareto = 3000,
    kKendall = 4000,
    kKs = 5000,
    kConstant = 6000,
};

inline Verdict grid_check(FamilySpec family, std::span<const double> values, std::uint64_t seed,
                          std::uint64_t stream_base, const VerifyOptions& opts,
                          const std::function<double(double, double)>& closed) {
    std::vector<std::pair<double, double>> grid;
    for (double a : values) {
        for (double b : values) grid.emplace_back(a, b);
    }
    std::vector<double> z(grid.size());
    parallel_for(grid.size(), resolve_threads(opts.threads), [&](std::size_t k) {
        Rng rng = Rng::stream(seed, stream_base + k);
        const auto [a, b] = grid[k];
        const Estimate e = pair_prob_mc(family, a, b, opts.grid_reps, rng);
        z[k] = std::fabs(z_score(e.value, closed(a, b), e.se));
    });
    const auto worst = std::max_element(z.begin(), z.end());
    const std::size_t failures = static_cast<std::size_t>(
        std::count_if(z.begin(), z.end(), [](double v) { return !(v <= 4.0); }));
    Verdict v;
    v.name = std::string("pair-grid/") + family.name();
    v.value = *worst;
    v.threshold = 4.0;
    v.passed = failures == 0;
    const auto [wa, wb] = grid[static_cast<std::size_t>(worst - z.begin())];
    v.detail = std::to_string(grid.size()) + " pairs, " + std::to_string(failures) +
               " beyond 4 SE; worst at (" + detail::format_double(wa) + ", " +
               detail::format_double(wb) + ")";
    return v;
}

inline Verdict kendall_equivalence(std::uint64_t seed, const VerifyOptions& opts) {
    const auto cases = static_cast<std::size_t>(opts.kendall_cases);
    std::vector<char> same(cases, 0);
    parallel_for(cases, resolve_threads(opts.threads), [&](std::size_t k) {
        Rng rng = Rng::stream(seed, kKendall + k);
        const auto n = static_cast<std::size_t>(2 + rng.below(static_cast<std::uint64_t>(opts.kendall_max_n - 1)));
        const double t = 2.0 * rng.uniform() - 1.0;
        std::vector<Point> pts;
        pts.reserve(n);
        for (std::size_t i = 0; i < n; ++i) pts.push_back(sample(FamilySpec(Family::BivariateNormal), t, rng));
        const auto c = concomitants(pts, TiesPolicy::Literal);
        same[k] = concordance_count_naive(c) == concordance_count_fast(c) &&
                  kendall_naive(pts, TiesPolicy::Literal) == kendall_fast(pts, TiesPolicy::Literal);
    });
    const auto mismatches = static_cast<double>(std::count(same.begin(), same.end(), 0));
    return {"kendall-fast-vs-naive", mismatches == 0.0, mismatches, 0.0,
            std::to_string(cases) + " random samples, n in [2, " + std::to_string(opts.kendall_max_n) + "]"};
}

inline std::vector<Verdict> ks_checks(std::uint64_t seed, const VerifyOptions& opts) {
    struct Case {
        FamilySpec family;
        double t;
    };
    const Case cases[] = {{FamilySpec(Family::BivariateNormal), 0.6},
                          {FamilySpec(Family::FgmCopula), 0.8},
                          {FamilySpec(Family::BivariatePareto), 1.5}};
    const auto draws = static_cast<std::size_t>(opts.ks_draws);
    const double crit = ks_critical(draws, 0.001);
    std::vector<Verdict> out;
    for (std::size_t c = 0; c < std::size(cases); ++c) {
        Rng rng = Rng::stream(seed, kKs + c);
        std::vector<double> xs, ys;
        xs.reserve(draws);
        ys.reserve(draws);
        for (std::size_t k = 0; k < draws; ++k) {
            const Point p = sample(cases[c].family, cases[c].t, rng);
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        auto marginal = [&](double v) { return marginal_cdf(cases[c].family, cases[c].t, v); };
        const double dx = ks_statistic(std::move(xs), marginal);
        const double dy = ks_statistic(std::move(ys), marginal);
        const std::string base = std::string("ks-marginal/") + cases[c].family.name();
        const std::string info = "t = " + format_double(cases[c].t) + ", " + std::to_string(draws) + " draws, alpha 0.001";
        out.push_back({base + "/x", dx <= crit, dx, crit, info});
        out.push_back({base + "/y", dy <= crit, dy, crit, info});
    }
    return out;
}

inline Verdict fgm_inversion_check() {
    double worst = 0.0;
    for (int ti = -8; ti <= 8; ++ti) {
        const double t = ti / 8.0;
        for (int xi = 0; xi <= 200; ++xi) {
            const double x = (xi + 0.5) / 201.0;
            for (int ui = 0; ui <= 200; ++ui) {
                const double u = (ui + 0.5) / 201.0;
                const double y = fgm_conditional_quantile(t, x, u);
                worst = std::max(worst, std::fabs(fgm_conditional_cdf(t, x, y) - u));
            }
        }
    }
    return {"fgm-inversion", worst <= 1e-10, worst, 1e-10, "17 x 201 x 201 grid of (t, x, u)"};
}

inline std::vector<Verdict> constant_checks(std::uint64_t seed, const VerifyOptions& opts) {
    struct Case {
        FamilySpec family;
        double t;
    };
    const Case cases[] = {{FamilySpec(Family::BivariateNormal), 0.5},
                          {FamilySpec(Family::FgmCopula), -0.7},
                          {FamilySpec(Family::BivariatePareto), 1.0}};
    std::vector<Verdict> out;
    for (std::size_t c = 0; c < std::size(cases); ++c) {
        const auto [family, t] = cases[c];
        const std::vector<double> params(50, t);
        TheoryOptions topts;
        topts.threads = opts.threads;
        const double closed = tau_n_closed(family, params, topts).tau_n;
        const double iid = iid_tau(family, t);
        const double err = std::fabs(closed - iid);
        const std::string base = std::string("constant-sequence/") + family.name();
        out.push_back({base + "/closed", err <= 1e-12, err, 1e-12,
                       "tau_n vs iid tau at t = " + format_double(t)});
        Rng rng = Rng::stream(seed, kConstant + c);
        const Estimate e = tau_n_mc(family, params, 4000, 250, rng);
        const double z = std::fabs(z_score(e.value, iid, e.se));
        out.push_back({base + "/monte-carlo", z <= 4.0, z, 4.0, "|z| of tau_n_mc against iid tau"});
    }
    return out;
}

inline Verdict pareto_reduction_check(const VerifyOptions& opts) {
    constexpr std::int64_t n = 2000;
    std::vector<double> t(n);
    std::iota(t.begin(), t.end(), 1.0);
    TheoryOptions topts;
    topts.threads = opts.threads;
    const double dbl = tau_n_closed(FamilySpec(Family::BivariatePareto), t, topts).tau_n;
    const double single = pareto_identity_tau(n);
    const double rel = std::fabs(dbl - single) / std::fabs(single);
    return {"pareto-single-sum", rel <= 1e-10, rel, 1e-10, "double sum vs single-sum reduction, t_i = i, n = 2000"};
}

inline std::vector<Verdict> increment_checks(const VerifyOptions& opts) {
    struct Case {
        FamilySpec family;
        const char* seq;
    };
    const Case cases[] = {{FamilySpec(Family::BivariateNormal), "sin(i)"},
                          {FamilySpec(Family::BivariateNormal), "exp(-abs(sin(i)))"},
                          {FamilySpec(Family::FgmCopula), "1/i"},
                          {FamilySpec(Family::FgmCopula), "3/5 - 1/i"},
                          {FamilySpec(Family::BivariatePareto), "i"}};
    const std::int64_t ms[] = {100, 1000, 10000};
    TheoryOptions topts;
    topts.threads = opts.threads;
    std::vector<Verdict> out;
    for (const auto& c : cases) {
        const auto inc = increment_diagnostics(c.family, SeqSpec::parse(c.seq), ms, topts);
        bool decreasing = true;
        for (std::size_t k = 1; k < inc.size(); ++k) decreasing = decreasing && inc[k].delta < inc[k - 1].delta;
        std::string info;
        for (const auto& d : inc) info += (info.empty() ? "" : ", ") + std::to_string(d.m) + ": " + format_double(d.delta);
        out.push_back({std::string("increment-decay/") + c.family.name() + "/" + c.seq, decreasing,
                       inc.back().delta, inc.front().delta, info});
    }
    return out;
}

}  // namespace detail

/// Runs the full oracle battery. Failures are reported as verdicts.
[[nodiscard]] inline VerdictTable verify_suite(std::uint64_t seed, const VerifyOptions& opts = {}) {
    VerdictTable table;
    table.seed = seed;
    auto& v = table.verdicts;

    const double normal_grid[] = {-0.9, -0.4, 0.0, 0.5, 0.9};
    const double fgm_grid[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    const double pareto_grid[] = {0.5, 1.0, 2.0, 5.0, 20.0};
    const FamilySpec normal(Family::BivariateNormal), fgm(Family::FgmCopula), pareto(Family::BivariatePareto);

    v.push_back(detail::grid_check(normal, normal_grid, seed, detail::kGridNormal, opts,
                                   [&](double a, double b) { return pair_expectation(normal, a, b); }));
    v.push_back(detail::grid_check(fgm, fgm_grid, seed, detail::kGridFgm, opts, [&](double a, double b) {
        return opts.corrupt_fgm ? 0.25 + (a + b) / 18.0 : pair_expectation(fgm, a, b);
    }));
    v.push_back(detail::grid_check(pareto, pareto_grid, seed, detail::kGridPareto, opts,
                                   [&](double a, double b) { return pair_expectation(pareto, a, b); }));
    v.push_back(detail::kendall_equivalence(seed, opts));
    for (auto& k : detail::ks_checks(seed, opts)) v.push_back(std::move(k));
    v.push_back(detail::fgm_inversion_check());
    for (auto& k : detail::constant_checks(seed, opts)) v.push_back(std::move(k));
    v.push_back(detail::pareto_reduction_check(opts));
    for (auto& k : detail::increment_checks(opts)) v.push_back(std::move(k));
    return table;
}

}  // namespace ktau
