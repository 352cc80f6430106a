// Acceptance suite. `acceptance` runs every criterion; `acceptance K` runs
// criterion K only. Each criterion prints one PASS/FAIL line followed by
// indented detail lines, and the exit status is nonzero if any failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ktau/cli.hpp"
#include "ktau/ktau.hpp"

using namespace ktau;

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
    std::string what;
    bool passed;
};

class Criterion {
public:
    void check(bool ok, const char* fmt, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof(buf), fmt, args...);
        checks_.push_back({buf, ok});
    }

    [[nodiscard]] bool passed() const {
        for (const auto& c : checks_) {
            if (!c.passed) return false;
        }
        return true;
    }

    [[nodiscard]] const std::vector<Check>& checks() const { return checks_; }

private:
    std::vector<Check> checks_;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

ExperimentConfig single_run(Family family, const char* seq, std::int64_t n, std::uint64_t seed) {
    ExperimentConfig c;
    c.family = FamilySpec(family);
    c.seq = SeqSpec::parse(seq);
    c.n = n;
    c.replications = 1;
    c.seed = seed;
    c.coefficients = {true, false, false, false};
    return c;
}

// The O(n^2) theory value is checked separately; single runs only need the
// estimate, so their theory step uses the Monte Carlo path.
ExperimentConfig estimate_only(Family family, const char* seq, std::int64_t n, std::uint64_t seed) {
    auto c = single_run(family, seq, n, seed);
    c.theory.pair_budget = 1;
    c.theory.mc_fallback = true;
    c.theory.mc_pairs = 1000;
    c.theory.mc_reps_per_pair = 10;
    return c;
}

constexpr std::uint64_t kSeed = 20250101;

void normal_sin(Criterion& c) {
    const FamilySpec normal(Family::BivariateNormal);
    const auto seq = SeqSpec::parse("sin(i)");
    const auto full = tau_n(normal, seq, 100000);
    c.check(std::fabs(full.tau_n - 2.4438e-7) <= 1e-8, "tau_n(n = 100000) = %.10e, target 2.4438e-07 +- 1e-08",
            full.tau_n);

    TheoryOptions naive;
    naive.summation = Summation::Naive;
    const double comp = tau_n(normal, seq, 20000).tau_n;
    const double plain = tau_n(normal, seq, 20000, naive).tau_n;
    c.check(std::fabs(comp - plain) <= 1e-10, "n = 20000: compensated %.17g vs naive %.17g, diff %.3g <= 1e-10",
            comp, plain, std::fabs(comp - plain));

    const auto run = run_single(estimate_only(Family::BivariateNormal, "sin(i)", 100000, kSeed));
    c.check(std::fabs(*run.coefficients.kendall) <= 0.01, "single run tau~ = %.6f, |tau~| <= 0.01",
            *run.coefficients.kendall);
}

void normal_exp_sin(Criterion& c) {
    const auto start = Clock::now();
    const FamilySpec normal(Family::BivariateNormal);
    const auto seq = SeqSpec::parse("exp(-abs(sin(i)))");
    const double full = tau_n(normal, seq, 100000).tau_n;
    c.check(std::fabs(full - 0.3826) <= 5e-5, "tau_n(n = 100000) = %.8f, target 0.3826 +- 5e-05", full);

    const double reduced = tau_n(normal, seq, 20000).tau_n;
    const bool stable = std::lround(reduced * 1000) == std::lround(full * 1000);
    c.check(stable, "n = 20000: tau_n = %.8f, equal to n = 100000 at 3 decimals", reduced);

    const auto run = run_single(estimate_only(Family::BivariateNormal, "exp(-abs(sin(i)))", 100000, kSeed));
    const double est = *run.coefficients.kendall;
    c.check(std::fabs(est - 0.3826) <= 0.01, "single run tau~ = %.6f, within 0.3826 +- 0.01", est);

    const double elapsed = seconds_since(start);
    c.check(elapsed <= 600.0, "runtime %.1f s <= 600 s", elapsed);
}

void fgm(Criterion& c) {
    const FamilySpec family(Family::FgmCopula);
    {
        const auto start = Clock::now();
        const double v = tau_n(family, SeqSpec::parse("1/i"), 100000).tau_n;
        c.check(std::fabs(v - 2.686699139969650e-5) <= 1e-15, "1/i: tau_n = %.15e vs 2 H_100000 / 900000 = %.15e", v,
                2.686699139969650e-5);
        const auto run = run_single(single_run(Family::FgmCopula, "1/i", 100000, kSeed));
        c.check(std::fabs(*run.coefficients.kendall) <= 0.01, "1/i: single run tau~ = %.6f, |tau~| <= 0.01",
                *run.coefficients.kendall);
        const double elapsed = seconds_since(start);
        c.check(elapsed <= 120.0, "1/i: runtime %.2f s <= 120 s", elapsed);
    }
    {
        const auto start = Clock::now();
        const double v = tau_n(family, SeqSpec::parse("3/5 - 1/i"), 100000).tau_n;
        c.check(std::fabs(v - 2.0 / 15.0) <= 3e-4, "3/5 - 1/i: tau_n = %.10f, within 3e-04 of 2/15", v);
        const auto run = run_single(single_run(Family::FgmCopula, "3/5 - 1/i", 100000, kSeed));
        c.check(std::fabs(*run.coefficients.kendall - 0.1333) <= 0.01,
                "3/5 - 1/i: single run tau~ = %.6f, within 0.1333 +- 0.01", *run.coefficients.kendall);
        const double elapsed = seconds_since(start);
        c.check(elapsed <= 120.0, "3/5 - 1/i: runtime %.2f s <= 120 s", elapsed);
    }
}

void pareto(Criterion& c) {
    const auto start = Clock::now();
    const auto r = tau_n(FamilySpec(Family::BivariatePareto), SeqSpec::parse("i"), 100000);
    c.check(r.mode == TheoryMode::ClosedReduction && std::fabs(r.tau_n - 0.2275) <= 5e-4,
            "single-sum tau_n(n = 100000) = %.8f, within 5e-04 of 0.2275", r.tau_n);
    const auto run = run_single(single_run(Family::BivariatePareto, "i", 100000, kSeed));
    c.check(std::fabs(*run.coefficients.kendall - 0.2275) <= 0.01, "single run tau~ = %.6f, within 0.2275 +- 0.01",
            *run.coefficients.kendall);
    const double elapsed = seconds_since(start);
    c.check(elapsed <= 120.0, "runtime %.2f s <= 120 s", elapsed);
}

struct Workload {
    Family family;
    const char* seq;
};

const Workload kWorkloads[] = {{Family::BivariateNormal, "sin(i)"},
                               {Family::BivariateNormal, "exp(-abs(sin(i)))"},
                               {Family::FgmCopula, "1/i"},
                               {Family::FgmCopula, "3/5 - 1/i"},
                               {Family::BivariatePareto, "i"}};

void unbiasedness(Criterion& c) {
    const auto start = Clock::now();
    std::uint64_t seed = kSeed;
    for (const auto& w : kWorkloads) {
        for (std::int64_t n : {10, 50}) {
            ExperimentConfig cfg;
            cfg.family = FamilySpec(w.family);
            cfg.seq = SeqSpec::parse(w.seq);
            cfg.n = n;
            cfg.replications = 20000;
            cfg.seed = seed++;
            cfg.coefficients = {true, false, false, false};
            const auto r = run_replicated(cfg);
            c.check(r.bias_ok, "%s %s n = %lld: mean %.6f, tau_n %.6f, |z| = %.2f <= 4", cfg.family.name(), w.seq,
                    static_cast<long long>(n), r.kendall.mean, r.theory.tau_n, std::fabs(r.bias_z));
        }
    }
    const double elapsed = seconds_since(start);
    c.check(elapsed <= 300.0, "runtime %.1f s <= 300 s", elapsed);
}

void variance(Criterion& c) {
    std::uint64_t seed = kSeed + 100;
    for (const auto& w : kWorkloads) {
        for (std::int64_t n : {10, 50, 200}) {
            ExperimentConfig cfg;
            cfg.family = FamilySpec(w.family);
            cfg.seq = SeqSpec::parse(w.seq);
            cfg.n = n;
            cfg.replications = 10000;
            cfg.seed = seed++;
            cfg.coefficients = {true, false, false, false};
            const auto r = run_replicated(cfg);
            c.check(r.bound_ok, "%s %s n = %lld: Var = %.3e <= bound %.3e", cfg.family.name(), w.seq,
                    static_cast<long long>(n), r.kendall.variance, r.variance_bound_value);
        }
    }

    std::vector<double> fractions;
    for (std::int64_t n : {100, 1000, 10000}) {
        ExperimentConfig cfg;
        cfg.family = FamilySpec(Family::BivariateNormal);
        cfg.seq = SeqSpec::parse("exp(-abs(sin(i)))");
        cfg.n = n;
        cfg.replications = 200;
        cfg.seed = kSeed + 200;
        cfg.coefficients = {true, false, false, false};
        const auto r = run_replicated(cfg);
        int far = 0;
        for (const auto& e : r.estimates) far += std::fabs(*e.kendall - 0.3826) > 0.05;
        fractions.push_back(far / 200.0);
    }
    const bool decays = fractions[0] >= fractions[1] && fractions[1] >= fractions[2] && fractions[0] > fractions[2];
    c.check(decays, "fraction with |tau~ - 0.3826| > 0.05 at n = 1e2, 1e3, 1e4: %.3f, %.3f, %.3f (non-increasing)",
            fractions[0], fractions[1], fractions[2]);
}

void oracles(Criterion& c) {
    const auto start = Clock::now();
    VerifyOptions opts;
    opts.grid_reps = 1'000'000;
    opts.ks_draws = 100'000;
    opts.kendall_cases = 1000;
    opts.kendall_max_n = 1000;
    const auto table = verify_suite(kSeed, opts);
    for (const auto& v : table.verdicts) {
        const bool relevant = v.name.starts_with("pair-grid/") || v.name == "kendall-fast-vs-naive" ||
                              v.name.starts_with("ks-marginal/");
        if (!relevant) continue;
        c.check(v.passed, "%s: %.4g (limit %.4g; %s)", v.name.c_str(), v.value, v.threshold, v.detail.c_str());
    }
    const double elapsed = seconds_since(start);
    c.check(elapsed <= 300.0, "runtime %.1f s <= 300 s", elapsed);
}

std::string simulate_json(const std::vector<std::string>& args, const char* threads) {
    setenv("KTAU_THREADS", threads, 1);
    std::vector<std::string> full{"ktau", "simulate"};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = cli::run(full, out, err);
    unsetenv("KTAU_THREADS");
    return code == 0 ? out.str() : "exit " + std::to_string(code) + ": " + err.str();
}

void determinism(Criterion& c) {
    const std::vector<std::vector<std::string>> commands{
        {"--family", "normal", "--seq", "sin(i)", "--n", "2000", "-R", "1", "--seed", "1"},
        {"--family", "fgm", "--seq", "3/5 - 1/i", "--n", "200", "-R", "500", "--seed", "99"},
        {"--family", "pareto", "--seq", "i", "--n", "100", "-R", "300", "--seed", "7"},
        {"--family", "normal", "--seq", "exp(-abs(sin(i)))", "--n", "500", "-R", "200", "--seed", "3"}};
    for (const auto& args : commands) {
        const auto a = simulate_json(args, "1");
        const auto b = simulate_json(args, "1");
        const auto d = simulate_json(args, "4");
        const bool ok = a == b && a == d && a.starts_with("{");
        c.check(ok, "simulate --family %s --seq \"%s\" -R %s: repeat and 1 vs 4 threads byte-identical (%zu bytes)",
                args[1].c_str(), args[3].c_str(), args[7].c_str(), a.size());
    }
}

struct Entry {
    const char* name;
    std::function<void(Criterion&)> run;
};

const Entry kCriteria[] = {
    {"normal t_i = sin(i): tau_n, summation gate, single run", normal_sin},
    {"normal t_i = exp(-|sin(i)|): tau_n, stability, single run", normal_exp_sin},
    {"FGM t_i = 1/i and 3/5 - 1/i: tau_n and single runs", fgm},
    {"Pareto t_i = i: single-sum tau_n and single run", pareto},
    {"unbiasedness of tau~_n, n in {10, 50}, R = 20000", unbiasedness},
    {"variance bound, n in {10, 50, 200}, R = 10000; rejection-fraction decay", variance},
    {"oracle equivalence: pair grids, fast vs naive Kendall, KS marginals", oracles},
    {"determinism of simulate across repeats and thread counts", determinism},
};

bool run_criterion(std::size_t k) {
    Criterion c;
    const auto start = Clock::now();
    try {
        kCriteria[k].run(c);
    } catch (const std::exception& e) {
        c.check(false, "exception: %s", e.what());
    }
    std::printf("%s  %zu  %s  [%.1f s]\n", c.passed() ? "PASS" : "FAIL", k + 1, kCriteria[k].name,
                seconds_since(start));
    for (const auto& chk : c.checks()) std::printf("      %s  %s\n", chk.passed ? "ok  " : "MISS", chk.what.c_str());
    std::fflush(stdout);
    return c.passed();
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t count = std::size(kCriteria);
    if (argc > 1) {
        const long k = std::strtol(argv[1], nullptr, 10);
        if (k < 1 || static_cast<std::size_t>(k) > count) {
            std::fprintf(stderr, "usage: acceptance [1-%zu]\n", count);
            return 64;
        }
        return run_criterion(static_cast<std::size_t>(k - 1)) ? 0 : 1;
    }
    int failed = 0;
    for (std::size_t k = 0; k < count; ++k) failed += !run_criterion(k);
    std::printf("%zu/%zu criteria passed\n", count - failed, count);
    return failed == 0 ? 0 : 1;
}
