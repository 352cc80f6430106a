#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "ktau/theory.hpp"

using namespace ktau;

namespace {

const FamilySpec kNormal(Family::BivariateNormal);
const FamilySpec kFgm(Family::FgmCopula);
const FamilySpec kPareto(Family::BivariatePareto);

// Direct ordered-pair oracle: 4/(n(n-1)) * sum_{i != j} p(t_i, t_j) - 1 with
// the per-ordered-pair probability written out independently.
double ordered_pair_oracle(FamilySpec family, const std::vector<double>& t) {
    long double s = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (i == j) continue;
            const long double a = t[i], b = t[j];
            switch (family.kind()) {
                case Family::BivariateNormal:
                    s += std::asin((a + b) / 2) / (2 * std::numbers::pi_v<long double>) + 0.25L;
                    break;
                case Family::FgmCopula: s += 0.25L + (a + b) / 36; break;
                case Family::BivariatePareto: s += (b * b + b) / ((a + b) * (a + b + 1)); break;
            }
        }
    }
    const long double n = t.size();
    return static_cast<double>(4 * s / (n * (n - 1)) - 1);
}

}  // namespace

TEST(TauClosed, NormalConstantMatchesArcsine) {
    for (double t : {-0.8, 0.0, 0.3, 0.5, 0.95}) {
        const std::vector<double> ts(40, t);
        EXPECT_NEAR(tau_n_closed(kNormal, ts).tau_n, 2.0 / std::numbers::pi * std::asin(t), 1e-14);
    }
    EXPECT_NEAR(iid_tau(kNormal, 0.5), 1.0 / 3.0, 1e-15);
}

TEST(TauClosed, NormalTwoPoints) {
    // (2/pi) asin(1/2) = 1/3; t = 1 itself lies outside the open domain.
    const std::vector<double> t{0.0, 1.0 - 1e-15};
    EXPECT_NEAR(tau_n_closed(kNormal, t).tau_n, 1.0 / 3.0, 1e-14);
}

TEST(TauClosed, FgmIsScaledMean) {
    const auto inv = SeqSpec::parse("1/i");
    EXPECT_NEAR(tau_n(kFgm, inv, 1000).tau_n, 0.001663437969011188, 1e-15);
    EXPECT_NEAR(tau_n(kFgm, inv, 100000).tau_n, 2.686699139969650e-5, 1e-17);
    const auto shifted = SeqSpec::parse("3/5 - 1/i");
    EXPECT_NEAR(tau_n(kFgm, shifted, 50).tau_n, 0.113336865162980333, 1e-15);
    EXPECT_NEAR(iid_tau(kFgm, 0.9), 0.2, 1e-15);
}

TEST(TauClosed, AgreesWithOrderedPairOracle) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(150);
        std::vector<double> tn, tf, tp;
        for (std::size_t i = 0; i < n; ++i) {
            tn.push_back(1.98 * rng.uniform() - 0.99);
            tf.push_back(2.0 * rng.uniform() - 1.0);
            tp.push_back(0.1 + 10.0 * rng.uniform());
        }
        EXPECT_NEAR(tau_n_closed(kNormal, tn).tau_n, ordered_pair_oracle(kNormal, tn), 1e-13);
        EXPECT_NEAR(tau_n_closed(kFgm, tf).tau_n, ordered_pair_oracle(kFgm, tf), 1e-13);
        EXPECT_NEAR(tau_n_closed(kPareto, tp).tau_n, ordered_pair_oracle(kPareto, tp), 1e-13);
    }
}

TEST(TauClosed, ParetoReductionMatchesDoubleSum) {
    for (std::int64_t n : {2, 3, 10, 137, 500, 2000}) {
        std::vector<double> t(static_cast<std::size_t>(n));
        std::iota(t.begin(), t.end(), 1.0);
        const double dbl = tau_n_closed(kPareto, t).tau_n;
        const double single = pareto_identity_tau(n);
        EXPECT_LE(std::fabs(dbl - single), 1e-10 * std::fabs(single)) << "n=" << n;
    }
    const auto r = tau_n(kPareto, SeqSpec::parse("i"), 100000);
    EXPECT_EQ(r.mode, TheoryMode::ClosedReduction);
    EXPECT_NEAR(r.tau_n, 0.2275, 5e-4);
    ASSERT_TRUE(r.analytic_limit);
    EXPECT_NEAR(*r.analytic_limit, 0.22741127776021886, 1e-15);
}

TEST(TauClosed, ParetoConstant) {
    const std::vector<double> t(30, 1.0);
    EXPECT_NEAR(tau_n_closed(kPareto, t).tau_n, 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(iid_tau(kPareto, 2.0), 0.2, 1e-15);
}

TEST(TauClosed, PermutationInvariant) {
    Rng rng(17);
    std::vector<double> t;
    for (int i = 0; i < 300; ++i) t.push_back(1.8 * rng.uniform() - 0.9);
    const double before = tau_n_closed(kNormal, t).tau_n;
    for (std::size_t i = t.size(); i > 1; --i) std::swap(t[i - 1], t[rng.below(i)]);
    EXPECT_NEAR(tau_n_closed(kNormal, t).tau_n, before, 1e-14);
}

TEST(TauClosed, RangeIsWithinMinusOneOne) {
    for (double t : {-0.999999, 0.999999}) {
        const std::vector<double> ts(10, t);
        const double v = tau_n_closed(kNormal, ts).tau_n;
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(TauClosed, ThreadCountDoesNotChangeBits) {
    const auto seq = SeqSpec::parse("sin(i)");
    TheoryOptions one, four;
    one.threads = 1;
    four.threads = 4;
    EXPECT_EQ(tau_n(kNormal, seq, 3000, one).tau_n, tau_n(kNormal, seq, 3000, four).tau_n);
}

TEST(TauClosed, CompensatedAndNaiveAgree) {
    const auto seq = SeqSpec::parse("sin(i)");
    TheoryOptions naive;
    naive.summation = Summation::Naive;
    const double a = tau_n(kNormal, seq, 5000).tau_n;
    const double b = tau_n(kNormal, seq, 5000, naive).tau_n;
    EXPECT_LE(std::fabs(a - b), 1e-10);
}

TEST(TauClosed, DomainErrorNamesIndex) {
    try {
        (void)tau_n(kFgm, SeqSpec::parse("i / 3"), 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
        EXPECT_NE(std::string(e.what()).find("i = 4"), std::string::npos) << e.what();
    }
    EXPECT_THROW((void)tau_n(kNormal, SeqSpec::parse("0"), 1), Error);
    EXPECT_THROW((void)tau_n(kPareto, SeqSpec::parse("i - 1"), 5), Error);
}

TEST(TauClosed, BudgetAndMonteCarloFallback) {
    TheoryOptions opts;
    opts.pair_budget = 1000;
    const auto seq = SeqSpec::parse("1/2");
    try {
        (void)tau_n(kNormal, seq, 100, opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Budget);
    }
    opts.mc_fallback = true;
    opts.mc_pairs = 5000;
    opts.mc_reps_per_pair = 200;
    const auto r = tau_n(kNormal, seq, 100, opts);
    EXPECT_EQ(r.mode, TheoryMode::MonteCarlo);
    ASSERT_TRUE(r.standard_error);
    EXPECT_LE(std::fabs(r.tau_n - 1.0 / 3.0), 4.0 * *r.standard_error);
    // The FGM closed form is linear and never subject to the pair budget.
    EXPECT_EQ(tau_n(kFgm, seq, 100000, TheoryOptions{.pair_budget = 1}).mode, TheoryMode::ClosedReduction);
}

TEST(TauMonteCarlo, MatchesClosedForms) {
    struct Case {
        FamilySpec family;
        std::vector<double> t;
        double expected;
    };
    std::vector<double> inv(1000);
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / static_cast<double>(i + 1);
    const Case cases[] = {{kNormal, std::vector<double>(100, 0.5), 1.0 / 3.0},
                          {kFgm, inv, 0.001663437969011188},
                          {kPareto, std::vector<double>(100, 1.0), 1.0 / 3.0}};
    std::uint64_t seed = 40;
    for (const auto& c : cases) {
        Rng rng(seed++);
        const Estimate e = tau_n_mc(c.family, c.t, 4000, 250, rng);
        EXPECT_GT(e.se, 0.0);
        EXPECT_LE(std::fabs(e.value - c.expected), 4.0 * e.se) << c.family.name();
    }
}

TEST(Increments, FgmInverseAtTen) {
    const std::int64_t ms[] = {10};
    const auto inc = increment_diagnostics(kFgm, SeqSpec::parse("1/i"), ms);
    ASSERT_EQ(inc.size(), 1u);
    EXPECT_NEAR(inc[0].delta, 0.00408056029268150480, 1e-16);
}

TEST(Increments, DecayForWorkedSequences) {
    const std::int64_t ms[] = {100, 1000, 5000};
    for (const char* s : {"3/5 - 1/i", "1/i"}) {
        const auto inc = increment_diagnostics(kFgm, SeqSpec::parse(s), ms);
        EXPECT_GT(inc[0].delta, inc[1].delta);
        EXPECT_GT(inc[1].delta, inc[2].delta);
    }
    const auto pareto = increment_diagnostics(kPareto, SeqSpec::parse("i"), ms);
    EXPECT_GT(pareto[0].delta, pareto[2].delta);
    const std::int64_t unsorted[] = {10, 5};
    EXPECT_THROW((void)increment_diagnostics(kFgm, SeqSpec::parse("1/i"), unsorted), Error);
}

TEST(VarianceBound, Examples) {
    EXPECT_DOUBLE_EQ(variance_bound(2), 16.0);
    EXPECT_NEAR(variance_bound(11), 1.672, 1e-12);
    EXPECT_GT(variance_bound(10), variance_bound(100));
    EXPECT_THROW((void)variance_bound(1), Error);
}

TEST(KnownLimit, Table) {
    EXPECT_EQ(known_limit(kNormal, SeqSpec::parse("sin(i)")), 0.0);
    EXPECT_EQ(known_limit(kFgm, SeqSpec::parse("1/i")), 0.0);
    EXPECT_NEAR(*known_limit(kFgm, SeqSpec::parse("3/5 - 1/i")), 2.0 / 15.0, 1e-16);
    EXPECT_NEAR(*known_limit(kNormal, SeqSpec::parse("1/2")), 1.0 / 3.0, 1e-15);
    EXPECT_FALSE(known_limit(kNormal, SeqSpec::parse("exp(-abs(sin(i)))")));
}
