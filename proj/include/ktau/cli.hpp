#pragma once

// Command-line front end: estimate, theory, simulate, verify.
//
// Exit codes:
//   0  success                       4  fewer than 2 observations
//   1  verify: some verdict failed   5  parameter outside family domain
//   2  malformed CSV / expression    6  --strict-verdicts and a verdict failed
//   3  ties in strict mode           7  budget exceeded without override
//  64  usage error

#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ktau/csv.hpp"
#include "ktau/error.hpp"
#include "ktau/families.hpp"
#include "ktau/harness.hpp"
#include "ktau/rankcoef.hpp"
#include "ktau/report.hpp"
#include "ktau/seqspec.hpp"
#include "ktau/theory.hpp"

namespace ktau::cli {

enum ExitCode : int {
    kOk = 0,
    kVerifyFailed = 1,
    kMalformedInput = 2,
    kTies = 3,
    kTooFewRows = 4,
    kDomain = 5,
    kVerdictFailed = 6,
    kBudget = 7,
    kUsage = 64,
};

inline int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Syntax:
        case ErrorKind::UnknownIdentifier:
        case ErrorKind::UnknownFunction:
        case ErrorKind::Csv: return kMalformedInput;
        case ErrorKind::Ties: return kTies;
        case ErrorKind::SampleTooSmall: return kTooFewRows;
        case ErrorKind::Domain:
        case ErrorKind::DivisionByZero:
        case ErrorKind::NonFinite: return kDomain;
        case ErrorKind::Budget: return kBudget;
        case ErrorKind::ZeroVariance:
        case ErrorKind::Unsupported:
        case ErrorKind::InvalidArgument: return kUsage;
    }
    return kUsage;
}

namespace detail {

inline CoefficientSelection parse_selection(const std::string& text) {
    CoefficientSelection sel{false, false, false, false};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto name = ktau::detail::trim(item);
        if (name == "kendall") {
            sel.kendall = true;
        } else if (name == "spearman") {
            sel.spearman = true;
        } else if (name == "blended_r") {
            sel.blended_r = true;
        } else if (name == "pearson") {
            sel.pearson = true;
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown coefficient '" + std::string(name) + "'");
        }
    }
    return sel;
}

inline Json selection_json(const CoefficientSelection& s) {
    Json arr = Json::array();
    if (s.kendall) arr.push_back("kendall");
    if (s.spearman) arr.push_back("spearman");
    if (s.blended_r) arr.push_back("blended_r");
    if (s.pearson) arr.push_back("pearson");
    return arr;
}

inline TiesPolicy parse_ties(const std::string& s) {
    if (s == "strict") return TiesPolicy::Strict;
    if (s == "literal") return TiesPolicy::Literal;
    throw Error(ErrorKind::InvalidArgument, "ties policy must be strict or literal");
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    f << text;
}

struct Common {
    bool record_time = false;
};

inline void stamp_start(RunManifest& m, const Common& c) {
    if (c.record_time) m.started_at = utc_timestamp();
}

inline void stamp_end(RunManifest& m, const Common& c) {
    if (c.record_time) m.finished_at = utc_timestamp();
}

}  // namespace detail

/// Runs the CLI on `args` (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rank correlation for non-identically distributed bivariate data", "ktau"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // estimate
    auto* est = app.add_subcommand("estimate", "Coefficients of a two-column CSV sample");
    std::string csv_path;
    std::string ties = "strict";
    std::string coef_list = "kendall,spearman,blended_r,pearson";
    detail::Common est_common;
    est->add_option("csv", csv_path, "Input CSV (x,y)")->required();
    est->add_option("--ties", ties, "Tie policy: strict or literal")->capture_default_str();
    est->add_option("--coefficients", coef_list, "Comma-separated subset")->capture_default_str();
    est->add_flag("--record-time", est_common.record_time, "Record timestamps in the manifest");

    // theory
    auto* th = app.add_subcommand("theory", "Theoretical tau_n for a family and parameter sequence");
    std::string family_name, seq_text;
    std::int64_t n = 0;
    TheoryOptions topts;
    std::string summation = "compensated";
    std::vector<std::int64_t> increments;
    detail::Common th_common;
    th->add_option("--family", family_name, "normal, fgm or pareto")->required();
    th->add_option("--seq", seq_text, "Parameter sequence in i, e.g. \"3/5 - 1/i\"")->required();
    th->add_option("--n", n, "Sample size")->required();
    th->add_flag("--mc-fallback", topts.mc_fallback, "Estimate by Monte Carlo when over the pair budget");
    th->add_option("--pair-budget", topts.pair_budget, "Maximum pairs for the exact double sum")->capture_default_str();
    th->add_option("--mc-pairs", topts.mc_pairs, "Sampled pairs in Monte Carlo mode")->capture_default_str();
    th->add_option("--mc-reps", topts.mc_reps_per_pair, "Draws per sampled pair")->capture_default_str();
    th->add_option("--seed", topts.mc_seed, "Seed for Monte Carlo mode")->capture_default_str();
    th->add_option("--summation", summation, "compensated or naive")->capture_default_str();
    th->add_option("--increments", increments, "Report |tau_{m+1} - tau_m| at these m")->delimiter(',');
    th->add_flag("--record-time", th_common.record_time, "Record timestamps in the manifest");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Seeded Monte Carlo experiment");
    ExperimentConfig cfg;
    std::string sim_family, sim_seq, sim_ties = "strict", sim_coef = "kendall,spearman,blended_r,pearson";
    std::string out_path, dump_path, per_rep_path;
    bool strict_verdicts = false;
    detail::Common sim_common;
    sim->add_option("--family", sim_family, "normal, fgm or pareto")->required();
    sim->add_option("--seq", sim_seq, "Parameter sequence in i")->required();
    sim->add_option("--n", cfg.n, "Sample size")->required();
    sim->add_option("-R,--replications", cfg.replications, "Number of replications")->capture_default_str();
    sim->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    sim->add_option("--out", out_path, "Also write the JSON report here");
    sim->add_option("--dump-sample", dump_path, "Write the replication-0 sample as CSV");
    sim->add_option("--per-replication-csv", per_rep_path, "Write per-replication coefficients as CSV");
    sim->add_option("--ties", sim_ties, "Tie policy: strict or literal")->capture_default_str();
    sim->add_option("--coefficients", sim_coef, "Comma-separated subset")->capture_default_str();
    sim->add_flag("--strict-verdicts", strict_verdicts, "Exit 6 when a statistical verdict fails");
    sim->add_flag("--allow-large", cfg.allow_over_budget, "Allow R * n above the sampling budget");
    sim->add_option("--pair-budget", cfg.theory.pair_budget, "Maximum pairs for exact tau_n")->capture_default_str();
    sim->add_flag("--mc-fallback", cfg.theory.mc_fallback, "Monte Carlo tau_n when over the pair budget");
    sim->add_flag("--record-time", sim_common.record_time, "Record timestamps in the manifest");

    // verify
    auto* ver = app.add_subcommand("verify", "Run the oracle battery");
    std::uint64_t verify_seed = 20250101;
    bool as_json = false;
    VerifyOptions vopts;
    detail::Common ver_common;
    ver->add_option("--seed", verify_seed, "Master seed")->capture_default_str();
    ver->add_flag("--json", as_json, "Machine-readable output");
    ver->add_flag("--corrupt-fixture", vopts.corrupt_fgm, "Negative control: wrong FGM closed form");
    ver->add_option("--grid-reps", vopts.grid_reps, "Draws per grid pair")->capture_default_str();
    ver->add_option("--ks-draws", vopts.ks_draws, "Draws per KS test")->capture_default_str();
    ver->add_option("--kendall-cases", vopts.kendall_cases, "Random samples for fast/naive check")->capture_default_str();
    ver->add_flag("--record-time", ver_common.record_time, "Record timestamps in the manifest");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    RunManifest manifest;
    manifest.argv.assign(args.begin() + (args.empty() ? 0 : 1), args.end());

    try {
        if (*est) {
            manifest.command = "estimate";
            detail::stamp_start(manifest, est_common);
            const auto policy = detail::parse_ties(ties);
            const auto sel = detail::parse_selection(coef_list);
            const auto points = read_csv_file(csv_path);
            const auto coefs = compute_coefficients(points, policy, sel);
            if (coefs.ties.any()) {
                err << "warning: " << coefs.ties.x_pairs << " tied x-pairs, " << coefs.ties.y_pairs
                    << " tied y-pairs (literal mode)\n";
            }
            if (sel.pearson && !coefs.pearson) err << "warning: pearson undefined (zero variance)\n";
            detail::stamp_end(manifest, est_common);
            Json config{{"input", csv_path}, {"ties", ties}, {"coefficients", detail::selection_json(sel)}};
            out << make_report(manifest, std::move(config), to_json(coefs)).dump(2) << '\n';
            return kOk;
        }

        if (*th) {
            manifest.command = "theory";
            detail::stamp_start(manifest, th_common);
            const auto family = FamilySpec::parse(family_name);
            const auto seq = SeqSpec::parse(seq_text);
            if (summation == "naive") {
                topts.summation = Summation::Naive;
            } else if (summation != "compensated") {
                throw Error(ErrorKind::InvalidArgument, "summation must be compensated or naive");
            }
            if (topts.mc_fallback) manifest.seed = topts.mc_seed;
            const auto result = tau_n(family, seq, n, topts);
            Json results = to_json(result);
            if (!increments.empty()) results["increments"] = to_json(increment_diagnostics(family, seq, increments, topts));
            err << "theory: mode " << to_string(result.mode) << ", threads " << resolve_threads(topts.threads) << '\n';
            detail::stamp_end(manifest, th_common);
            Json config{{"family", family.name()},
                        {"seq", seq.source()},
                        {"seq_canonical", seq.print()},
                        {"n", n},
                        {"pair_budget", topts.pair_budget},
                        {"mc_fallback", topts.mc_fallback},
                        {"mc_pairs", topts.mc_pairs},
                        {"mc_reps_per_pair", topts.mc_reps_per_pair},
                        {"summation", summation}};
            out << make_report(manifest, std::move(config), std::move(results)).dump(2) << '\n';
            return kOk;
        }

        if (*sim) {
            manifest.command = "simulate";
            detail::stamp_start(manifest, sim_common);
            cfg.family = FamilySpec::parse(sim_family);
            cfg.seq = SeqSpec::parse(sim_seq);
            cfg.ties = detail::parse_ties(sim_ties);
            cfg.coefficients = detail::parse_selection(sim_coef);
            manifest.seed = cfg.seed;
            for (const auto* p : {&out_path, &dump_path, &per_rep_path}) {
                if (!p->empty()) manifest.outputs.push_back(*p);
            }

            Json results;
            bool verdicts_ok = true;
            if (cfg.replications == 1) {
                const auto single = run_single(cfg);
                results = to_json(single);
                if (!dump_path.empty()) {
                    std::ostringstream csv;
                    write_csv(csv, single.sample);
                    detail::write_file(dump_path, csv.str());
                }
            } else {
                const auto rep = run_replicated(cfg);
                results = to_json(rep);
                verdicts_ok = rep.bias_ok && rep.bound_ok;
                if (!dump_path.empty()) {
                    const auto t = sequence_values(cfg.family, cfg.seq, cfg.n);
                    Rng rng = Rng::stream(cfg.seed, 0);
                    std::ostringstream csv;
                    write_csv(csv, draw_sample(cfg.family, t, rng));
                    detail::write_file(dump_path, csv.str());
                }
                if (!per_rep_path.empty()) {
                    std::ostringstream csv;
                    csv << "replication,kendall,spearman,blended_r,pearson\n";
                    char buf[64];
                    auto cell = [&](const std::optional<double>& v) {
                        if (!v) return std::string();
                        std::snprintf(buf, sizeof(buf), "%.17g", *v);
                        return std::string(buf);
                    };
                    for (std::size_t r = 0; r < rep.estimates.size(); ++r) {
                        const auto& e = rep.estimates[r];
                        csv << r << ',' << cell(e.kendall) << ',' << cell(e.spearman) << ','
                            << cell(e.blended_r) << ',' << cell(e.pearson) << '\n';
                    }
                    detail::write_file(per_rep_path, csv.str());
                }
            }
            err << "simulate: threads " << resolve_threads(cfg.threads) << '\n';
            detail::stamp_end(manifest, sim_common);
            Json config{{"family", cfg.family.name()},
                        {"seq", cfg.seq.source()},
                        {"seq_canonical", cfg.seq.print()},
                        {"n", cfg.n},
                        {"replications", cfg.replications},
                        {"seed", cfg.seed},
                        {"ties", sim_ties},
                        {"coefficients", detail::selection_json(cfg.coefficients)},
                        {"pair_budget", cfg.theory.pair_budget},
                        {"mc_fallback", cfg.theory.mc_fallback},
                        {"allow_large", cfg.allow_over_budget}};
            const std::string text = make_report(manifest, std::move(config), std::move(results)).dump(2) + "\n";
            if (!out_path.empty()) detail::write_file(out_path, text);
            out << text;
            if (strict_verdicts && !verdicts_ok) {
                err << "simulate: statistical verdict failed\n";
                return kVerdictFailed;
            }
            return kOk;
        }

        if (*ver) {
            manifest.command = "verify";
            manifest.seed = verify_seed;
            detail::stamp_start(manifest, ver_common);
            const auto table = verify_suite(verify_seed, vopts);
            detail::stamp_end(manifest, ver_common);
            if (as_json) {
                Json config{{"seed", verify_seed},
                            {"grid_reps", vopts.grid_reps},
                            {"ks_draws", vopts.ks_draws},
                            {"kendall_cases", vopts.kendall_cases},
                            {"corrupt_fixture", vopts.corrupt_fgm}};
                out << make_report(manifest, std::move(config), to_json(table)).dump(2) << '\n';
            } else {
                for (const auto& v : table.verdicts) {
                    out << (v.passed ? "PASS" : "FAIL") << "  " << v.name << "  value=" << v.value
                        << "  limit=" << v.threshold << "  (" << v.detail << ")\n";
                }
                const auto passed = std::count_if(table.verdicts.begin(), table.verdicts.end(),
                                                  [](const Verdict& v) { return v.passed; });
                out << passed << "/" << table.verdicts.size() << " checks passed\n";
            }
            return table.all_passed() ? kOk : kVerifyFailed;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kUsage;
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace ktau::cli
