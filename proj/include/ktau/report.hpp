#pragma once

// JSON report schema. Every report is an object with three members, in
// this order:
//
//   manifest : { command, argv, tool_version, seed, started_at, finished_at, outputs }
//   config   : echo of the effective configuration
//   results  : command-specific payload
//
// Field order is fixed (ordered_json) so equal inputs give byte-equal text.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ktau/harness.hpp"
#include "ktau/rankcoef.hpp"
#include "ktau/theory.hpp"

namespace ktau {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> started_at;
    std::optional<std::string> finished_at;
    std::vector<std::string> outputs;
};

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

}  // namespace detail

inline Json to_json(const RunManifest& m) {
    Json j;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["tool_version"] = kToolVersion;
    j["seed"] = detail::optional_json(m.seed);
    j["started_at"] = detail::optional_json(m.started_at);
    j["finished_at"] = detail::optional_json(m.finished_at);
    j["outputs"] = m.outputs;
    return j;
}

inline Json to_json(const CoefficientSet& c) {
    Json j;
    j["n"] = c.n;
    j["kendall"] = detail::optional_json(c.kendall);
    j["spearman"] = detail::optional_json(c.spearman);
    j["blended_r"] = detail::optional_json(c.blended_r);
    j["pearson"] = detail::optional_json(c.pearson);
    j["ties"] = {{"x_pairs", c.ties.x_pairs}, {"y_pairs", c.ties.y_pairs}};
    return j;
}

inline Json to_json(const TheoryResult& r) {
    Json j;
    j["n"] = r.n;
    j["tau_n"] = r.tau_n;
    j["mode"] = to_string(r.mode);
    j["standard_error"] = detail::optional_json(r.standard_error);
    j["analytic_limit"] = detail::optional_json(r.analytic_limit);
    return j;
}

inline Json to_json(const std::vector<Increment>& incs) {
    Json arr = Json::array();
    for (const auto& d : incs) {
        arr.push_back({{"m", d.m}, {"tau_m", d.tau_m}, {"tau_next", d.tau_next}, {"delta", d.delta}});
    }
    return arr;
}

inline Json to_json(const CoefficientSummary& s) {
    Json j;
    j["count"] = s.summary.count;
    j["mean"] = s.summary.mean;
    j["sd"] = s.summary.sd;
    j["variance"] = s.summary.variance;
    j["standard_error"] = s.summary.se;
    j["ci99"] = {s.ci_low, s.ci_high};
    return j;
}

inline Json to_json(const SingleRunReport& r) {
    Json j;
    j["theory"] = to_json(r.theory);
    j["coefficients"] = to_json(r.coefficients);
    return j;
}

inline Json to_json(const ReplicationReport& r) {
    Json j;
    j["theory"] = to_json(r.theory);
    j["replications"] = r.estimates.size();
    Json summaries;
    for (const auto& s : r.summaries) summaries[s.name] = to_json(s);
    j["summaries"] = summaries;
    j["variance_bound"] = r.variance_bound_value;
    j["bias_z"] = r.bias_z;
    j["verdicts"] = {{"bias", r.bias_ok}, {"variance_bound", r.bound_ok}};
    return j;
}

inline Json to_json(const VerdictTable& t) {
    Json j;
    j["all_passed"] = t.all_passed();
    Json arr = Json::array();
    for (const auto& v : t.verdicts) {
        arr.push_back({{"name", v.name},
                       {"passed", v.passed},
                       {"value", v.value},
                       {"threshold", v.threshold},
                       {"detail", v.detail}});
    }
    j["verdicts"] = arr;
    return j;
}

inline Json make_report(const RunManifest& manifest, Json config, Json results) {
    Json j;
    j["manifest"] = to_json(manifest);
    j["config"] = std::move(config);
    j["results"] = std::move(results);
    return j;
}

}  // namespace ktau
