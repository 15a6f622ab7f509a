#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace locdep {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

// Validated experiment configuration.  The seed is mandatory: runs are pure
// functions of the config, never of the wall clock.
struct ExperimentConfig {
    nlohmann::json model;                     // fields-module model spec
    nlohmann::json system = "derive";         // "derive" or an explicit system document
    std::vector<std::string> theorems;
    std::uint64_t replicates = 10000;
    std::uint64_t seed = 0;
    double delta = 1e-3;
    std::optional<double> p;                  // per-experiment moment-order override
    std::vector<double> zgrid;
    std::vector<std::int64_t> sizes;          // rate-study ladder
    int threads = 1;
    std::string out_dir;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// FNV-1a content hash used to fingerprint model specs in reports.
std::uint64_t fnv1a64(const std::string& text);

// Distance + requested theorem bounds + dominance verdicts; the report embeds
// the config and is re-runnable from it.
nlohmann::json run_experiment(const ExperimentConfig& config);

// Kolmogorov distance across the size ladder with a log-log rate fit.
nlohmann::json run_rate_study(const ExperimentConfig& config);

// True iff every non-C-free verdict in the report passed.
bool report_all_pass(const nlohmann::json& report);

// Write any profile blocks in the report as CSV (header z,abs_diff,se);
// returns the paths written.
std::vector<std::string> write_profile_csv(const nlohmann::json& report,
                                           const std::string& out_dir);

}  // namespace locdep
