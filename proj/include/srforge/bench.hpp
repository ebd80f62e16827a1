// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srforge/metrics.hpp"
#include "srforge/search.hpp"
#include "srforge/suite.hpp"

namespace srforge {

struct RecoveryResult {
    bool recovered = false;
    double heldout_r2 = 0.0;
    std::vector<double> constants; // refit values
};

// Refits the candidate's constants (placeholders and literals alike) on a
// fresh sample of the truth, then scores 256 further fresh points; recovered
// iff that held-out R^2 >= 1 - 1e-9.
RecoveryResult recovery_check(const ExprTree& candidate, std::span<const double> constants, const BenchmarkCase& truth,
                              std::uint64_t seed, int restarts = 10);

inline constexpr double kRecoveryThreshold = 1.0 - 1e-9;

enum class RegressorKind { GroundTruth, Search, External };
std::string to_string(RegressorKind k);

struct ExternalCandidate {
    std::string case_name;
    ExprTree tree;
    std::vector<double> constants; // optional warm start
};

struct ExternalFile {
    std::vector<ExternalCandidate> candidates; // file order
    std::size_t lines = 0;
    std::size_t skipped = 0;
    std::vector<std::string> errors; // one per skipped line
};

// JSONL of {case, preorder} where preorder is a list of token names or a
// bracketed string; malformed lines are skipped and counted.
ExternalFile read_external(const std::filesystem::path& path);

struct BenchOptions {
    RegressorKind regressor = RegressorKind::GroundTruth;
    SearchConfig search;
    std::size_t runs = 1;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::vector<std::string> cases; // subset by name; empty means all
    int fit_restarts = 10;
};

struct RunRow {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::string preorder;
    std::string infix;
    std::vector<double> constants;
    double r2 = 0.0;
    std::size_t nodes = 0;
    bool recovered = false;
    std::optional<bool> property_ok;
    std::string error;
};

struct CaseReport {
    std::string name;
    std::size_t runs = 0;
    MeanCi r2;
    double nodes_mean = 0.0;
    double recovery_rate = 0.0;
    std::optional<double> success_rate;
    std::vector<RunRow> rows;
};

struct MetricsReport {
    std::string suite;
    std::string regressor;
    std::size_t runs_per_case = 0;
    std::uint64_t seed = 0;
    std::vector<CaseReport> cases;
    // Aggregates are means of the per-case values; the interval is over
    // per-case R^2 means.
    MeanCi r2;
    double nodes_mean = 0.0;
    double recovery_rate = 0.0;
    std::optional<double> success_rate;
    std::size_t skipped_lines = 0;
};

// Throws ConfigError when runs == 0 or the external regressor has no file.
MetricsReport run_benchmark(const Suite& suite, const BenchOptions& options, const ExternalFile* external = nullptr);
MetricsReport external_candidates(const std::filesystem::path& path, const Suite& suite, BenchOptions options = {});

nlohmann::ordered_json to_json(const MetricsReport& report);
std::string render_table(const MetricsReport& report);

struct PropertyAgreement {
    std::size_t checked = 0;
    std::size_t agreed = 0;
    nlohmann::ordered_json discrepancies = nlohmann::ordered_json::array();
};

// Checks every labelled case's ground truth against its listed labels.
PropertyAgreement property_agreement(const Suite& suite, const PropertyOptions& options = {});

} // namespace srforge
