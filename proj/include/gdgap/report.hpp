#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gdgap/analysis.hpp"

namespace gdgap {

inline constexpr std::string_view kToolName = "gdgap";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Fixed CSV header. New columns may only be appended.
inline constexpr std::string_view kTrialsCsvHeader = "trial_id,seed,K,projections,gap_estimate,gap_stderr,threshold";

nlohmann::json tool_info();

/// Shortest decimal that round-trips the double.
std::string format_double(double x);

nlohmann::json to_json(const TrialRecord& r);
nlohmann::json to_json(const GapReport& r, bool include_records = true);
nlohmann::json to_json(const KStats& k);

/// One row per trial, LF line endings, header first.
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records, double threshold);
/// k-stats rows: only trial_id, seed and K are filled.
void write_k_csv(std::ostream& os, const KStats& k, const ExperimentConfig& config);

/// Writes bytes verbatim (no newline translation), creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace gdgap
