#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gdgap/analysis.hpp"
#include "gdgap/config.hpp"

namespace gdgap {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Sup-norm tolerance between simulated and closed-form GD iterates.
inline constexpr double kTrajectoryTolerance = 1e-9;
/// k-stats pass level: 3/4 less 0.01 Monte Carlo slack.
inline constexpr double kKFractionLevel = 0.74;

/// One HardGD trial compared against the closed-form trajectory at every t.
struct GdFidelity {
  std::size_t trial = 0;
  std::size_t K = 0;
  bool checked = false;  // false when K > 3/(4 eta^2)
  double max_sup_distance = 0.0;
};
GdFidelity gd_fidelity_trial(const ExperimentConfig& config, const InstanceParams& params, std::size_t trial);

struct CommandResult {
  int exit_code = kExitPass;
  nlohmann::json report;
  std::string csv;        // trials.csv content (empty if none)
  std::string extra_csv;  // separation: the SGD arm's rows
  std::string summary;    // one line, PASS or FAIL first
};

/// Commands compute a result; they do not touch the file system. They
/// throw InfeasibleParams / PreconditionError / std::invalid_argument on
/// configuration problems.
CommandResult cmd_run(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_verify(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_separation(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_k_stats(const ExperimentConfig& config, std::ostream& log);

/// Runs a named command, writes report.json (config.output) and trials.csv
/// next to it, prints the summary line to out, and maps errors to exit codes.
int dispatch(std::string_view command, const ExperimentConfig& config, std::ostream& out, std::ostream& log);

/// trials.csv lives next to the report.
std::filesystem::path trials_csv_path(const ExperimentConfig& config);

}  // namespace gdgap
