#include "gdgap/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gdgap {

nlohmann::json tool_info() { return {{"name", std::string(kToolName)}, {"version", std::string(kToolVersion)}}; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json j;
  j["trial_id"] = r.trial_id;
  j["seed"] = r.seed;
  j["stream_id"] = r.stream_id;
  j["K"] = r.K ? nlohmann::json(*r.K) : nlohmann::json(nullptr);
  j["projections"] = r.projections;
  j["gap_estimate"] = r.gap_estimate;
  j["gap_stderr"] = r.gap_stderr;
  j["mc_samples"] = r.mc_samples;
  j["event"] = r.event;
  j["averaged_norm"] = r.averaged_norm;
  if (r.gradient_form_checked > 0) {
    j["gradient_form"] = {{"checked", r.gradient_form_checked}, {"failures", r.gradient_form_failures}};
  }
  if (r.surrogate_distance) j["surrogate_distance"] = *r.surrogate_distance;
  if (r.late_projection_ok) {
    j["late_projection_ok"] = *r.late_projection_ok;
    if (!r.late_projection_message.empty()) j["late_projection_message"] = r.late_projection_message;
  }
  if (r.norm_check) j["norm_check"] = *r.norm_check;
  return j;
}

nlohmann::json to_json(const GapReport& r, bool include_records) {
  nlohmann::json j;
  j["tool"] = tool_info();
  j["config"] = to_json(r.config);
  j["params"] = to_json(r.params);
  j["bound"] = r.bound == BoundKind::Lower ? "lower" : "upper";
  j["trials"] = r.trials;
  j["mean_gap"] = r.mean_gap;
  j["stderr"] = r.stderr_;
  j["theory_threshold"] = r.theory_threshold;
  if (r.theorem_threshold) j["theorem_threshold"] = *r.theorem_threshold;
  if (r.stability_bound) j["stability_bound"] = *r.stability_bound;
  j["event"] = {{"trials", r.event_trials}, {"mean_gap", r.event_mean_gap}, {"stderr", r.event_stderr}};
  j["passed"] = r.passed();
  if (include_records) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& rec : r.records) rows.push_back(to_json(rec));
    j["records"] = std::move(rows);
  }
  return j;
}

nlohmann::json to_json(const KStats& k) {
  return {{"trials", k.trials},   {"window", {{"lower", k.lower}, {"upper", k.upper}}},
          {"fraction", k.fraction}, {"mean_K", k.mean_K}};
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records, double threshold) {
  os << kTrialsCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.trial_id << ',' << r.seed << ',';
    if (r.K) os << *r.K;
    os << ',' << r.projections << ',' << format_double(r.gap_estimate) << ',' << format_double(r.gap_stderr)
       << ',' << format_double(threshold) << '\n';
  }
}

void write_k_csv(std::ostream& os, const KStats& k, const ExperimentConfig& config) {
  os << kTrialsCsvHeader << '\n';
  for (std::size_t i = 0; i < k.Ks.size(); ++i) os << i << ',' << config.seed << ',' << k.Ks[i] << ",,,,\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace gdgap
