#include "gdgap/experiment.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "gdgap/errors.hpp"
#include "gdgap/report.hpp"

namespace gdgap {

namespace {

constexpr std::uint64_t kSgdStreamOffset = std::uint64_t{1} << 32;
constexpr std::size_t kDefaultNSgd = 6400;
constexpr std::size_t kDefaultSgdTrials = 50;

ProgressFn progress_printer(std::ostream& log, std::string label) {
  return [&log, label](std::size_t done, std::size_t total) {
    const std::size_t step = std::max<std::size_t>(1, total / 10);
    if (done % step == 0 || done == total) log << "[" << label << "] " << done << "/" << total << " trials\n";
  };
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string num(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

InstanceParams lemma_params(const ExperimentConfig& c) {
  try {
    return resolve_params(c);
  } catch (const InfeasibleParams& e) {
    throw PreconditionError(std::string("lemma preconditions unmet: ") + e.what());
  }
}

std::string csv_of(const GapReport& r) {
  std::ostringstream os;
  write_trials_csv(os, r.records, r.theory_threshold);
  return os.str();
}

CommandResult verify_hard_gd(const ExperimentConfig& c, std::ostream& log) {
  const InstanceParams p = lemma_params(c);
  std::vector<GdFidelity> results(c.trials);
  std::mutex m;
  std::size_t done = 0;
  const auto progress = progress_printer(log, "verify");
  parallel_for(c.trials, c.workers, [&](std::size_t i) {
    results[i] = gd_fidelity_trial(c, p, i);
    std::lock_guard lock(m);
    progress(++done, c.trials);
  });

  std::size_t checked = 0, below_T = 0, skipped = 0;
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    if (r.checked) {
      ++checked;
      if (r.K < c.T) ++below_T;
      worst = std::max(worst, r.max_sup_distance);
    } else {
      ++skipped;
    }
    rows.push_back({{"trial_id", r.trial}, {"K", r.K}, {"checked", r.checked}, {"max_sup_distance", r.max_sup_distance}});
  }
  const bool ok = checked > 0 && worst <= kTrajectoryTolerance;

  CommandResult out;
  out.report["tool"] = tool_info();
  out.report["command"] = "verify";
  out.report["config"] = to_json(c);
  out.report["params"] = to_json(p);
  out.report["checks"] = nlohmann::json::array();
  out.report["checks"].push_back({{"name", "trajectory_oracle"},
                                  {"passed", ok},
                                  {"tolerance", kTrajectoryTolerance},
                                  {"max_sup_distance", worst},
                                  {"checked_trials", checked},
                                  {"trials_with_K_below_T", below_T},
                                  {"skipped_trials_K_above_3_over_4eta2", skipped}});
  out.report["trials"] = std::move(rows);
  out.report["passed"] = ok;
  out.exit_code = ok ? kExitPass : kExitFail;
  out.summary = verdict(ok) + " trajectory_oracle max_sup_distance=" + num(worst) + " checked=" +
                std::to_string(checked) + " skipped=" + std::to_string(skipped);
  return out;
}

CommandResult verify_hard_reg(const ExperimentConfig& c, std::ostream& log) {
  const InstanceParams p = lemma_params(c);
  const GapReport rep = gap_experiment(c, p, progress_printer(log, "verify"));
  const double bound = *rep.stability_bound;

  std::size_t checked = 0, grad_checked = 0, grad_fail = 0, late_fail = 0, prox_fail = 0, prox_unresolved = 0;
  double worst_distance = 0.0;
  std::string first_late;
  for (const auto& r : rep.records) {
    if (!r.event) continue;
    ++checked;
    grad_checked += r.gradient_form_checked;
    grad_fail += r.gradient_form_failures;
    if (r.late_projection_ok && !*r.late_projection_ok) {
      ++late_fail;
      if (first_late.empty()) first_late = r.late_projection_message;
    }
    if (r.surrogate_distance) {
      worst_distance = std::max(worst_distance, *r.surrogate_distance);
      // Bounds below the rounding floor of the distance itself cannot be resolved.
      const double floor = 64.0 * DBL_EPSILON * std::max(1.0, r.averaged_norm);
      if (bound < floor) {
        ++prox_unresolved;
      } else if (!(*r.surrogate_distance <= bound)) {
        ++prox_fail;
      }
    }
  }
  const bool any = checked > 0;
  const bool grad_ok = any && grad_fail == 0;
  const bool late_projection_ok = any && late_fail == 0;
  const bool prox_ok = any && prox_fail == 0;

  CommandResult out;
  out.report["tool"] = tool_info();
  out.report["command"] = "verify";
  out.report["config"] = to_json(c);
  out.report["params"] = to_json(p);
  auto checks = nlohmann::json::array();
  checks.push_back({{"name", "gradient_form"}, {"passed", grad_ok}, {"steps_checked", grad_checked},
                    {"failures", grad_fail}});
  nlohmann::json late = {{"name", "no_late_projection"}, {"passed", late_projection_ok}, {"failures", late_fail}};
  if (!first_late.empty()) late["first_failure"] = first_late;
  checks.push_back(late);
  checks.push_back({{"name", "surrogate_proximity"},
                    {"passed", prox_ok},
                    {"bound", bound},
                    {"max_distance", worst_distance},
                    {"failures", prox_fail},
                    {"below_resolution", prox_unresolved}});
  out.report["checks"] = std::move(checks);
  out.report["checked_trials"] = checked;
  out.report["gap"] = to_json(rep, false);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.records) rows.push_back(to_json(r));
  out.report["trials"] = std::move(rows);
  const bool ok = grad_ok && late_projection_ok && prox_ok;
  out.report["passed"] = ok;
  out.exit_code = ok ? kExitPass : kExitFail;
  out.csv = csv_of(rep);
  out.summary = verdict(ok) + " gradient_form=" + verdict(grad_ok) + " no_late_projection=" + verdict(late_projection_ok) +
                " proximity=" + verdict(prox_ok) + " checked_trials=" + std::to_string(checked);
  return out;
}

}  // namespace

GdFidelity gd_fidelity_trial(const ExperimentConfig& c, const InstanceParams& p, std::size_t trial) {
  GdFidelity f;
  f.trial = trial;
  RngStream rng = lane(RngStream(c.seed, c.stream_offset + trial), Lane::Sample);
  const Sample S = Sample::draw(rng, c.n, p.d);
  const BadSet bad = bad_set(S);
  f.K = bad.K();
  const double eta = p.eta;
  if (static_cast<double>(bad.K()) > 3.0 / (4.0 * eta * eta)) return f;
  const HardEmpiricalOracle oracle(p, S);
  const Trajectory traj = run_gd(oracle, eta, c.T);
  for (std::size_t t = 0; t <= c.T; ++t) {
    const Vector predicted = predicted_gd_iterate(t, p, oracle.vbar(), bad);
    f.max_sup_distance = std::max(f.max_sup_distance, sup_distance(traj.iterates[t], predicted));
  }
  f.checked = true;
  return f;
}

std::filesystem::path trials_csv_path(const ExperimentConfig& c) {
  return std::filesystem::path(c.output).parent_path() / "trials.csv";
}

CommandResult cmd_run(const ExperimentConfig& c, std::ostream& log) {
  const GapReport rep = gap_experiment(c, progress_printer(log, "run"));
  CommandResult out;
  out.report = to_json(rep);
  out.report["command"] = "run";
  out.csv = csv_of(rep);
  const bool ok = rep.passed();
  out.exit_code = ok ? kExitPass : kExitFail;
  const char* rel = rep.bound == BoundKind::Lower ? " >= " : " <= ";
  out.summary = verdict(ok) + " " + std::string(to_string(c.family)) + " mean_gap=" + num(rep.mean_gap) +
                " stderr=" + num(rep.stderr_) + rel + "threshold=" + num(rep.theory_threshold);
  return out;
}

CommandResult cmd_verify(const ExperimentConfig& c, std::ostream& log) {
  validate(c);
  if (c.family == Family::HardGD && c.optimizer == Optimizer::GD) return verify_hard_gd(c, log);
  if (c.family == Family::HardReg) return verify_hard_reg(c, log);
  throw std::invalid_argument("verify supports hard-gd (gd) and hard-reg only");
}

CommandResult cmd_separation(const ExperimentConfig& c, std::ostream& log) {
  if (c.family != Family::HardGD) throw std::invalid_argument("separation requires family hard-gd");
  ExperimentConfig gd = c;
  gd.optimizer = Optimizer::GD;
  const InstanceParams params = resolve_params(gd);

  ExperimentConfig sgd = c;
  sgd.optimizer = Optimizer::SGD;
  const std::size_t n_sgd = c.n_sgd.value_or(kDefaultNSgd);
  sgd.T = n_sgd;
  sgd.eta = 1.0 / (3.0 * std::sqrt(static_cast<double>(n_sgd)));
  sgd.trials = c.sgd_trials.value_or(std::min(c.trials, kDefaultSgdTrials));
  sgd.stream_offset = c.stream_offset + kSgdStreamOffset;
  sgd.d.reset();
  validate(sgd);

  const GapReport gd_rep = gap_experiment(gd, params, progress_printer(log, "separation gd"));
  const GapReport sgd_rep = gap_experiment(sgd, params, progress_printer(log, "separation sgd"));

  const bool gd_ok = gd_rep.passed();
  const bool sgd_ok = sgd_rep.passed();
  const double ratio = sgd_rep.mean_gap > 0.0 ? gd_rep.mean_gap / sgd_rep.mean_gap
                                              : std::numeric_limits<double>::infinity();
  const bool ratio_ok = ratio > 1.0;

  CommandResult out;
  out.report["tool"] = tool_info();
  out.report["command"] = "separation";
  out.report["gd"] = to_json(gd_rep);
  out.report["sgd"] = to_json(sgd_rep);
  out.report["sgd"]["reference"] = "1/(2 eta T) + 9 eta / 2 (diameter 1, Lipschitz 3)";
  out.report["ratio"] = std::isfinite(ratio) ? nlohmann::json(ratio) : nlohmann::json("inf");
  const bool ok = gd_ok && sgd_ok && ratio_ok;
  out.report["passed"] = ok;
  out.exit_code = ok ? kExitPass : kExitFail;
  out.csv = csv_of(gd_rep);
  out.extra_csv = csv_of(sgd_rep);
  out.summary = verdict(ok) + " gd_mean_gap=" + num(gd_rep.mean_gap) + " (>= " + num(gd_rep.theory_threshold) +
                ") sgd_mean_gap=" + num(sgd_rep.mean_gap) + " (<= " + num(sgd_rep.theory_threshold) +
                ") ratio=" + (std::isfinite(ratio) ? num(ratio) : std::string("inf"));
  return out;
}

CommandResult cmd_k_stats(const ExperimentConfig& c, std::ostream& log) {
  validate(c);
  if (c.family != Family::HardGD) throw std::invalid_argument("k-stats requires family hard-gd");
  const KStats ks = k_concentration(c, progress_printer(log, "k-stats"));
  const bool ok = ks.fraction >= kKFractionLevel;
  CommandResult out;
  out.report["tool"] = tool_info();
  out.report["command"] = "k-stats";
  out.report["config"] = to_json(c);
  out.report["k_stats"] = to_json(ks);
  out.report["expected_K"] = static_cast<double>(*c.d) / std::exp2(static_cast<double>(c.n));
  out.report["level"] = kKFractionLevel;
  out.report["passed"] = ok;
  out.exit_code = ok ? kExitPass : kExitFail;
  std::ostringstream csv;
  write_k_csv(csv, ks, c);
  out.csv = csv.str();
  out.summary = verdict(ok) + " fraction=" + num(ks.fraction) + " (>= " + num(kKFractionLevel) + ") window=[" +
                num(ks.lower) + ", " + num(ks.upper) + "] mean_K=" + num(ks.mean_K);
  return out;
}

int dispatch(std::string_view command, const ExperimentConfig& c, std::ostream& out, std::ostream& log) {
  CommandResult res;
  try {
    if (command == "run") {
      res = cmd_run(c, log);
    } else if (command == "verify") {
      res = cmd_verify(c, log);
    } else if (command == "separation") {
      res = cmd_separation(c, log);
    } else if (command == "k-stats") {
      res = cmd_k_stats(c, log);
    } else {
      log << "error: unknown command '" << command << "'\n";
      return kExitConfig;
    }
  } catch (const InfeasibleParams& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const VerificationFailure& e) {
    log << "verification failed: " << e.what() << '\n';
    out << "FAIL " << e.what() << '\n';
    return kExitFail;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  write_file(c.output, res.report.dump(2) + "\n");
  if (!res.csv.empty()) write_file(trials_csv_path(c), res.csv);
  if (!res.extra_csv.empty()) {
    write_file(std::filesystem::path(c.output).parent_path() / "trials_sgd.csv", res.extra_csv);
  }
  out << res.summary << '\n';
  return res.exit_code;
}

}  // namespace gdgap
