#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gdgap/config.hpp"
#include "gdgap/instance.hpp"
#include "gdgap/oracles.hpp"
#include "gdgap/optimizers.hpp"
#include "gdgap/rng.hpp"
#include "gdgap/vector.hpp"

namespace gdgap {

/// Coordinates that are zero in every sample point, in increasing order.
struct BadSet {
  std::vector<std::size_t> indices;
  std::size_t K() const noexcept { return indices.size(); }
  /// One-based access i_s, s = 1..K.
  std::size_t at(std::size_t s) const { return indices.at(s - 1); }
};

BadSet bad_set(const Sample& S);

// --- closed-form GD trajectory on the HardGD instance ----------------------

/// w_t = -eta t gamma1 vbar - eta sum_{s <= min(t-1, K)} e_{i_s}, for t = 0..T.
/// Throws PreconditionError("lemma preconditions unmet: ...") when the
/// instance violates its constraints or K > 3/(4 eta^2).
Vector predicted_gd_iterate(std::size_t t, const InstanceParams& params, const Vector& vbar,
                            const BadSet& bad);
Vector predicted_gd_iterate(std::size_t t, const InstanceParams& params, const Sample& S,
                            const BadSet& bad);

// --- regularized GD on the HardReg instance --------------------------------

/// True iff the realized empirical subgradient at w_t is bitwise
/// gamma1 vbar + gamma3 e_{i_t} (root term silent, ridge maximizer i_t).
bool reg_gradient_form_check(const Vector& w_t, const HardEmpiricalOracle& oracle, std::size_t t,
                             const BadSet& bad);
bool reg_gradient_form_check(const Vector& w_t, const Sample& S, const InstanceParams& params,
                             std::size_t t, const BadSet& bad);

/// Projection-free idealized sequence w'_1 = 0,
/// w'_{t+1} = Pi[(1 - eta_{t+1} lambda) w'_t - eta_{t+1} gamma3 e_{i_t}],
/// stored compactly: coordinate s-1 holds the value on e_{i_s}.
struct RegSurrogate {
  std::size_t T = 0;
  std::vector<std::vector<double>> iterates;  // iterates[t-1] = w'_t, t = 1..T
  std::vector<double> averaged_compact;       // w'_S on e_{i_1..i_T}
  Vector averaged;                            // w'_S embedded in R^d
  std::vector<std::size_t> projection_events; // t such that producing w'_t projected
  /// (t0, w'_S(i_{t0})) for T/2 < t0 <= 3T/4.
  std::vector<std::pair<std::size_t, double>> window;
  double window_bound = 0.0;  // -gamma3 / (2 lambda (T+1))
};

/// Throws PreconditionError if K < T, VerificationFailure("late projection")
/// if a projection fires after T/2 or a window coordinate exceeds its bound.
RegSurrogate reg_surrogate(const InstanceParams& params, const BadSet& bad, std::size_t T);

/// Closed form of the surrogate once projections have stopped:
/// w'_t = 2/(lambda t(t+1)) (lambda t_a(t_a+1)/2 w'_{t_a} - gamma3 sum_{k=t_a}^{t-1} (k+1) e_{i_k}).
std::vector<double> surrogate_closed_form(const InstanceParams& params, std::size_t t_a,
                                          const std::vector<double>& w_ta, std::size_t t);

// --- population risk -------------------------------------------------------

struct RiskEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

/// Unbiased estimate of E_alpha f(w; alpha) from m fresh alphas. Only the
/// square-root term is random; the linear and ridge terms enter through
/// their exact expectations, so the estimator draws only the alpha bits on
/// the root term's active support. Deterministic families return their
/// value with zero standard error.
RiskEstimate pop_risk_mc(const Vector& w, const InstanceParams& params, std::size_t m, RngStream& rng);

/// Exact E_alpha f(w; alpha) by enumeration of the active support (at most
/// 20 coordinates) or the binomial closed form when every active
/// coordinate has the same magnitude. Throws PreconditionError("use MC")
/// otherwise.
double pop_risk_exact(const Vector& w, const InstanceParams& params);

/// True when pop_risk_exact can evaluate w.
bool exact_risk_available(const Vector& w, const InstanceParams& params);

/// Lower bound on the population risk from convexity of the norm:
/// E ||alpha o h|| >= ||E[alpha] o h|| = ||h|| / 2, plus the exact linear
/// term. Omits the (nonnegative) ridge term.
double jensen_lower_bound(const Vector& w, const InstanceParams& params);

/// E[v_alpha(i)] = (1 - 1/(2n)) / 2.
inline double expected_perturbation(std::size_t n) noexcept {
  return 0.5 * (1.0 - 1.0 / (2.0 * static_cast<double>(n)));
}

// --- experiments -----------------------------------------------------------

enum class BoundKind { Lower, Upper };

struct TrialRecord {
  std::size_t trial_id = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::optional<std::size_t> K;
  std::size_t projections = 0;
  double gap_estimate = 0.0;
  double gap_stderr = 0.0;
  std::size_t mc_samples = 0;
  bool event = true;  // the conditioning event of the family's proof
  double averaged_norm = 0.0;
  // hard-reg runtime checks
  std::size_t gradient_form_checked = 0;
  std::size_t gradient_form_failures = 0;
  std::optional<double> surrogate_distance;
  std::optional<bool> late_projection_ok;
  std::string late_projection_message;
  // overfit near-boundary norm check (set when it applies)
  std::optional<bool> norm_check;
};

struct GapReport {
  ExperimentConfig config;
  InstanceParams params;
  BoundKind bound = BoundKind::Lower;
  std::size_t trials = 0;
  double mean_gap = 0.0;
  double stderr_ = 0.0;
  double theory_threshold = 0.0;
  /// Looser constant reported next to the pass threshold.
  std::optional<double> theorem_threshold;
  std::size_t event_trials = 0;
  double event_mean_gap = 0.0;
  double event_stderr = 0.0;
  std::vector<TrialRecord> records;
  /// HardReg: gamma1 sqrt(d) / lambda.
  std::optional<double> stability_bound;

  /// Lower bounds: mean >= threshold - 3 stderr. Upper bounds: mean <= threshold.
  bool passed() const noexcept;
};

/// Called as trials finish (from worker threads, serialized).
using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs config.trials independent trials (worker pool) and aggregates.
/// Throws InfeasibleParams before any trial if the configuration cannot
/// satisfy the family's constraints.
GapReport gap_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Same, on an explicitly given instance (the SGD arm of a separation run
/// shares the GD arm's distribution).
GapReport gap_experiment(const ExperimentConfig& config, const InstanceParams& params,
                         const ProgressFn& progress = {});

/// One trial of an experiment. Trial i draws from stream
/// (config.seed, config.stream_offset + i).
TrialRecord run_trial(const ExperimentConfig& config, const InstanceParams& params, std::size_t trial);

/// Instance parameters an experiment will use.
InstanceParams resolve_params(const ExperimentConfig& config);

/// Lower (or upper, for SGD) reference value for a configuration.
double theory_threshold(const ExperimentConfig& config, const InstanceParams& params);

struct KStats {
  std::size_t trials = 0;
  double lower = 0.0;  // min{T, 1/(6 eta^2)}
  double upper = 0.0;  // 3/(4 eta^2)
  double fraction = 0.0;
  double mean_K = 0.0;
  std::vector<std::size_t> Ks;
};

/// Checks log2(2 eta^2 d) <= n <= min{log2(d/16), log2(d / min{2T, 1/(3 eta^2)})}
/// (as powers of two, so the closed interval is exact), then draws
/// config.trials samples and reports how often K lands in the window.
KStats k_concentration(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Mean and standard error (n-1 denominator; 0 for a single value).
std::pair<double, double> mean_stderr(const std::vector<double>& xs);

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace gdgap
