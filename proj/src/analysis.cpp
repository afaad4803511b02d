#include "gdgap/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gdgap/errors.hpp"

namespace gdgap {

namespace {

constexpr std::size_t kMaxEnumerated = 20;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Population risk split into its random square-root part and the rest.
// The root term is sqrt(sum_i alpha(i) h_i^2) over the listed magnitudes.
struct RiskParts {
  bool deterministic = false;
  double constant = 0.0;
  std::vector<double> h;
};

RiskParts risk_parts(const Vector& w, const InstanceParams& p) {
  if (w.size() != p.d) throw std::invalid_argument("population risk: dimension mismatch");
  RiskParts parts;
  switch (p.family) {
    case Family::HardGD:
    case Family::HardReg: {
      double sum_w = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        sum_w += w[i];
        const double h = hinge_shift(w[i], p.gamma2);
        if (h != 0.0) parts.h.push_back(h);
      }
      parts.constant = p.gamma1 * expected_perturbation(p.n) * sum_w +
                       p.gamma3 * ridge_term(w, p.epsilon).value;
      return parts;
    }
    case Family::Overfit: {
      const double dd = static_cast<double>(p.d);
      double tail = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        tail += 1.0 - w[i];
        if (w[i] != 0.0) parts.h.push_back(w[i]);
      }
      parts.constant = tail / (dd * dd);
      return parts;
    }
    case Family::OptL1:
      parts.deterministic = true;
      parts.constant = opt1_oracle(w, p).value;
      return parts;
    case Family::OptL2:
      parts.deterministic = true;
      parts.constant = opt2_oracle(w[0], p.eta).first;
      return parts;
    case Family::LambdaLB:
      parts.deterministic = true;
      parts.constant = lambda_lb_oracle(w, p.lambda).value;
      return parts;
  }
  return parts;
}

bool equal_magnitudes(const std::vector<double>& h) {
  if (h.empty()) return true;
  const double m = std::abs(h.front());
  return std::all_of(h.begin(), h.end(), [m](double x) { return std::abs(x) == m; });
}

// E sqrt(sum alpha(i) h_i^2) over all 2^s patterns.
double enumerate_root(const std::vector<double>& h) {
  const std::size_t s = h.size();
  const std::size_t patterns = std::size_t{1} << s;
  std::vector<double> sq(patterns, 0.0);
  double total = 0.0;
  for (std::size_t mask = 1; mask < patterns; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    sq[mask] = sq[mask & (mask - 1)] + h[low] * h[low];
    total += std::sqrt(sq[mask]);
  }
  return total / static_cast<double>(patterns);
}

// sum_k C(s,k) 2^-s |h| sqrt(k).
double binomial_root(std::size_t s, double magnitude) {
  const double sd = static_cast<double>(s);
  double total = 0.0;
  for (std::size_t k = 1; k <= s; ++k) {
    const double kd = static_cast<double>(k);
    const double log_p = std::lgamma(sd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(sd - kd + 1.0) -
                         sd * std::log(2.0);
    total += std::exp(log_p) * std::sqrt(kd);
  }
  return magnitude * total;
}

RngStream trial_stream(const ExperimentConfig& c, std::size_t trial) {
  return RngStream(c.seed, c.stream_offset + trial);
}

}  // namespace

BadSet bad_set(const Sample& S) {
  if (S.size() == 0) throw std::invalid_argument("bad_set: empty sample");
  BadSet b;
  for (std::size_t i = 0; i < S.dim(); ++i) {
    if (S.count(i) == 0) b.indices.push_back(i);
  }
  return b;
}

Vector predicted_gd_iterate(std::size_t t, const InstanceParams& params, const Vector& vbar,
                            const BadSet& bad) {
  if (params.family != Family::HardGD) throw PreconditionError("lemma preconditions unmet: hard-gd instance required");
  try {
    check_invariants(params);
  } catch (const InfeasibleParams& e) {
    throw PreconditionError(std::string("lemma preconditions unmet: ") + e.what());
  }
  const double eta = params.eta;
  const double K = static_cast<double>(bad.K());
  if (K > 3.0 / (4.0 * eta * eta)) {
    throw PreconditionError("lemma preconditions unmet: K = " + std::to_string(bad.K()) + " > 3/(4 eta^2) = " +
                            fmt(3.0 / (4.0 * eta * eta)));
  }
  if (t > params.T) throw PreconditionError("lemma preconditions unmet: t <= T");
  if (vbar.size() != params.d) throw std::invalid_argument("predicted_gd_iterate: vbar dimension mismatch");

  Vector w(params.d);
  const double drift = -eta * static_cast<double>(t) * params.gamma1;
  for (std::size_t i = 0; i < params.d; ++i) w[i] = drift * vbar[i];
  const std::size_t hits = t == 0 ? 0 : std::min(t - 1, bad.K());
  for (std::size_t s = 1; s <= hits; ++s) w[bad.at(s)] -= eta;
  return w;
}

Vector predicted_gd_iterate(std::size_t t, const InstanceParams& params, const Sample& S, const BadSet& bad) {
  return predicted_gd_iterate(t, params, mean_perturbation(S), bad);
}

bool reg_gradient_form_check(const Vector& w_t, const HardEmpiricalOracle& oracle, std::size_t t,
                             const BadSet& bad) {
  if (t == 0 || t > bad.K()) return false;
  const InstanceParams& p = oracle.params();
  Vector g(p.d);
  HardBranches br;
  oracle.evaluate(w_t, g, br);
  if (br.root_active) return false;
  const std::size_t target = bad.at(t);
  if (!br.ridge_argmax || *br.ridge_argmax != target) return false;
  Vector expected = oracle.scaled_vbar();
  expected[target] += p.gamma3;
  return g == expected;
}

bool reg_gradient_form_check(const Vector& w_t, const Sample& S, const InstanceParams& params, std::size_t t,
                             const BadSet& bad) {
  return reg_gradient_form_check(w_t, HardEmpiricalOracle(params, S), t, bad);
}

RegSurrogate reg_surrogate(const InstanceParams& params, const BadSet& bad, std::size_t T) {
  if (params.family != Family::HardReg) throw std::invalid_argument("reg_surrogate: hard-reg instance required");
  if (bad.K() < T) {
    throw PreconditionError("surrogate needs K >= T (K = " + std::to_string(bad.K()) + ", T = " +
                            std::to_string(T) + ")");
  }
  const double lambda = params.lambda;
  const double g3 = params.gamma3;
  RegSurrogate s;
  s.T = T;
  s.iterates.reserve(T);
  std::vector<double> w(T, 0.0);
  s.iterates.push_back(w);
  for (std::size_t t = 1; t < T; ++t) {
    const double step = reg_step(lambda, t + 1);
    const double keep = 1.0 - step * lambda;
    for (double& x : w) x *= keep;
    w[t - 1] -= step * g3;
    double sq = 0.0;
    for (double x : w) sq += x * x;
    if (sq > 1.0) {
      const double scale = 1.0 / std::sqrt(sq);
      for (double& x : w) x *= scale;
      s.projection_events.push_back(t + 1);
      if (2 * (t + 1) > T) {
        throw VerificationFailure("late projection: surrogate projection at t = " + std::to_string(t + 1) +
                                  " > T/2");
      }
    }
    s.iterates.push_back(w);
  }

  const Weights weights = Weights::triangular(T);
  s.averaged_compact.assign(T, 0.0);
  for (std::size_t t = 1; t <= T; ++t) {
    const auto& wt = s.iterates[t - 1];
    for (std::size_t k = 0; k < T; ++k) s.averaged_compact[k] += weights[t - 1] * wt[k];
  }
  s.averaged = Vector(params.d);
  for (std::size_t k = 0; k < T; ++k) s.averaged[bad.at(k + 1)] = s.averaged_compact[k];

  s.window_bound = -g3 / (2.0 * lambda * static_cast<double>(T + 1));
  for (std::size_t t0 = T / 2 + 1; 4 * t0 <= 3 * T; ++t0) {
    const double v = s.averaged_compact[t0 - 1];
    s.window.emplace_back(t0, v);
    if (!(v <= s.window_bound)) {
      throw VerificationFailure("late projection: w'_S(i_" + std::to_string(t0) + ") = " + fmt(v) + " > " +
                                fmt(s.window_bound));
    }
  }
  return s;
}

std::vector<double> surrogate_closed_form(const InstanceParams& params, std::size_t t_a,
                                          const std::vector<double>& w_ta, std::size_t t) {
  if (t_a < 1 || t < t_a) throw std::invalid_argument("surrogate_closed_form: 1 <= t_a <= t");
  if (t - 1 > w_ta.size()) throw std::invalid_argument("surrogate_closed_form: t exceeds compact length");
  const double lambda = params.lambda;
  const double ta = static_cast<double>(t_a);
  const double td = static_cast<double>(t);
  std::vector<double> u(w_ta.size());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = lambda * ta * (ta + 1.0) / 2.0 * w_ta[k];
  for (std::size_t k = t_a; k < t; ++k) u[k - 1] -= params.gamma3 * static_cast<double>(k + 1);
  const double scale = 2.0 / (lambda * td * (td + 1.0));
  for (double& x : u) x *= scale;
  return u;
}

RiskEstimate pop_risk_mc(const Vector& w, const InstanceParams& params, std::size_t m, RngStream& rng) {
  if (m < 2) throw std::invalid_argument("pop_risk_mc: m >= 2");
  const RiskParts parts = risk_parts(w, params);
  RiskEstimate est;
  est.samples = m;
  if (parts.deterministic || parts.h.empty()) {
    est.mean = parts.constant;
    return est;
  }
  const std::size_t s = parts.h.size();
  std::vector<double> sq(s);
  for (std::size_t k = 0; k < s; ++k) sq[k] = parts.h[k] * parts.h[k];
  std::vector<double> values(m);
  for (std::size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    for (std::size_t base = 0; base < s; base += 64) {
      std::uint64_t bits = rng.next_u64();
      const std::size_t end = std::min(s, base + 64);
      for (std::size_t k = base; k < end; ++k, bits >>= 1) {
        if (bits & 1u) acc += sq[k];
      }
    }
    values[j] = std::sqrt(acc) + parts.constant;
  }
  const auto [mean, se] = mean_stderr(values);
  est.mean = mean;
  est.stderr_ = se;
  return est;
}

bool exact_risk_available(const Vector& w, const InstanceParams& params) {
  const RiskParts parts = risk_parts(w, params);
  return parts.deterministic || parts.h.size() <= kMaxEnumerated || equal_magnitudes(parts.h);
}

double pop_risk_exact(const Vector& w, const InstanceParams& params) {
  const RiskParts parts = risk_parts(w, params);
  if (parts.deterministic || parts.h.empty()) return parts.constant;
  if (parts.h.size() <= kMaxEnumerated) return enumerate_root(parts.h) + parts.constant;
  if (equal_magnitudes(parts.h)) return binomial_root(parts.h.size(), std::abs(parts.h.front())) + parts.constant;
  throw PreconditionError("use MC: active support of " + std::to_string(parts.h.size()) +
                          " coordinates with distinct magnitudes");
}

double jensen_lower_bound(const Vector& w, const InstanceParams& params) {
  RiskParts parts = risk_parts(w, params);
  if (parts.deterministic) return parts.constant;
  double sq = 0.0;
  for (double h : parts.h) sq += h * h;
  double rest = parts.constant;
  if (params.family == Family::HardGD || params.family == Family::HardReg) {
    rest -= params.gamma3 * ridge_term(w, params.epsilon).value;
  }
  return 0.5 * std::sqrt(sq) + rest;
}

std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// --- experiments -----------------------------------------------------------

bool GapReport::passed() const noexcept {
  if (bound == BoundKind::Upper) return mean_gap <= theory_threshold;
  // Relative 1e-12 absorbs rounding in the exact deterministic families,
  // whose gaps can meet the threshold with equality.
  return mean_gap + 3.0 * stderr_ >= theory_threshold * (1.0 - 1e-12);
}

InstanceParams resolve_params(const ExperimentConfig& c) {
  validate(c);
  InstanceParams p;
  switch (c.family) {
    case Family::HardGD:
      p = pick_gd_params(c.n, c.T, *c.eta, c.d);
      break;
    case Family::HardReg:
      p = pick_reg_params(c.n, c.T, *c.lambda, c.strict, c.d);
      break;
    case Family::Overfit:
      p = make_overfit_params(c.n, c.d);
      p.eta = *c.eta;
      p.T = c.T;
      break;
    case Family::OptL1: {
      const double eta = *c.eta;
      const double Td = static_cast<double>(c.T);
      const double lo = 18.0 * eta * eta * Td * Td;
      const double hi = 36.0 * eta * eta * Td * Td;
      std::size_t d = 0;
      if (c.d) {
        d = *c.d;
        const double dd = static_cast<double>(d);
        const bool small = d == 1 && lo <= 1.0;
        if (!small && !(lo <= dd && dd <= hi)) {
          throw InfeasibleParams("18 eta^2 T^2 <= d <= 36 eta^2 T^2 (d = " + std::to_string(d) + ", window [" +
                                 fmt(lo) + ", " + fmt(hi) + "])");
        }
      } else if (lo <= 1.0) {
        d = 1;
      } else {
        if (lo > static_cast<double>(kMaxDimension)) throw InfeasibleParams("18 eta^2 T^2 <= 2^23");
        d = static_cast<std::size_t>(std::ceil(lo));
      }
      p = make_opt1_params(d);
      p.eta = eta;
      p.T = c.T;
      break;
    }
    case Family::OptL2:
      p = make_opt2_params(*c.eta);
      p.T = c.T;
      break;
    case Family::LambdaLB:
      p = make_lambda_lb_params(*c.lambda, c.d.value_or(1));
      p.T = c.T;
      break;
  }
  if (c.gamma2) {
    p.gamma2 = *c.gamma2;
    check_invariants(p);
  }
  return p;
}

double theory_threshold(const ExperimentConfig& c, const InstanceParams& p) {
  const double Td = static_cast<double>(c.T);
  switch (c.family) {
    case Family::HardGD: {
      const double eta = *c.eta;
      if (c.optimizer == Optimizer::SGD) return 1.0 / (2.0 * eta * Td) + 4.5 * eta;
      return std::min(eta * std::sqrt(Td), 1.0 / 3.0) / 8.0;
    }
    case Family::HardReg:
      return 0.75 * std::min(1.0 / (8.0 * p.lambda * std::sqrt(Td + 1.0)), 1.0 / 16.0);
    case Family::Overfit: {
      const double eta = *c.eta;
      if (eta * std::sqrt(Td) <= 0.5) {
        const double nd = static_cast<double>(c.n);
        return std::max(0.125 - std::exp2(2.0 * nd + 2.0) / (4.0 * eta * Td), 0.0);
      }
      return 1.0 / 48.0;
    }
    case Family::OptL1: {
      const double eta = *c.eta;
      if (p.d == 1 && 18.0 * eta * eta * Td * Td <= 1.0) return 0.25;
      return 1.0 / (36.0 * eta * Td);
    }
    case Family::OptL2:
      return 0.25 * std::min(*c.eta, 4.0 / 3.0);
    case Family::LambdaLB:
      return std::min(*c.lambda / 4.0, 0.25);
  }
  return 0.0;
}

TrialRecord run_trial(const ExperimentConfig& c, const InstanceParams& p, std::size_t trial) {
  TrialRecord rec;
  rec.trial_id = trial;
  rec.seed = c.seed;
  rec.stream_id = c.stream_offset + trial;
  const RngStream base = trial_stream(c, trial);
  RngStream sample_rng = lane(base, Lane::Sample);
  RngStream mc_rng = lane(base, Lane::MonteCarlo);
  RunOptions opts;
  opts.keep_iterates = false;

  auto finish_mc = [&](const Vector& w_S, double baseline) {
    const RiskEstimate r = pop_risk_mc(w_S, p, c.mc_budget, mc_rng);
    rec.gap_estimate = r.mean - baseline;
    rec.gap_stderr = r.stderr_;
    rec.mc_samples = r.samples;
  };

  switch (c.family) {
    case Family::HardGD: {
      const double eta = *c.eta;
      if (c.optimizer == Optimizer::SGD) {
        RngStream sgd_rng = lane(base, Lane::Sgd);
        const Trajectory traj = run_sgd(HardPointOracle(p), eta, c.T, sgd_rng, opts);
        rec.projections = traj.projection_count();
        rec.averaged_norm = traj.averaged.norm();
        finish_mc(traj.averaged, 0.0);
        break;
      }
      const Sample S = Sample::draw(sample_rng, c.n, p.d);
      const BadSet bad = bad_set(S);
      rec.K = bad.K();
      const double K = static_cast<double>(bad.K());
      const double lo = std::min(static_cast<double>(c.T), 1.0 / (6.0 * eta * eta));
      rec.event = lo <= K && K <= 3.0 / (4.0 * eta * eta);
      const Trajectory traj = run_gd(HardEmpiricalOracle(p, S), eta, c.T, opts);
      rec.projections = traj.projection_count();
      rec.averaged_norm = traj.averaged.norm();
      finish_mc(traj.averaged, 0.0);
      break;
    }
    case Family::HardReg: {
      const Sample S = Sample::draw(sample_rng, c.n, p.d);
      const BadSet bad = bad_set(S);
      rec.K = bad.K();
      rec.event = bad.K() >= c.T;
      const HardEmpiricalOracle oracle(p, S);
      RunOptions ropts = opts;
      if (rec.event) {
        ropts.observer = [&](std::size_t t, const Vector& w, double, const Vector&) {
          if (t == 0) return;
          ++rec.gradient_form_checked;
          if (!reg_gradient_form_check(w, oracle, t, bad)) ++rec.gradient_form_failures;
        };
      }
      const Trajectory traj = run_reg_gd(oracle, p.lambda, c.T, ropts);
      rec.projections = traj.projection_count();
      rec.averaged_norm = traj.averaged.norm();
      if (rec.event) {
        ++rec.gradient_form_checked;
        if (!reg_gradient_form_check(traj.final_iterate, oracle, c.T, bad)) ++rec.gradient_form_failures;
        try {
          const RegSurrogate sur = reg_surrogate(p, bad, c.T);
          rec.late_projection_ok = true;
          rec.surrogate_distance = distance(traj.averaged, sur.averaged);
        } catch (const VerificationFailure& e) {
          rec.late_projection_ok = false;
          rec.late_projection_message = e.what();
        }
      }
      finish_mc(traj.averaged, 0.0);
      break;
    }
    case Family::Overfit: {
      const double eta = *c.eta;
      const Sample S = Sample::draw(sample_rng, c.n, p.d);
      const BadSet bad = bad_set(S);
      rec.K = bad.K();
      rec.event = bad.K() >= 1;
      const Trajectory traj = run_gd(OverfitEmpiricalOracle(S), eta, c.T, opts);
      rec.projections = traj.projection_count();
      const Vector& w_S = traj.averaged;
      rec.averaged_norm = w_S.norm();
      if (rec.event && rec.averaged_norm < 1.0) {
        const double dd = static_cast<double>(p.d);
        rec.norm_check = rec.averaged_norm >= 1.0 - dd * dd / (eta * static_cast<double>(c.T));
      }
      // F(w*) <= 1/4 is the baseline certificate.
      if (exact_risk_available(w_S, p)) {
        rec.gap_estimate = pop_risk_exact(w_S, p) - 0.25;
      } else {
        finish_mc(w_S, 0.25);
      }
      break;
    }
    case Family::OptL1:
    case Family::OptL2: {
      const double eta = *c.eta;
      Trajectory traj;
      if (c.family == Family::OptL1) {
        traj = run_gd(Opt1Oracle(p), eta, c.T, opts);
      } else {
        traj = run_gd(Opt2Oracle(eta), eta, c.T, opts);
      }
      rec.projections = traj.projection_count();
      rec.averaged_norm = traj.averaged.norm();
      rec.gap_estimate = pop_risk_exact(traj.averaged, p);
      break;
    }
    case Family::LambdaLB: {
      const Trajectory traj = run_reg_gd(LambdaLBOracle(p.d, p.lambda), p.lambda, c.T, opts);
      rec.projections = traj.projection_count();
      rec.averaged_norm = traj.averaged.norm();
      // Baseline h(e_1) = -min{1, lambda}/2.
      rec.gap_estimate = pop_risk_exact(traj.averaged, p) + std::min(1.0, p.lambda) / 2.0;
      break;
    }
  }
  return rec;
}

GapReport gap_experiment(const ExperimentConfig& c, const ProgressFn& progress) {
  return gap_experiment(c, resolve_params(c), progress);
}

GapReport gap_experiment(const ExperimentConfig& c, const InstanceParams& params, const ProgressFn& progress) {
  validate(c);
  check_invariants(params);
  GapReport report;
  report.config = c;
  report.params = params;
  report.bound = (c.family == Family::HardGD && c.optimizer == Optimizer::SGD) ? BoundKind::Upper : BoundKind::Lower;
  report.theory_threshold = theory_threshold(c, report.params);
  if (c.family == Family::HardGD && c.optimizer == Optimizer::GD) {
    report.theorem_threshold = std::min(*c.eta * std::sqrt(static_cast<double>(c.T)), 1.0 / 3.0) / 16.0;
  }
  if (c.family == Family::HardReg) {
    report.stability_bound = report.params.gamma1 * std::sqrt(static_cast<double>(report.params.d)) / report.params.lambda;
  }

  report.records.resize(c.trials);
  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(c.trials, c.workers, [&](std::size_t i) {
    report.records[i] = run_trial(c, report.params, i);
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++done, c.trials);
    }
  });

  report.trials = c.trials;
  std::vector<double> gaps, event_gaps;
  gaps.reserve(c.trials);
  for (const auto& r : report.records) {
    gaps.push_back(r.gap_estimate);
    if (r.event) event_gaps.push_back(r.gap_estimate);
  }
  std::tie(report.mean_gap, report.stderr_) = mean_stderr(gaps);
  if (c.trials == 1) report.stderr_ = report.records.front().gap_stderr;
  report.event_trials = event_gaps.size();
  std::tie(report.event_mean_gap, report.event_stderr) = mean_stderr(event_gaps);
  return report;
}

KStats k_concentration(const ExperimentConfig& c, const ProgressFn& progress) {
  if (!c.eta) throw std::invalid_argument("k-stats requires eta");
  if (!c.d) throw std::invalid_argument("k-stats requires d");
  const double eta = *c.eta;
  const double d = static_cast<double>(*c.d);
  const double two_n = std::exp2(static_cast<double>(c.n));
  const double Td = static_cast<double>(c.T);
  if (!(2.0 * eta * eta * d <= two_n)) {
    throw InfeasibleParams("log2(2 eta^2 d) <= n (2 eta^2 d = " + fmt(2.0 * eta * eta * d) + ", 2^n = " +
                           fmt(two_n) + ")");
  }
  if (!(two_n <= d / 16.0)) {
    throw InfeasibleParams("n <= log2(d/16) (d/16 = " + fmt(d / 16.0) + ", 2^n = " + fmt(two_n) + ")");
  }
  const double inner = std::min(2.0 * Td, 1.0 / (3.0 * eta * eta));
  if (!(two_n <= d / inner)) {
    throw InfeasibleParams("n <= log2(d / min{2T, 1/(3 eta^2)}) (bound = " + fmt(d / inner) + ", 2^n = " +
                           fmt(two_n) + ")");
  }
  if (c.trials < 1) throw std::invalid_argument("trials >= 1");

  KStats ks;
  ks.trials = c.trials;
  ks.lower = std::min(Td, 1.0 / (6.0 * eta * eta));
  ks.upper = 3.0 / (4.0 * eta * eta);
  ks.Ks.resize(c.trials);
  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(c.trials, c.workers, [&](std::size_t i) {
    RngStream rng = lane(trial_stream(c, i), Lane::Sample);
    ks.Ks[i] = bad_set(Sample::draw(rng, c.n, *c.d)).K();
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++done, c.trials);
    }
  });
  std::size_t inside = 0;
  double sum = 0.0;
  for (std::size_t K : ks.Ks) {
    const double k = static_cast<double>(K);
    if (ks.lower <= k && k <= ks.upper) ++inside;
    sum += k;
  }
  ks.fraction = static_cast<double>(inside) / static_cast<double>(c.trials);
  ks.mean_K = sum / static_cast<double>(c.trials);
  return ks;
}

}  // namespace gdgap
