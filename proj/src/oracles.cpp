#include "gdgap/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gdgap {

namespace {

void require_dim(const Vector& w, std::size_t d, const char* who) {
  if (w.size() != d) {
    throw std::invalid_argument(std::string(who) + ": expected dimension " + std::to_string(d) +
                                ", got " + std::to_string(w.size()));
  }
}

void require_hard_family(const InstanceParams& p) {
  if (p.family != Family::HardGD && p.family != Family::HardReg) {
    throw std::invalid_argument("hard oracle needs a hard-gd or hard-reg instance, got " +
                                std::string(to_string(p.family)));
  }
}

inline double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Coordinates where the hinge shift is nonzero, with their shifted values.
struct ActiveSet {
  std::vector<std::size_t> index;
  std::vector<double> h;
};

ActiveSet active_hinge(const Vector& w, double gamma2) {
  ActiveSet a;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < -gamma2) {
      a.index.push_back(i);
      a.h.push_back(w[i] + gamma2);
    }
  }
  return a;
}

// Adds scale * grad of sqrt(sum alpha h^2) into g and returns the root value.
double add_root_term(const ActiveSet& act, const Alpha& alpha, double scale, Vector& g) {
  double s = 0.0;
  for (std::size_t k = 0; k < act.index.size(); ++k) {
    if (alpha[act.index[k]]) s += act.h[k] * act.h[k];
  }
  if (s == 0.0) return 0.0;
  const double root = std::sqrt(s);
  const double c = scale / root;
  for (std::size_t k = 0; k < act.index.size(); ++k) {
    if (alpha[act.index[k]]) g[act.index[k]] += c * act.h[k];
  }
  return root;
}

}  // namespace

double ZeroOracle::evaluate(const Vector&, Vector& g) const {
  std::fill(g.begin(), g.end(), 0.0);
  return 0.0;
}

double ZeroOracle::evaluate(const Vector&, const Alpha&, Vector& g) const {
  std::fill(g.begin(), g.end(), 0.0);
  return 0.0;
}

double FunctionOracle::evaluate(const Vector& w, Vector& g) const {
  OracleResult r = fn_(w);
  if (r.subgrad.size() != d_) throw std::invalid_argument("function oracle returned wrong dimension");
  g = std::move(r.subgrad);
  return r.value;
}

RidgeTerm ridge_term(const Vector& w, const EpsilonSchedule& eps) {
  RidgeTerm r;
  double best = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = w[i] - eps.at(i);
    if (v > best) {
      best = v;
      r.argmax = i;
    }
  }
  r.value = best;
  return r;
}

OracleResult hard_oracle(const Vector& w, const Alpha& alpha, const InstanceParams& params) {
  HardPointOracle o(params);
  OracleResult r{0.0, Vector(params.d)};
  r.value = o.evaluate(w, alpha, r.subgrad);
  return r;
}

HardPointOracle::HardPointOracle(InstanceParams params) : params_(std::move(params)) {
  require_hard_family(params_);
}

double HardPointOracle::evaluate(const Vector& w, const Alpha& alpha, Vector& g) const {
  require_dim(w, params_.d, "hard_oracle");
  if (alpha.size() != params_.d) throw std::invalid_argument("hard_oracle: alpha dimension mismatch");
  if (!w.is_finite()) throw std::domain_error("non-finite vector");
  const double g1 = params_.gamma1;
  const double neg = -g1 / (2.0 * static_cast<double>(params_.n));
  double linear = 0.0;
  for (std::size_t i = 0; i < params_.d; ++i) {
    g[i] = alpha[i] ? g1 : neg;
    linear += g[i] * w[i];
  }
  const double root = add_root_term(active_hinge(w, params_.gamma2), alpha, 1.0, g);
  const RidgeTerm ridge = ridge_term(w, params_.epsilon);
  if (ridge.argmax) g[*ridge.argmax] += params_.gamma3;
  return root + linear + params_.gamma3 * ridge.value;
}

HardEmpiricalOracle::HardEmpiricalOracle(InstanceParams params, const Sample& sample)
    : params_(std::move(params)), sample_(&sample) {
  require_hard_family(params_);
  if (sample.dim() != params_.d) throw std::invalid_argument("sample dimension differs from instance");
  if (sample.size() != params_.n) {
    throw std::invalid_argument("sample size " + std::to_string(sample.size()) +
                                " differs from instance n = " + std::to_string(params_.n));
  }
  vbar_ = mean_perturbation(sample);
  scaled_vbar_ = params_.gamma1 * vbar_;
}

double HardEmpiricalOracle::evaluate(const Vector& w, Vector& g) const {
  HardBranches ignored;
  return evaluate(w, g, ignored);
}

double HardEmpiricalOracle::evaluate(const Vector& w, Vector& g, HardBranches& branches) const {
  require_dim(w, params_.d, "empirical_oracle");
  if (!w.is_finite()) throw std::domain_error("non-finite vector");
  std::copy(scaled_vbar_.begin(), scaled_vbar_.end(), g.begin());
  const double linear = dot(scaled_vbar_, w);

  const ActiveSet act = active_hinge(w, params_.gamma2);
  const double inv_n = 1.0 / static_cast<double>(sample_->size());
  double root = 0.0;
  branches.root_active = false;
  if (!act.index.empty()) {
    for (const Alpha& a : sample_->points()) {
      const double r = add_root_term(act, a, inv_n, g);
      if (r > 0.0) branches.root_active = true;
      root += r;
    }
    root *= inv_n;
  }

  const RidgeTerm ridge = ridge_term(w, params_.epsilon);
  branches.ridge_argmax = ridge.argmax;
  if (ridge.argmax) g[*ridge.argmax] += params_.gamma3;
  return root + linear + params_.gamma3 * ridge.value;
}

OracleResult empirical_oracle(const Vector& w, const Sample& S, const InstanceParams& params) {
  if (S.size() == 0) throw std::invalid_argument("empty sample");
  return HardEmpiricalOracle(params, S)(w);
}

OracleResult overfit_oracle(const Vector& w, const Alpha& alpha) {
  OverfitPointOracle o(w.size());
  OracleResult r{0.0, Vector(w.size())};
  r.value = o.evaluate(w, alpha, r.subgrad);
  return r;
}

double OverfitPointOracle::evaluate(const Vector& w, const Alpha& alpha, Vector& g) const {
  require_dim(w, d_, "overfit_oracle");
  if (alpha.size() != d_) throw std::invalid_argument("overfit_oracle: alpha dimension mismatch");
  const double dd = static_cast<double>(d_);
  const double lin = 1.0 / (dd * dd);
  double s = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < d_; ++i) {
    if (alpha[i]) s += w[i] * w[i];
    tail += 1.0 - w[i];
  }
  const double root = std::sqrt(s);
  for (std::size_t i = 0; i < d_; ++i) g[i] = (s > 0.0 && alpha[i] ? w[i] / root : 0.0) - lin;
  return root + lin * tail;
}

OverfitEmpiricalOracle::OverfitEmpiricalOracle(const Sample& sample) : d_(sample.dim()) {
  supports_.resize(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    for (std::size_t i = 0; i < d_; ++i) {
      if (sample[j][i]) supports_[j].push_back(i);
    }
  }
}

double OverfitEmpiricalOracle::evaluate(const Vector& w, Vector& g) const {
  require_dim(w, d_, "overfit empirical oracle");
  const double dd = static_cast<double>(d_);
  const double lin = 1.0 / (dd * dd);
  const double inv_n = 1.0 / static_cast<double>(supports_.size());
  double tail = 0.0;
  for (std::size_t i = 0; i < d_; ++i) {
    g[i] = -lin;
    tail += 1.0 - w[i];
  }
  double root = 0.0;
  for (const auto& supp : supports_) {
    double s = 0.0;
    for (std::size_t i : supp) s += w[i] * w[i];
    if (s == 0.0) continue;
    const double r = std::sqrt(s);
    root += r;
    const double c = inv_n / r;
    for (std::size_t i : supp) g[i] += c * w[i];
  }
  return root * inv_n + lin * tail;
}

OracleResult opt1_oracle(const Vector& w, const InstanceParams& params) {
  return Opt1Oracle(params)(w);
}

Opt1Oracle::Opt1Oracle(InstanceParams params) : params_(std::move(params)), shift_(params_.d) {
  if (params_.family != Family::OptL1) throw std::invalid_argument("opt1 oracle needs an opt-l1 instance");
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(params_.d));
  for (std::size_t i = 0; i < params_.d; ++i) shift_[i] = inv_sqrt_d - params_.epsilon.at(i);
}

double Opt1Oracle::evaluate(const Vector& w, Vector& g) const {
  require_dim(w, params_.d, "opt1_oracle");
  std::size_t best_i = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < params_.d; ++i) {
    const double a = std::abs(w[i] - shift_[i]);
    if (a > best) {
      best = a;
      best_i = i;
    }
  }
  std::fill(g.begin(), g.end(), 0.0);
  g[best_i] = sign(w[best_i] - shift_[best_i]);
  return best;
}

std::pair<double, double> opt2_oracle(double w, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("opt2_oracle: eta > 0");
  if (eta <= 1.0) {
    const double c = eta / 4.0;
    return {std::abs(w - c), sign(w - c)};
  }
  constexpr double c = 2.0 / 3.0;
  return {2.0 * std::abs(w - c), 2.0 * sign(w - c)};
}

double Opt2Oracle::evaluate(const Vector& w, Vector& g) const {
  require_dim(w, 1, "opt2_oracle");
  const auto [v, s] = opt2_oracle(w[0], eta_);
  g[0] = s;
  return v;
}

OracleResult lambda_lb_oracle(const Vector& w, double lambda) {
  return LambdaLBOracle(w.size(), lambda)(w);
}

double LambdaLBOracle::evaluate(const Vector& w, Vector& g) const {
  require_dim(w, d_, "lambda_lb_oracle");
  if (!(lambda_ > 0.0)) throw std::invalid_argument("lambda_lb_oracle: lambda > 0");
  const double c = std::min(1.0, lambda_) / 2.0;
  std::fill(g.begin(), g.end(), 0.0);
  g[0] = -c;
  return -c * w[0];
}

}  // namespace gdgap
