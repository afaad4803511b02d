#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "gdgap/instance.hpp"
#include "gdgap/vector.hpp"

namespace gdgap {

struct OracleResult {
  double value = 0.0;
  Vector subgrad;
};

/// Deterministic first-order oracle w -> (f(w), a subgradient of f at w).
class FirstOrderOracle {
 public:
  virtual ~FirstOrderOracle() = default;
  virtual std::size_t dim() const = 0;
  /// Writes the subgradient into g (already sized dim()) and returns f(w).
  virtual double evaluate(const Vector& w, Vector& g) const = 0;

  OracleResult operator()(const Vector& w) const {
    OracleResult r{0.0, Vector(dim())};
    r.value = evaluate(w, r.subgrad);
    return r;
  }
};

/// Oracle for f(w; z) with z = alpha drawn from the distribution; SGD's view.
class PointOracle {
 public:
  virtual ~PointOracle() = default;
  virtual std::size_t dim() const = 0;
  virtual double evaluate(const Vector& w, const Alpha& alpha, Vector& g) const = 0;
};

class ZeroOracle final : public FirstOrderOracle, public PointOracle {
 public:
  explicit ZeroOracle(std::size_t d) : d_(d) {}
  std::size_t dim() const override { return d_; }
  double evaluate(const Vector&, Vector& g) const override;
  double evaluate(const Vector&, const Alpha&, Vector& g) const override;

 private:
  std::size_t d_;
};

/// Adapts a value/subgradient callable pair.
class FunctionOracle final : public FirstOrderOracle {
 public:
  using Fn = std::function<OracleResult(const Vector&)>;
  FunctionOracle(std::size_t d, Fn fn) : d_(d), fn_(std::move(fn)) {}
  std::size_t dim() const override { return d_; }
  double evaluate(const Vector& w, Vector& g) const override;

 private:
  std::size_t d_;
  Fn fn_;
};

// --- the HardGD / HardReg construction -------------------------------------

/// h(a) = 0 for a >= -gamma2, a + gamma2 otherwise.
inline double hinge_shift(double a, double gamma2) noexcept { return a >= -gamma2 ? 0.0 : a + gamma2; }

/// r_eps(w) = max{0, max_i (w(i) - eps_i)} with the smallest maximizing index.
struct RidgeTerm {
  double value = 0.0;
  std::optional<std::size_t> argmax;  // set iff value > 0
};
RidgeTerm ridge_term(const Vector& w, const EpsilonSchedule& eps);

/// f(w; alpha) = sqrt(sum_i alpha(i) h(w(i))^2) + gamma1 v_alpha . w + gamma3 r_eps(w).
OracleResult hard_oracle(const Vector& w, const Alpha& alpha, const InstanceParams& params);

class HardPointOracle final : public PointOracle {
 public:
  explicit HardPointOracle(InstanceParams params);
  std::size_t dim() const override { return params_.d; }
  double evaluate(const Vector& w, const Alpha& alpha, Vector& g) const override;
  const InstanceParams& params() const noexcept { return params_; }

 private:
  InstanceParams params_;
};

/// Which branches of the construction fired at a given w.
struct HardBranches {
  bool root_active = false;            // some point has a nonzero root term
  std::optional<std::size_t> ridge_argmax;
};

/// F_S(w) = (1/n) sum_{alpha in S} f(w; alpha). The linear part uses the
/// bit-count mean vbar, so when neither the root term nor the ridge fires the
/// returned subgradient is bitwise gamma1 * vbar.
class HardEmpiricalOracle final : public FirstOrderOracle {
 public:
  HardEmpiricalOracle(InstanceParams params, const Sample& sample);
  std::size_t dim() const override { return params_.d; }
  double evaluate(const Vector& w, Vector& g) const override;
  double evaluate(const Vector& w, Vector& g, HardBranches& branches) const;

  const InstanceParams& params() const noexcept { return params_; }
  const Sample& sample() const noexcept { return *sample_; }
  const Vector& vbar() const noexcept { return vbar_; }
  /// gamma1 * vbar, the exact base of every structured gradient.
  const Vector& scaled_vbar() const noexcept { return scaled_vbar_; }

 private:
  InstanceParams params_;
  const Sample* sample_;
  Vector vbar_;
  Vector scaled_vbar_;
};

OracleResult empirical_oracle(const Vector& w, const Sample& S, const InstanceParams& params);

// --- over-training construction --------------------------------------------

/// f(w; alpha) = sqrt(sum_i alpha(i) w(i)^2) + (1/d^2) sum_i (1 - w(i)).
OracleResult overfit_oracle(const Vector& w, const Alpha& alpha);

class OverfitPointOracle final : public PointOracle {
 public:
  explicit OverfitPointOracle(std::size_t d) : d_(d) {}
  std::size_t dim() const override { return d_; }
  double evaluate(const Vector& w, const Alpha& alpha, Vector& g) const override;

 private:
  std::size_t d_;
};

class OverfitEmpiricalOracle final : public FirstOrderOracle {
 public:
  explicit OverfitEmpiricalOracle(const Sample& sample);
  std::size_t dim() const override { return d_; }
  double evaluate(const Vector& w, Vector& g) const override;

 private:
  std::size_t d_;
  std::vector<std::vector<std::size_t>> supports_;  // set bits of each point
};

// --- deterministic constructions -------------------------------------------

/// f(w) = || w - 1/sqrt(d) + eps ||_inf; smallest index on ties.
OracleResult opt1_oracle(const Vector& w, const InstanceParams& params);

class Opt1Oracle final : public FirstOrderOracle {
 public:
  explicit Opt1Oracle(InstanceParams params);
  std::size_t dim() const override { return params_.d; }
  double evaluate(const Vector& w, Vector& g) const override;

 private:
  InstanceParams params_;
  Vector shift_;  // 1/sqrt(d) - eps_i
};

/// eta <= 1: |w - eta/4|; eta > 1: 2|w - 2/3|. sign(0) = 0.
std::pair<double, double> opt2_oracle(double w, double eta);

class Opt2Oracle final : public FirstOrderOracle {
 public:
  explicit Opt2Oracle(double eta) : eta_(eta) {}
  std::size_t dim() const override { return 1; }
  double evaluate(const Vector& w, Vector& g) const override;

 private:
  double eta_;
};

/// -(min{1, lambda}/2) w(1).
OracleResult lambda_lb_oracle(const Vector& w, double lambda);

class LambdaLBOracle final : public FirstOrderOracle {
 public:
  LambdaLBOracle(std::size_t d, double lambda) : d_(d), lambda_(lambda) {}
  std::size_t dim() const override { return d_; }
  double evaluate(const Vector& w, Vector& g) const override;

 private:
  std::size_t d_;
  double lambda_;
};

}  // namespace gdgap
