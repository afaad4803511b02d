#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gdgap/errors.hpp"
#include "gdgap/rng.hpp"
#include "gdgap/vector.hpp"

namespace gdgap {

enum class Family { HardGD, HardReg, Overfit, OptL1, OptL2, LambdaLB };

std::string_view to_string(Family f);
/// Accepts the CLI spellings: hard-gd, hard-reg, overfit, opt-l1, opt-l2, lambda-lb.
Family parse_family(std::string_view name);

/// Strictly increasing threshold schedule eps_i = eps_max * i / (2d), i = 1..d.
/// Stored as a descriptor; coordinates are materialized on demand.
struct EpsilonSchedule {
  double eps_max = 0.0;
  std::size_t d = 0;

  /// Zero-based coordinate k holds eps_{k+1}.
  double at(std::size_t k) const noexcept {
    return eps_max * static_cast<double>(k + 1) / (2.0 * static_cast<double>(d));
  }
  double last() const noexcept { return d == 0 ? 0.0 : at(d - 1); }
  Vector materialize() const;
};

struct InstanceParams {
  Family family = Family::HardGD;
  std::size_t d = 0;
  std::size_t n = 0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double lambda = 0.0;  // HardReg, LambdaLB
  double eta = 0.0;     // step size the constraints were derived for
  std::size_t T = 0;    // horizon the constraints were derived for
  EpsilonSchedule epsilon;
  bool strict = false;  // HardReg: worst-case gamma1 including (lambda/3)^(T+1)
};

/// HardGD parameters. d defaults to T * 2^(n+5). gamma1 is half the
/// tightest of: 1/(2 sqrt(d) eta T), 2n/T, and the slack
/// min{eta sqrt(T), 1/3} / (16 (1 + 5 eta T) sqrt(d)). gamma2 = 2 gamma1 eta T,
/// gamma3 = 1, eps ramps up to gamma1 eta / (2n).
InstanceParams pick_gd_params(std::size_t n, std::size_t T, double eta,
                              std::optional<std::size_t> d_hint = std::nullopt);

/// HardReg parameters (regularized GD with eta_t = 2/(lambda(t+1))).
/// gamma3 = min{(lambda/2) sqrt(T-2), 1}; gamma2 takes its upper bound;
/// gamma1 takes the worst-case bound including (lambda/3)^(T+1) in strict
/// mode, or 1e-9 gamma3/(T+1) (capped by the other bounds) otherwise.
InstanceParams pick_reg_params(std::size_t n, std::size_t T, double lambda, bool strict,
                               std::optional<std::size_t> d_hint = std::nullopt);

/// Overfit construction; d defaults to 2^(n+1).
InstanceParams make_overfit_params(std::size_t n, std::optional<std::size_t> d = std::nullopt);

/// Deterministic l_inf construction; eps ramps up to 1/(2 sqrt(d)).
InstanceParams make_opt1_params(std::size_t d);

/// Deterministic scalar construction selected by eta.
InstanceParams make_opt2_params(double eta);

/// Deterministic linear construction -(min{1,lambda}/2) w(1).
InstanceParams make_lambda_lb_params(double lambda, std::size_t d = 1);

/// Sum of the regularized schedule eta_t = 2/(lambda(t+1)), t = 1..T.
double reg_step_sum(double lambda, std::size_t T);

/// Throws InfeasibleParams naming the first violated constraint.
void check_invariants(const InstanceParams& p);

/// Lipschitz constant the construction is built to respect.
double lipschitz_constant(Family f);

nlohmann::json to_json(const InstanceParams& p);
InstanceParams params_from_json(const nlohmann::json& j);

/// One data point's combinatorial part: d Bernoulli(1/2) bits, packed.
class Alpha {
 public:
  Alpha() = default;
  explicit Alpha(std::size_t d) : d_(d), words_((d + 63) / 64, 0) {}
  static Alpha from_bits(const std::vector<int>& bits);

  std::size_t size() const noexcept { return d_; }
  bool operator[](std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v) words_[i >> 6] |= mask; else words_[i >> 6] &= ~mask;
  }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }
  std::size_t popcount() const noexcept;

  friend bool operator==(const Alpha&, const Alpha&) = default;

 private:
  std::size_t d_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Each bit independently 1 with probability 1/2, 64 bits per draw.
Alpha draw_alpha(RngStream& rng, std::size_t d);

/// v_alpha(i) = +1 if alpha(i) = 1, -1/(2n) otherwise.
Vector perturbation(const Alpha& alpha, std::size_t n);

/// n i.i.d. data points with their per-coordinate bit counts c_i.
class Sample {
 public:
  explicit Sample(std::vector<Alpha> points);
  static Sample draw(RngStream& rng, std::size_t n, std::size_t d);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return d_; }
  const Alpha& operator[](std::size_t j) const noexcept { return points_[j]; }
  const std::vector<Alpha>& points() const noexcept { return points_; }
  /// Number of points with bit i set.
  std::uint32_t count(std::size_t i) const noexcept { return counts_[i]; }
  std::span<const std::uint32_t> counts() const noexcept { return counts_; }

 private:
  std::size_t d_ = 0;
  std::vector<Alpha> points_;
  std::vector<std::uint32_t> counts_;
};

/// vbar = (1/n) sum_{alpha in S} v_alpha, computed from bit counts.
Vector mean_perturbation(const Sample& S);

}  // namespace gdgap
