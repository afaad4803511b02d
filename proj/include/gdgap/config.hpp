#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gdgap/instance.hpp"

namespace gdgap {

enum class Optimizer { GD, SGD, RegGD };

std::string_view to_string(Optimizer o);
Optimizer parse_optimizer(std::string_view name);

/// One experiment. Exactly one of eta / lambda is meaningful per optimizer:
/// gd and sgd take eta, reg-gd takes lambda.
struct ExperimentConfig {
  Family family = Family::HardGD;
  Optimizer optimizer = Optimizer::GD;
  std::size_t n = 8;
  std::size_t T = 32;
  std::optional<std::size_t> d;
  std::optional<double> eta;
  std::optional<double> lambda;
  std::size_t trials = 1;
  std::size_t mc_budget = 2000;
  std::uint64_t seed = 0;
  /// Added to every trial's stream id, so that two experiments sharing a
  /// seed can still draw independent streams.
  std::uint64_t stream_offset = 0;
  bool strict = false;
  /// Replaces the derived gamma2 (exercises the constraint guards).
  std::optional<double> gamma2;
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::string output = "report.json";

  // separation only: the SGD arm
  std::optional<std::size_t> n_sgd;
  std::optional<std::size_t> sgd_trials;
};

/// Default optimizer per family (reg-gd for hard-reg / lambda-lb, gd otherwise).
Optimizer default_optimizer(Family f);

/// Throws InfeasibleParams / std::invalid_argument naming the problem.
void validate(const ExperimentConfig& c);

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace gdgap
