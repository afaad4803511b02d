#include "gdgap/config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gdgap {

std::string_view to_string(Optimizer o) {
  switch (o) {
    case Optimizer::GD: return "gd";
    case Optimizer::SGD: return "sgd";
    case Optimizer::RegGD: return "reg-gd";
  }
  return "unknown";
}

Optimizer parse_optimizer(std::string_view name) {
  for (Optimizer o : {Optimizer::GD, Optimizer::SGD, Optimizer::RegGD}) {
    if (to_string(o) == name) return o;
  }
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

Optimizer default_optimizer(Family f) {
  return (f == Family::HardReg || f == Family::LambdaLB) ? Optimizer::RegGD : Optimizer::GD;
}

void validate(const ExperimentConfig& c) {
  if (c.trials < 1) throw std::invalid_argument("trials >= 1");
  if (c.T < 1) throw InfeasibleParams("T >= 1");
  if (c.n < 1) throw InfeasibleParams("n >= 1");
  if (c.mc_budget < 2) throw std::invalid_argument("mc_budget >= 2");
  if (c.d && (*c.d == 0 || *c.d > kMaxDimension)) throw InfeasibleParams("1 <= d <= 2^23");

  const bool wants_lambda = c.optimizer == Optimizer::RegGD;
  if (wants_lambda) {
    if (!c.lambda) throw std::invalid_argument("optimizer reg-gd requires lambda");
    if (c.eta) throw std::invalid_argument("optimizer reg-gd takes lambda, not eta");
    if (!(*c.lambda > 0.0) || !std::isfinite(*c.lambda)) throw InfeasibleParams("lambda > 0");
  } else {
    if (!c.eta) throw std::invalid_argument("optimizer " + std::string(to_string(c.optimizer)) + " requires eta");
    if (c.lambda) throw std::invalid_argument("optimizer " + std::string(to_string(c.optimizer)) + " takes eta, not lambda");
    if (!(*c.eta > 0.0) || !std::isfinite(*c.eta)) throw InfeasibleParams("eta > 0");
  }

  bool ok = false;
  switch (c.family) {
    case Family::HardGD: ok = c.optimizer == Optimizer::GD || c.optimizer == Optimizer::SGD; break;
    case Family::Overfit:
    case Family::OptL1:
    case Family::OptL2: ok = c.optimizer == Optimizer::GD; break;
    case Family::HardReg:
    case Family::LambdaLB: ok = c.optimizer == Optimizer::RegGD; break;
  }
  if (!ok) {
    throw std::invalid_argument("family " + std::string(to_string(c.family)) + " does not support optimizer " +
                                std::string(to_string(c.optimizer)));
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["family"] = std::string(to_string(c.family));
  j["optimizer"] = std::string(to_string(c.optimizer));
  j["n"] = c.n;
  j["T"] = c.T;
  j["d"] = c.d ? nlohmann::json(*c.d) : nlohmann::json(nullptr);
  j["eta"] = c.eta ? nlohmann::json(*c.eta) : nlohmann::json(nullptr);
  j["lambda"] = c.lambda ? nlohmann::json(*c.lambda) : nlohmann::json(nullptr);
  j["trials"] = c.trials;
  j["mc_budget"] = c.mc_budget;
  j["seed"] = c.seed;
  j["stream_offset"] = c.stream_offset;
  j["strict"] = c.strict;
  j["gamma2"] = c.gamma2 ? nlohmann::json(*c.gamma2) : nlohmann::json(nullptr);
  j["workers"] = c.workers;
  j["output"] = c.output;
  j["n_sgd"] = c.n_sgd ? nlohmann::json(*c.n_sgd) : nlohmann::json(nullptr);
  j["sgd_trials"] = c.sgd_trials ? nlohmann::json(*c.sgd_trials) : nlohmann::json(nullptr);
  return j;
}

namespace {

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<T>();
  }
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
  c.optimizer = default_optimizer(c.family);
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  read_field(j, "n", c.n);
  read_field(j, "T", c.T);
  read_optional(j, "d", c.d);
  read_optional(j, "eta", c.eta);
  read_optional(j, "lambda", c.lambda);
  read_field(j, "trials", c.trials);
  read_field(j, "mc_budget", c.mc_budget);
  read_field(j, "seed", c.seed);
  read_field(j, "stream_offset", c.stream_offset);
  read_field(j, "strict", c.strict);
  read_optional(j, "gamma2", c.gamma2);
  read_field(j, "workers", c.workers);
  read_field(j, "output", c.output);
  read_optional(j, "n_sgd", c.n_sgd);
  read_optional(j, "sgd_trials", c.sgd_trials);
  return c;
}

}  // namespace gdgap
