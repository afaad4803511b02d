// gdgap: generalization-gap experiments for full-batch gradient descent.
//
//   gdgap run        --family hard-gd --n 8 --T 32 --eta 0.1 --d 10240 --trials 500 --seed 7
//   gdgap verify     --family hard-reg --n 4 --T 16 --lambda 2 --strict
//   gdgap separation --n 8 --T 32 --eta 0.1 --d 10240 --n-sgd 6400
//   gdgap k-stats    --n 8 --d 10240 --eta 0.1 --T 32 --trials 1000
//
// Exit codes: 0 pass, 1 checks failed, 2 configuration or feasibility error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gdgap/experiment.hpp"
#include "gdgap/report.hpp"

namespace {

struct Flags {
  std::string config_file;
  std::string family;
  std::string optimizer;
  std::size_t n = 0, T = 0, d = 0, trials = 0, mc_budget = 0, workers = 0, n_sgd = 0, sgd_trials = 0;
  double eta = 0.0, lambda = 0.0, gamma2 = 0.0;
  std::uint64_t seed = 0, stream_offset = 0;
  bool strict = false;
  std::string output;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "JSON config file; flags override its fields");
  cmd->add_option("--family", f.family, "hard-gd | hard-reg | overfit | opt-l1 | opt-l2 | lambda-lb");
  cmd->add_option("--optimizer", f.optimizer, "gd | sgd | reg-gd (default by family)");
  cmd->add_option("--n", f.n, "sample size");
  cmd->add_option("--T", f.T, "iterations");
  cmd->add_option("--d", f.d, "dimension");
  cmd->add_option("--eta", f.eta, "step size (gd, sgd)");
  cmd->add_option("--lambda", f.lambda, "regularization (reg-gd)");
  cmd->add_option("--trials", f.trials, "independent trials");
  cmd->add_option("--mc-budget", f.mc_budget, "alpha draws per risk estimate");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--stream-offset", f.stream_offset, "added to every trial's stream id");
  cmd->add_flag("--strict", f.strict, "hard-reg: worst-case gamma1");
  cmd->add_option("--gamma2", f.gamma2, "override the derived gamma2");
  cmd->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  cmd->add_option("--output", f.output, "report path; trials.csv is written next to it");
  cmd->add_option("--n-sgd", f.n_sgd, "separation: SGD sample size");
  cmd->add_option("--sgd-trials", f.sgd_trials, "separation: SGD trials");
}

gdgap::ExperimentConfig build_config(const CLI::App* cmd, const Flags& f) {
  gdgap::ExperimentConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw std::invalid_argument("cannot read config file " + f.config_file);
    c = gdgap::config_from_json(nlohmann::json::parse(in));
  }
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--family")) {
    c.family = gdgap::parse_family(f.family);
    if (!given("--optimizer")) c.optimizer = gdgap::default_optimizer(c.family);
  }
  if (given("--optimizer")) c.optimizer = gdgap::parse_optimizer(f.optimizer);
  if (given("--n")) c.n = f.n;
  if (given("--T")) c.T = f.T;
  if (given("--d")) c.d = f.d;
  if (given("--eta")) c.eta = f.eta;
  if (given("--lambda")) c.lambda = f.lambda;
  if (given("--trials")) c.trials = f.trials;
  if (given("--mc-budget")) c.mc_budget = f.mc_budget;
  if (given("--seed")) c.seed = f.seed;
  if (given("--stream-offset")) c.stream_offset = f.stream_offset;
  if (given("--strict")) c.strict = f.strict;
  if (given("--gamma2")) c.gamma2 = f.gamma2;
  if (given("--workers")) c.workers = f.workers;
  if (given("--output")) c.output = f.output;
  if (given("--n-sgd")) c.n_sgd = f.n_sgd;
  if (given("--sgd-trials")) c.sgd_trials = f.sgd_trials;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalization-gap experiments for gradient descent"};
  app.set_version_flag("--version", std::string(gdgap::kToolVersion));
  app.require_subcommand(1);

  Flags flags;
  for (const char* name : {"run", "verify", "separation", "k-stats"}) {
    add_flags(app.add_subcommand(name), flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? gdgap::kExitPass : gdgap::kExitConfig;
  }

  const CLI::App* cmd = app.get_subcommands().front();
  gdgap::ExperimentConfig config;
  try {
    config = build_config(cmd, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gdgap::kExitConfig;
  }
  try {
    return gdgap::dispatch(cmd->get_name(), config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gdgap::kExitConfig;
  }
}
