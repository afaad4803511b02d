#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gdgap/config.hpp"
#include "gdgap/errors.hpp"
#include "gdgap/experiment.hpp"
#include "gdgap/report.hpp"

using namespace gdgap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gdgap_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_hard_gd() {
  ExperimentConfig c;
  c.family = Family::HardGD;
  c.n = 6;
  c.T = 24;
  c.eta = 0.1;
  c.d = 2048;
  c.trials = 6;
  c.mc_budget = 200;
  c.seed = 3;
  c.workers = 2;
  return c;
}

}  // namespace

TEST_CASE("config JSON round trip") {
  ExperimentConfig c = small_hard_gd();
  c.stream_offset = 1000;
  c.gamma2 = 0.01;
  c.n_sgd = 400;
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(to_json(c)["optimizer"] == "gd");
  CHECK(to_json(ExperimentConfig{})["lambda"].is_null());

  const ExperimentConfig partial = config_from_json({{"family", "hard-reg"}, {"optimizer", "reg-gd"}, {"lambda", 2.0}});
  CHECK(partial.family == Family::HardReg);
  CHECK(partial.optimizer == Optimizer::RegGD);
  CHECK(partial.n == 8);
  CHECK(partial.mc_budget == 2000);
}

TEST_CASE("config validation") {
  ExperimentConfig c = small_hard_gd();
  CHECK_NOTHROW(validate(c));

  ExperimentConfig no_eta = c;
  no_eta.eta.reset();
  CHECK_THROWS(validate(no_eta));

  ExperimentConfig both = c;
  both.lambda = 1.0;
  CHECK_THROWS(validate(both));

  ExperimentConfig zero = c;
  zero.trials = 0;
  CHECK_THROWS(validate(zero));

  ExperimentConfig pair = c;
  pair.optimizer = Optimizer::RegGD;
  pair.eta.reset();
  pair.lambda = 1.0;
  CHECK_THROWS(validate(pair));

  CHECK_THROWS(parse_optimizer("adam"));
  CHECK(default_optimizer(Family::LambdaLB) == Optimizer::RegGD);
  CHECK(default_optimizer(Family::OptL1) == Optimizer::GD);
}

TEST_CASE("trials CSV format") {
  TrialRecord a;
  a.trial_id = 0;
  a.seed = 9;
  a.K = 17;
  a.projections = 2;
  a.gap_estimate = 0.25;
  a.gap_stderr = 0.125;
  TrialRecord b = a;
  b.trial_id = 1;
  b.K.reset();
  std::ostringstream os;
  write_trials_csv(os, {a, b}, 0.5);
  const std::string csv = os.str();
  CHECK(csv.rfind(std::string(kTrialsCsvHeader) + "\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.find("0,9,17,2,0.25,0.125,0.5\n") != std::string::npos);
  CHECK(csv.find("1,9,,2,0.25,0.125,0.5\n") != std::string::npos);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("run writes a self-describing report and reruns byte-identically") {
  const fs::path dir = scratch("run");
  ExperimentConfig c = small_hard_gd();
  c.output = (dir / "a" / "report.json").string();
  std::ostringstream out, log;
  REQUIRE(dispatch("run", c, out, log) == kExitPass);
  CHECK(out.str().rfind("PASS", 0) == 0);
  CHECK(!log.str().empty());

  const auto report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report["tool"]["version"] == std::string(kToolVersion));
  CHECK(report["params"]["d"] == 2048);
  CHECK(report["config"]["seed"] == 3);
  CHECK(report["records"].size() == 6);
  const std::string csv = slurp(dir / "a" / "trials.csv");
  CHECK(csv.rfind(std::string(kTrialsCsvHeader), 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  // Worker count does not change the output.
  ExperimentConfig again = c;
  again.workers = 1;
  again.output = (dir / "b" / "report.json").string();
  std::ostringstream out2, log2;
  REQUIRE(dispatch("run", again, out2, log2) == kExitPass);
  CHECK(slurp(dir / "b" / "trials.csv") == csv);
  auto r2 = nlohmann::json::parse(slurp(dir / "b" / "report.json"));
  auto r1 = report;
  r1["config"].erase("workers");
  r1["config"].erase("output");
  r2["config"].erase("workers");
  r2["config"].erase("output");
  CHECK(r1 == r2);

  // A different stream offset draws different samples.
  ExperimentConfig shifted = c;
  shifted.stream_offset = 100;
  shifted.output = (dir / "c" / "report.json").string();
  std::ostringstream out3, log3;
  REQUIRE(dispatch("run", shifted, out3, log3) == kExitPass);
  CHECK(slurp(dir / "c" / "trials.csv") != csv);
  fs::remove_all(dir);
}

TEST_CASE("configuration errors exit with 2 and write nothing") {
  const fs::path dir = scratch("errors");
  std::ostringstream out, log;

  ExperimentConfig negative = small_hard_gd();
  negative.eta = -0.1;
  negative.output = (dir / "negative.json").string();
  CHECK(dispatch("run", negative, out, log) == kExitConfig);
  CHECK_FALSE(fs::exists(dir / "negative.json"));

  ExperimentConfig broken = small_hard_gd();
  broken.gamma2 = 0.0;
  broken.output = (dir / "broken.json").string();
  CHECK(dispatch("verify", broken, out, log) == kExitConfig);
  CHECK(log.str().find("lemma preconditions unmet") != std::string::npos);

  ExperimentConfig wrong = small_hard_gd();
  wrong.lambda = 1.0;
  wrong.output = (dir / "wrong.json").string();
  CHECK(dispatch("run", wrong, out, log) == kExitConfig);
  CHECK(dispatch("bogus", small_hard_gd(), out, log) == kExitConfig);
  CHECK(fs::is_empty(dir));
  fs::remove_all(dir);
}

TEST_CASE("k-stats and verify commands") {
  const fs::path dir = scratch("cmds");
  ExperimentConfig k;
  k.n = 8;
  k.T = 8;
  k.eta = 0.1;
  k.d = 4096;
  k.trials = 50;
  k.output = (dir / "k.json").string();
  std::ostringstream out, log;
  CHECK(dispatch("k-stats", k, out, log) == kExitPass);
  const std::string csv = slurp(dir / "trials.csv");
  CHECK(csv.rfind(std::string(kTrialsCsvHeader), 0) == 0);

  ExperimentConfig v = small_hard_gd();
  v.output = (dir / "v.json").string();
  CHECK(dispatch("verify", v, out, log) == kExitPass);
  const auto rep = nlohmann::json::parse(slurp(dir / "v.json"));
  CHECK(rep["tool"]["name"] == "gdgap");
  fs::remove_all(dir);
}
