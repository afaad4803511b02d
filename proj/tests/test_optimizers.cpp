#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gdgap/analysis.hpp"
#include "gdgap/optimizers.hpp"

using namespace gdgap;

namespace {

void check_trajectory_invariants(const Trajectory& tr) {
  REQUIRE(tr.has_iterates());
  REQUIRE(tr.iterates.size() == tr.T + 1);
  CHECK(tr.iterates.front() == Vector(tr.d));
  for (const auto& w : tr.iterates) CHECK(w.norm() <= 1.0 + 1e-12);
  const Weights wts = Weights::of(tr.scheme, tr.T);
  const Vector avg = weighted_average(std::span(tr.iterates).subspan(1), wts);
  CHECK(sup_distance(avg, tr.averaged) < 1e-14);
  CHECK(tr.final_iterate == tr.iterates.back());
}

}  // namespace

TEST_CASE("zero oracle leaves every method at the origin") {
  const ZeroOracle z(5);
  RngStream rng(1, 0);
  for (const Trajectory& tr : {run_gd(z, 0.3, 10), run_sgd(z, 0.3, 10, rng), run_reg_gd(z, 0.5, 10)}) {
    for (const auto& w : tr.iterates) CHECK(w == Vector(5));
    CHECK(tr.averaged == Vector(5));
    CHECK(tr.projection_count() == 0);
  }
}

TEST_CASE("GD on the hard instance follows the closed form") {
  const InstanceParams p = pick_gd_params(6, 24, 0.1, 2048);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngStream rng(seed, 0);
    const Sample S = Sample::draw(rng, 6, p.d);
    const BadSet bad = bad_set(S);
    const Trajectory tr = run_gd(HardEmpiricalOracle(p, S), 0.1, 24);
    check_trajectory_invariants(tr);
    CHECK(tr.scheme == Weights::Scheme::Uniform);
    for (std::size_t t = 0; t <= 24; ++t) {
      CHECK(sup_distance(tr.iterates[t], predicted_gd_iterate(t, p, S, bad)) <= 1e-9);
    }
  }
}

TEST_CASE("GD on the large-step scalar instance alternates") {
  const Trajectory a = run_gd(Opt2Oracle(0.5), 0.5, 8);
  for (std::size_t t = 1; t <= 8; ++t) CHECK(a.iterates[t][0] == (t % 2 == 1 ? 0.5 : 0.0));
  CHECK(a.projection_count() == 0);

  const Trajectory b = run_gd(Opt2Oracle(2.0), 2.0, 8);
  for (std::size_t t = 1; t <= 8; ++t) CHECK(b.iterates[t][0] == (t % 2 == 1 ? 1.0 : -1.0));
  CHECK(b.projection_count() == 8);
  CHECK(b.projection_events.front() == 1);
}

TEST_CASE("SGD is reproducible and replayable") {
  const InstanceParams p = pick_gd_params(4, 16, 0.1, 512);
  const HardPointOracle o(p);
  RunOptions opts;
  opts.keep_points = true;
  RngStream r1(7, 3), r2(7, 3);
  const Trajectory a = run_sgd(o, 0.05, 40, r1, opts);
  const Trajectory b = run_sgd(o, 0.05, 40, r2, opts);
  CHECK(a.iterates == b.iterates);
  CHECK(a.averaged == b.averaged);
  REQUIRE(a.points.size() == 40);
  REQUIRE(a.sgd_stream.has_value());
  CHECK(a.sgd_stream->first == 7);
  CHECK(a.sgd_stream->second == 3);
  check_trajectory_invariants(a);

  // Replay from the recorded points.
  Vector w(p.d), g(p.d);
  for (std::size_t t = 0; t < 40; ++t) {
    o.evaluate(w, a.points[t], g);
    w.axpy(-0.05, g);
    project_unit_ball_inplace(w);
    CHECK(w == a.iterates[t + 1]);
  }
}

TEST_CASE("SGD population gap stays under the standard bound") {
  // n = T = 1600, eta = 1/(3 sqrt n): bound 3/sqrt(1600) = 0.075.
  const InstanceParams p = pick_gd_params(8, 32, 0.1, 1024);
  const HardPointOracle o(p);
  const double eta = 1.0 / 120.0;
  std::vector<double> gaps;
  for (std::size_t trial = 0; trial < 50; ++trial) {
    RngStream base(21, trial);
    RngStream sgd = lane(base, Lane::Sgd);
    RngStream mc = lane(base, Lane::MonteCarlo);
    RunOptions opts;
    opts.keep_iterates = false;
    const Trajectory tr = run_sgd(o, eta, 1600, sgd, opts);
    gaps.push_back(pop_risk_mc(tr.averaged, p, 500, mc).mean);
  }
  const auto [mean, se] = mean_stderr(gaps);
  CHECK(mean <= 0.075);
  CHECK(se >= 0.0);
}

TEST_CASE("regularized GD step schedule and fixed point") {
  for (double lambda : {0.2, 0.5, 1.0}) {
    const Trajectory tr = run_reg_gd(LambdaLBOracle(3, lambda), lambda, 12);
    check_trajectory_invariants(tr);
    CHECK(tr.scheme == Weights::Scheme::Triangular);
    for (std::size_t t = 0; t < 12; ++t) {
      CHECK(tr.step_sizes[t] == doctest::Approx(2.0 / (lambda * static_cast<double>(t + 2))).epsilon(1e-15));
    }
    CHECK(tr.iterates[1][0] == doctest::Approx(0.5).epsilon(1e-15));
    for (std::size_t t = 1; t <= 12; ++t) CHECK(sup_distance(tr.iterates[t], tr.iterates[1]) < 1e-15);
  }
  const Trajectory big = run_reg_gd(LambdaLBOracle(1, 2.0), 2.0, 6);
  CHECK(big.iterates[1][0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("regularized GD unrolls to a weighted gradient sum") {
  // f(w) = 0.05 ||w - a||^2 keeps every iterate inside the ball.
  const Vector a{0.3, -0.2, 0.1, 0.4};
  const FunctionOracle f(4, [&](const Vector& w) {
    const Vector r = w - a;
    return OracleResult{0.05 * dot(r, r), 0.1 * r};
  });
  const double lambda = 0.7;
  std::vector<Vector> grads;
  RunOptions opts;
  opts.observer = [&](std::size_t, const Vector&, double, const Vector& g) { grads.push_back(g); };
  const Trajectory tr = run_reg_gd(f, lambda, 30, opts);
  REQUIRE(tr.projection_count() == 0);
  Vector acc(4);
  for (std::size_t t = 0; t < 30; ++t) {
    acc.axpy(static_cast<double>(t + 1), grads[t]);
    const double scale = -2.0 / (lambda * static_cast<double>((t + 1) * (t + 2)));
    CHECK(sup_distance(tr.iterates[t + 1], scale * acc) < 1e-12);
  }
}

TEST_CASE("GD optimization guarantee on sampled instances") {
  const InstanceParams p = pick_gd_params(5, 20, 0.1, 1024);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngStream rng(seed, 9);
    const Sample S = Sample::draw(rng, 5, p.d);
    const HardEmpiricalOracle F(p, S);
    const Trajectory tr = run_gd(F, 0.1, 20);
    double best = F(tr.iterates[0]).value;
    for (const auto& w : tr.iterates) best = std::min(best, F(w).value);
    CHECK(F(tr.averaged).value - best <= 1.0 / (2.0 * 0.1 * 20.0) + 9.0 * 0.1 / 2.0 + 1e-9);
  }
}

TEST_CASE("storage cap keeps only averages and checkpoints") {
  const Opt2Oracle o(0.5);
  RunOptions opts;
  opts.keep_iterates = false;
  opts.checkpoints = {3, 7};
  const Trajectory lean = run_gd(o, 0.5, 10, opts);
  const Trajectory full = run_gd(o, 0.5, 10);
  CHECK_FALSE(lean.has_iterates());
  CHECK(lean.averaged == full.averaged);
  REQUIRE(lean.checkpoints.size() == 2);
  CHECK(lean.checkpoints[0].first == 3);
  CHECK(lean.checkpoints[0].second == full.iterates[3]);
  CHECK(lean.checkpoints[1].second == full.iterates[7]);

  RunOptions capped;
  capped.storage_cap = 5;
  CHECK_FALSE(run_gd(o, 0.5, 10, capped).has_iterates());
}

TEST_CASE("argument checks") {
  const ZeroOracle z(2);
  CHECK_THROWS_AS(run_gd(z, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(run_gd(z, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_reg_gd(z, -1.0, 5), std::invalid_argument);
}

TEST_CASE("trajectory summary") {
  const Trajectory small = run_gd(Opt2Oracle(2.0), 2.0, 4);
  const auto j = trajectory_summary(small);
  CHECK(j["scheme"] == "uniform");
  CHECK(j["final"].is_array());
  CHECK(j["step_sizes"]["constant"] == 2.0);
  CHECK(j["projection_events"].size() == 4);

  const Trajectory wide = run_gd(ZeroOracle(100), 0.1, 3);
  const auto k = trajectory_summary(wide);
  CHECK(k["final"].is_object());
  CHECK(k["final"]["dim"] == 100);

  const Trajectory reg = run_reg_gd(ZeroOracle(2), 1.0, 3);
  CHECK(trajectory_summary(reg)["step_sizes"].is_array());
}
