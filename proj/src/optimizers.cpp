#include "gdgap/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gdgap {

namespace {

// Shared driver: state, storage policy, averaging and projection logging.
class Recorder {
 public:
  Recorder(std::size_t d, std::size_t T, Weights::Scheme scheme, const RunOptions& options)
      : options_(options), weights_(Weights::of(scheme, T)) {
    traj_.scheme = scheme;
    traj_.T = T;
    traj_.d = d;
    traj_.averaged = Vector(d);
    traj_.step_sizes.reserve(T);
    store_ = options.keep_iterates && d > 0 && T + 1 <= options.storage_cap / d;
    if (store_) traj_.iterates.reserve(T + 1);
    record(0, Vector(d));
  }

  void record(std::size_t t, const Vector& w) {
    if (store_) traj_.iterates.push_back(w);
    if (std::find(options_.checkpoints.begin(), options_.checkpoints.end(), t) != options_.checkpoints.end()) {
      traj_.checkpoints.emplace_back(t, w);
    }
    if (t >= 1) traj_.averaged.axpy(weights_[t - 1], w);
  }

  Trajectory finish(Vector last) {
    traj_.final_iterate = std::move(last);
    return std::move(traj_);
  }

  Trajectory& traj() { return traj_; }

 private:
  const RunOptions& options_;
  Weights weights_;
  Trajectory traj_;
  bool store_ = false;
};

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

Trajectory run_gd(const FirstOrderOracle& oracle, double eta, std::size_t T, const RunOptions& options) {
  require_positive(eta, "eta");
  if (T < 1) throw std::invalid_argument("T >= 1");
  const std::size_t d = oracle.dim();
  Recorder rec(d, T, Weights::Scheme::Uniform, options);
  Vector w(d), g(d);
  for (std::size_t t = 0; t < T; ++t) {
    const double value = oracle.evaluate(w, g);
    if (options.observer) options.observer(t, w, value, g);
    w.axpy(-eta, g);
    if (project_unit_ball_inplace(w)) rec.traj().projection_events.push_back(t + 1);
    rec.traj().step_sizes.push_back(eta);
    rec.record(t + 1, w);
  }
  return rec.finish(std::move(w));
}

Trajectory run_sgd(const PointOracle& oracle, double eta, std::size_t T, RngStream& rng,
                   const RunOptions& options) {
  require_positive(eta, "eta");
  if (T < 1) throw std::invalid_argument("T >= 1");
  const std::size_t d = oracle.dim();
  Recorder rec(d, T, Weights::Scheme::Uniform, options);
  rec.traj().sgd_stream = std::make_pair(rng.seed(), rng.stream_id());
  const bool keep_points =
      options.keep_points && d > 0 && T <= options.storage_cap / d * 64;
  Vector w(d), g(d);
  for (std::size_t t = 0; t < T; ++t) {
    Alpha z = draw_alpha(rng, d);
    const double value = oracle.evaluate(w, z, g);
    if (options.observer) options.observer(t, w, value, g);
    w.axpy(-eta, g);
    if (project_unit_ball_inplace(w)) rec.traj().projection_events.push_back(t + 1);
    rec.traj().step_sizes.push_back(eta);
    rec.record(t + 1, w);
    if (keep_points) rec.traj().points.push_back(std::move(z));
  }
  return rec.finish(std::move(w));
}

Trajectory run_reg_gd(const FirstOrderOracle& oracle, double lambda, std::size_t T, const RunOptions& options) {
  require_positive(lambda, "lambda");
  if (T < 1) throw std::invalid_argument("T >= 1");
  const std::size_t d = oracle.dim();
  Recorder rec(d, T, Weights::Scheme::Triangular, options);
  Vector w(d), g(d);
  for (std::size_t t = 0; t < T; ++t) {
    const double value = oracle.evaluate(w, g);
    if (options.observer) options.observer(t, w, value, g);
    const double step = reg_step(lambda, t + 1);
    // w - step (lambda w + g)
    w *= 1.0 - step * lambda;
    w.axpy(-step, g);
    if (project_unit_ball_inplace(w)) rec.traj().projection_events.push_back(t + 1);
    rec.traj().step_sizes.push_back(step);
    rec.record(t + 1, w);
  }
  return rec.finish(std::move(w));
}

nlohmann::json vector_digest(const Vector& v, std::size_t top) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) idx.push_back(i);
  }
  const std::size_t nnz = idx.size();
  const std::size_t keep = std::min(top, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = std::abs(v[a]), mb = std::abs(v[b]);
                      return ma != mb ? ma > mb : a < b;
                    });
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t k = 0; k < keep; ++k) entries.push_back({{"i", idx[k]}, {"value", v[idx[k]]}});
  return {{"dim", v.size()}, {"norm", v.norm()}, {"sup_norm", v.norm_inf()},
          {"nonzeros", nnz}, {"largest", entries}};
}

nlohmann::json trajectory_summary(const Trajectory& traj, std::size_t elide_above) {
  auto vec = [&](const Vector& v) -> nlohmann::json {
    if (v.size() > elide_above) return vector_digest(v);
    return v.values();
  };
  nlohmann::json j;
  j["scheme"] = to_string(traj.scheme);
  j["T"] = traj.T;
  j["d"] = traj.d;
  j["final"] = vec(traj.final_iterate);
  j["averaged"] = vec(traj.averaged);
  j["projection_events"] = traj.projection_events;
  // A constant schedule is stored once.
  const bool constant = std::adjacent_find(traj.step_sizes.begin(), traj.step_sizes.end(),
                                           std::not_equal_to<>()) == traj.step_sizes.end();
  if (constant && !traj.step_sizes.empty()) {
    j["step_sizes"] = {{"constant", traj.step_sizes.front()}};
  } else {
    j["step_sizes"] = traj.step_sizes;
  }
  if (traj.sgd_stream) {
    j["sgd_stream"] = {{"seed", traj.sgd_stream->first}, {"stream_id", traj.sgd_stream->second}};
  }
  return j;
}

}  // namespace gdgap
