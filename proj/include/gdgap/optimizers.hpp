#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "gdgap/instance.hpp"
#include "gdgap/oracles.hpp"
#include "gdgap/rng.hpp"
#include "gdgap/vector.hpp"

namespace gdgap {

/// Iterates are stored only while T*d stays under this many entries.
inline constexpr std::size_t kIterateStorageCap = std::size_t{1} << 28;

/// Called once per step with the current iterate index t, w_t, and the
/// oracle output used for the update away from w_t.
using StepObserver = std::function<void(std::size_t t, const Vector& w, double value, const Vector& subgrad)>;

struct RunOptions {
  /// Keep w_0..w_T. Silently dropped when (T+1)*d exceeds the cap.
  bool keep_iterates = true;
  std::size_t storage_cap = kIterateStorageCap;
  /// Extra iterate indices to keep even without full storage.
  std::vector<std::size_t> checkpoints;
  /// SGD: keep the drawn data points (subject to the same cap, in bits).
  bool keep_points = false;
  StepObserver observer;
};

struct Trajectory {
  Weights::Scheme scheme = Weights::Scheme::Uniform;
  std::size_t T = 0;
  std::size_t d = 0;
  /// w_0..w_T when stored; empty otherwise.
  std::vector<Vector> iterates;
  std::vector<std::pair<std::size_t, Vector>> checkpoints;
  /// step_sizes[t] is the step used to move from w_t to w_{t+1}.
  std::vector<double> step_sizes;
  Vector final_iterate;
  Vector averaged;
  /// Iterate indices t+1 whose update was pulled back onto the ball.
  std::vector<std::size_t> projection_events;
  /// SGD only: drawn points z_1..z_T (if kept) and the stream that drew them.
  std::vector<Alpha> points;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> sgd_stream;

  bool has_iterates() const noexcept { return !iterates.empty(); }
  std::size_t projection_count() const noexcept { return projection_events.size(); }
};

/// Full-batch projected subgradient descent from w_0 = 0 with a constant
/// step; output is the uniform average of w_1..w_T.
Trajectory run_gd(const FirstOrderOracle& oracle, double eta, std::size_t T, const RunOptions& options = {});

/// Projected SGD: step t uses a fresh alpha drawn from rng; uniform average.
Trajectory run_sgd(const PointOracle& oracle, double eta, std::size_t T, RngStream& rng,
                   const RunOptions& options = {});

/// GD on (lambda/2)||w||^2 + F_S(w) with eta_t = 2/(lambda(t+1)): the move
/// from w_t to w_{t+1} uses eta_{t+1} = 2/(lambda(t+2)). Output is the
/// triangular average sum 2t/(T(T+1)) w_t.
Trajectory run_reg_gd(const FirstOrderOracle& oracle, double lambda, std::size_t T,
                      const RunOptions& options = {});

/// Step size eta_t = 2/(lambda(t+1)) of the regularized schedule.
inline double reg_step(double lambda, std::size_t t) noexcept {
  return 2.0 / (lambda * static_cast<double>(t + 1));
}

/// Summary for reports. Vectors longer than elide_above are replaced by
/// their norm and a support digest.
nlohmann::json trajectory_summary(const Trajectory& traj, std::size_t elide_above = 64);

/// Compact description of a vector: norm, sup-norm, nonzero count, and the
/// largest-magnitude entries.
nlohmann::json vector_digest(const Vector& v, std::size_t top = 8);

}  // namespace gdgap
