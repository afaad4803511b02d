#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gdgap/rng.hpp"
#include "gdgap/vector.hpp"

namespace gdgap {

using ValueFn = std::function<double(const Vector&)>;
using SubgradFn = std::function<Vector(const Vector&)>;

struct SubgradCheckOptions {
  double step = 1e-6;
  std::size_t probes = 64;  // random u for the first-order inequality
  double tolerance = 1e-9;
};

struct SubgradCheckReport {
  std::vector<double> central_diff;    // per coordinate
  std::vector<double> diff_error;      // |central_diff - subgrad| per coordinate
  double max_diff_error = 0.0;
  std::vector<double> residuals;       // f(u) - f(w) - g.(u - w), one per probe
  double min_residual = 0.0;
  bool inequality_violated = false;    // some residual < -tolerance
};

/// Central differences along every coordinate plus the subgradient
/// inequality at random points u of the unit ball. Report only; never throws
/// on a failed check.
SubgradCheckReport finite_diff_subgrad_check(const ValueFn& value_fn, const SubgradFn& subgrad_fn,
                                             const Vector& w, RngStream& rng,
                                             const SubgradCheckOptions& options = {});

/// Uniform point in the unit ball of dimension d.
Vector random_ball_point(std::size_t d, RngStream& rng);

/// Standard normal via Box-Muller on the stream.
double standard_normal(RngStream& rng);

}  // namespace gdgap
