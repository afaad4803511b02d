#include "gdgap/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gdgap {

double standard_normal(RngStream& rng) {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector random_ball_point(std::size_t d, RngStream& rng) {
  Vector g(d);
  for (double& x : g) x = standard_normal(rng);
  const double n = g.norm();
  if (n == 0.0) return g;
  const double radius = std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  g *= radius / n;
  return g;
}

SubgradCheckReport finite_diff_subgrad_check(const ValueFn& value_fn, const SubgradFn& subgrad_fn,
                                             const Vector& w, RngStream& rng,
                                             const SubgradCheckOptions& options) {
  if (!(options.step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  SubgradCheckReport report;
  const std::size_t d = w.size();
  const Vector g = subgrad_fn(w);
  const double fw = value_fn(w);

  report.central_diff.resize(d);
  report.diff_error.resize(d);
  Vector probe = w;
  for (std::size_t i = 0; i < d; ++i) {
    const double saved = probe[i];
    probe[i] = saved + options.step;
    const double fp = value_fn(probe);
    probe[i] = saved - options.step;
    const double fm = value_fn(probe);
    probe[i] = saved;
    report.central_diff[i] = (fp - fm) / (2.0 * options.step);
    report.diff_error[i] = std::abs(report.central_diff[i] - g[i]);
    report.max_diff_error = std::max(report.max_diff_error, report.diff_error[i]);
  }

  report.residuals.reserve(options.probes);
  report.min_residual = 0.0;
  for (std::size_t k = 0; k < options.probes; ++k) {
    const Vector u = random_ball_point(d, rng);
    const double r = value_fn(u) - fw - dot(g, u - w);
    report.residuals.push_back(r);
    report.min_residual = k == 0 ? r : std::min(report.min_residual, r);
  }
  report.inequality_violated = !report.residuals.empty() && report.min_residual < -options.tolerance;
  return report;
}

}  // namespace gdgap
