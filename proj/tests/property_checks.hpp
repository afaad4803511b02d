#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "gdgap/gradcheck.hpp"
#include "gdgap/oracles.hpp"
#include "gdgap/rng.hpp"
#include "gdgap/vector.hpp"

namespace gdgap::testing {

using Eval = std::function<OracleResult(const Vector&)>;

struct PropertyCounts {
  int convexity = 0;
  int subgradient = 0;
  int lipschitz = 0;
};

// Probe points spread over many magnitudes so every branch gets hit.
inline Vector probe(std::size_t d, RngStream& rng) {
  Vector w = random_ball_point(d, rng);
  w *= std::pow(10.0, -6.0 * rng.uniform01());
  return w;
}

inline PropertyCounts check_properties(const Eval& f, std::size_t d, double L, std::uint64_t seed, int probes = 1000) {
  constexpr double tol = 1e-9;
  RngStream rng(seed, 0);
  PropertyCounts c;
  for (int k = 0; k < probes; ++k) {
    const Vector w = probe(d, rng);
    const Vector u = probe(d, rng);
    const double theta = rng.uniform01();
    const OracleResult fw = f(w);
    const OracleResult fu = f(u);
    const Vector mid = theta * w + (1.0 - theta) * u;
    if (f(mid).value > theta * fw.value + (1.0 - theta) * fu.value + tol) ++c.convexity;
    if (fu.value < fw.value + dot(fw.subgrad, u - w) - tol) ++c.subgradient;
    if (std::abs(fw.value - fu.value) > L * distance(w, u) + tol) ++c.lipschitz;
  }
  return c;
}

}  // namespace gdgap::testing
