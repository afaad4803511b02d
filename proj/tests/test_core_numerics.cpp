#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "gdgap/gradcheck.hpp"
#include "gdgap/rng.hpp"
#include "gdgap/vector.hpp"

using namespace gdgap;

TEST_CASE("norms and arithmetic") {
  const Vector v{3.0, -4.0};
  CHECK(v.norm() == 5.0);
  CHECK(v.norm_inf() == 4.0);
  CHECK(dot(v, Vector{1.0, 1.0}) == -1.0);
  CHECK(distance(v, Vector{0.0, 0.0}) == 5.0);
  CHECK(sup_distance(v, Vector{1.0, 1.0}) == 5.0);

  Vector w{1.0, 2.0};
  w.axpy(2.0, Vector{1.0, -1.0});
  CHECK(w == Vector{3.0, 0.0});
  CHECK((Vector{1.0, 2.0} + Vector{1.0, 1.0}) == Vector{2.0, 3.0});
  CHECK((2.0 * Vector{1.0, 2.0}) == Vector{2.0, 4.0});
  CHECK_THROWS_AS(Vector{1.0} += Vector(2), std::invalid_argument);
}

TEST_CASE("norm does not underflow or overflow") {
  const Vector tiny{1e-200, 1e-200};
  CHECK(tiny.norm() == doctest::Approx(std::sqrt(2.0) * 1e-200).epsilon(1e-14));
  const Vector huge{1e200, 1e200};
  CHECK(std::isfinite(huge.norm()));
}

TEST_CASE("basis vector and dimension guard") {
  const Vector e = Vector::basis(4, 2, 3.0);
  CHECK(e == Vector{0.0, 0.0, 3.0, 0.0});
  CHECK_THROWS(Vector::basis(4, 4));
  CHECK_THROWS_AS(Vector(kMaxDimension + 1), std::length_error);
}

TEST_CASE("projection onto the unit ball") {
  SUBCASE("inside is untouched") {
    const Vector w{0.3, -0.4};
    CHECK(project_unit_ball(w) == w);
  }
  SUBCASE("(3,4) goes to (0.6,0.8)") {
    const Vector p = project_unit_ball(Vector{3.0, 4.0});
    CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(p.norm() <= 1.0);
  }
  SUBCASE("result never lands outside") {
    RngStream rng(11, 0);
    for (int k = 0; k < 1000; ++k) {
      Vector w(7);
      for (double& x : w) x = 10.0 * (rng.uniform01() - 0.5);
      CHECK(project_unit_ball(w).norm() <= 1.0);
    }
  }
  SUBCASE("non-finite input") {
    CHECK_THROWS_AS(project_unit_ball(Vector{std::numeric_limits<double>::quiet_NaN(), 0.0}), std::domain_error);
    CHECK_THROWS_AS(project_unit_ball(Vector{std::numeric_limits<double>::infinity()}), std::domain_error);
  }
  SUBCASE("in-place reports whether it moved") {
    Vector a{0.5, 0.5};
    CHECK_FALSE(project_unit_ball_inplace(a));
    Vector b{2.0, 0.0};
    CHECK(project_unit_ball_inplace(b));
    CHECK(b == Vector{1.0, 0.0});
  }
}

TEST_CASE("projection is idempotent and non-expansive") {
  RngStream rng(5, 1);
  for (int k = 0; k < 1000; ++k) {
    Vector a(5), b(5);
    for (double& x : a) x = 4.0 * standard_normal(rng);
    for (double& x : b) x = 4.0 * standard_normal(rng);
    const Vector pa = project_unit_ball(a);
    const Vector pb = project_unit_ball(b);
    CHECK(sup_distance(project_unit_ball(pa), pa) <= 1e-15);
    CHECK(distance(pa, pb) <= distance(a, b) + 1e-12);
  }
}

TEST_CASE("averaging weights") {
  const Weights u = Weights::uniform(4);
  for (std::size_t t = 0; t < 4; ++t) CHECK(u[t] == 0.25);

  // 2t/(T(T+1)) for T = 3: 1/6, 2/6, 3/6.
  const Weights tri = Weights::triangular(3);
  CHECK(tri[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(tri[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK(tri[2] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(Weights::from({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Weights::from({1.5, -0.5}), std::invalid_argument);
  CHECK_NOTHROW(Weights::from({0.25, 0.75}));

  const std::vector<Vector> its{Vector{1.0, 0.0}, Vector{0.0, 1.0}, Vector{1.0, 1.0}};
  const Vector avg = weighted_average(its, tri);
  CHECK(avg[0] == doctest::Approx(1.0 / 6.0 + 0.5));
  CHECK(avg[1] == doctest::Approx(2.0 / 6.0 + 0.5));
  CHECK_THROWS_AS(weighted_average(its, Weights::uniform(2)), std::invalid_argument);
}

TEST_CASE("philox known-answer vectors") {
  // Published Philox4x32-10 test vectors.
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and separated") {
  RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 100; ++k) {
    const std::uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  CHECK(seen.size() == 300);
  CHECK(a.position() == 100);

  const RngStream base(42, 3);
  RngStream l0 = lane(base, Lane::Sample);
  RngStream l1 = lane(base, Lane::Sgd);
  RngStream plain(42, 3);
  CHECK(l0.next_u64() == plain.next_u64());
  RngStream plain2(42, 3);
  CHECK(l1.next_u64() != plain2.next_u64());
}

TEST_CASE("uniform draws") {
  RngStream rng(9, 0);
  double sum = 0.0;
  const int m = 100000;
  for (int k = 0; k < m; ++k) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // stderr of the mean is 1/sqrt(12 m) ~ 9.1e-4; allow 5.
  CHECK(std::abs(sum / m - 0.5) < 5.0 * 9.2e-4);

  std::vector<int> hist(7, 0);
  for (int k = 0; k < 70000; ++k) {
    const auto x = rng.uniform_below(7);
    REQUIRE(x < 7);
    ++hist[x];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  for (int k = 0; k < 100; ++k) CHECK(rng.uniform_below(1) == 0);
}

TEST_CASE("standard normal moments") {
  RngStream rng(17, 2);
  double s = 0.0, s2 = 0.0;
  const int m = 100000;
  for (int k = 0; k < m; ++k) {
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / m) < 0.02);
  CHECK(std::abs(s2 / m - 1.0) < 0.03);
}

TEST_CASE("random ball points stay in the ball") {
  RngStream rng(1, 1);
  for (int k = 0; k < 1000; ++k) CHECK(random_ball_point(6, rng).norm() <= 1.0 + 1e-15);
}

TEST_CASE("finite-difference subgradient check") {
  RngStream rng(3, 0);
  const ValueFn f = [](const Vector& w) { return dot(w, w); };
  const SubgradFn g = [](const Vector& w) { return 2.0 * w; };
  const auto rep = finite_diff_subgrad_check(f, g, Vector{0.1, -0.2, 0.3}, rng);
  CHECK(rep.max_diff_error < 1e-8);
  CHECK_FALSE(rep.inequality_violated);
  CHECK(rep.residuals.size() == 64);

  // A wrong subgradient is caught.
  const SubgradFn bad = [](const Vector& w) { return -2.0 * w; };
  RngStream rng2(3, 0);
  const auto rep2 = finite_diff_subgrad_check(f, bad, Vector{0.5, 0.5, 0.0}, rng2);
  CHECK(rep2.max_diff_error > 0.5);
  CHECK(rep2.inequality_violated);
}
