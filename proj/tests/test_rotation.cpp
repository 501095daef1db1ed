#include <doctest.h>

#include <cmath>
#include <numbers>

#include "annulus/dynamics.hpp"
#include "annulus/rotation.hpp"

using namespace annulus;

namespace {

LiftMap shear() { return fiber_shift(PiecewiseLinear({{0.0, 0.0}, {1.0, 0.5}})); }

}  // namespace

TEST_CASE("rotation interval of a rigid rotation") {
  const auto e = rotation_interval(rational_rotation(2, 5), 1000);
  CHECK(std::abs(e.lo - 0.4) <= 1e-12);
  CHECK(std::abs(e.hi - 0.4) <= 1e-12);
  CHECK(e.converged);
  CHECK(e.lo <= e.hi);
}

TEST_CASE("rotation interval of the shear") {
  const auto e = rotation_interval(shear(), 1000);
  CHECK(std::abs(e.lo - 0.0) <= 1e-3);
  CHECK(std::abs(e.hi - 0.5) <= 1e-3);
  CHECK_FALSE(e.converged);
}

TEST_CASE("rotation interval of a bump pseudo-rotation") {
  const double r = 0.1;
  const std::int64_t n = 10000;
  const auto e = rotation_interval(bump_pseudo_rotation(1, 2, {0.0, 0.5}, r, 0.4), n, 16);
  CHECK(e.lo >= 0.5 - (2 * r + 1) / n);
  CHECK(e.hi <= 0.5 + (2 * r + 1) / n);
}

TEST_CASE("deck shift moves both ends by k") {
  for (std::int64_t k : {-2, 1, 3}) {
    const auto f = shear().then(deck_shift(k));
    const auto a = rotation_interval(shear(), 100), b = rotation_interval(f, 100);
    CHECK(b.lo - a.lo == doctest::Approx(double(k)).epsilon(1e-12));
    CHECK(b.hi - a.hi == doctest::Approx(double(k)).epsilon(1e-12));
  }
}

TEST_CASE("sample refinement only widens") {
  const auto f = fiber_shift(PiecewiseLinear({{0.0, 0.1}, {0.37, -0.2}, {1.0, 0.3}}));
  auto prev = rotation_interval(f, 50, 4);
  for (int res : {8, 16, 32, 64}) {
    const auto e = rotation_interval(f, 50, res);
    CHECK(e.lo <= prev.lo);
    CHECK(e.hi >= prev.hi);
    prev = e;
  }
}

TEST_CASE("pseudo-rotation angle") {
  const auto a = pseudo_rotation_angle(rational_rotation(1, 3), 100, 1e-6);
  REQUIRE(a.has_value());
  CHECK(*a == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(pseudo_rotation_angle(shear(), 1000, 1e-2).has_value());
  const auto b = pseudo_rotation_angle(bump_pseudo_rotation(0, 1, {0.5, 0.5}, 0.1, 0.5), 10000, 1e-2,
                                       16);
  REQUIRE(b.has_value());
  CHECK(std::abs(*b) < 1e-2);
  // Conjugating by a rigid rotation does not move the angle.
  const auto g = rigid_rotation(0.27);
  const auto f = bump_pseudo_rotation(1, 2, {0.0, 0.5}, 0.2, 0.3);
  const auto conj = g.inverted().then(f).then(g);
  const auto c = pseudo_rotation_angle(conj, 4000, 1e-2, 16);
  REQUIRE(c.has_value());
  CHECK(*c == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("non-spreading defect") {
  for (std::int64_t n : {1, 10, 100}) {
    CHECK(std::abs(nonspreading_defect(rational_rotation(2, 5), n) - std::sqrt(2.0) / n) <= 1e-12);
  }
  const double d = nonspreading_defect(shear(), 1000);
  CHECK(std::abs(d - 0.5) <= 1e-2);
  // n = 1 is a plain diameter.
  CHECK(nonspreading_defect(shear(), 1) == doctest::Approx(image_diameter(shear(), 1)));
}

TEST_CASE("defect bounds the interval width") {
  const auto f = fiber_shift(PiecewiseLinear({{0.0, 0.2}, {0.5, -0.3}, {1.0, 0.1}}));
  const int per_side = 64;
  for (std::int64_t n : {5, 50, 500}) {
    const auto e = rotation_interval(f, n, per_side);
    CHECK(nonspreading_defect(f, n, per_side) >= e.width() - 2.0 / per_side);
  }
}

TEST_CASE("delta log delta") {
  const double s2 = std::sqrt(2.0);
  const double bound = s2 * std::log(s2 * std::numbers::e) / 1000.0;
  CHECK(delta_log_delta(rigid_rotation(0.3), 1000) <= bound + 1e-15);
  // The guard makes log(max(sqrt2, e)) = 1.
  CHECK(delta_log_delta(identity_map(), 1) == doctest::Approx(s2));
  // The guard: tiny diameters give delta / n.
  CHECK(delta_log_delta_value(0.5, 2) == doctest::Approx(0.25));
  // Shear: grows like log(n) / 2.
  const double a = delta_log_delta(shear(), 100), b = delta_log_delta(shear(), 10000);
  CHECK(b > a);
  CHECK(b == doctest::Approx(0.5 * std::log(5000.0)).epsilon(0.05));
}

TEST_CASE("samples and boundary") {
  CHECK(stratified_samples(4).size() == 4 * 5);
  const auto b = square_boundary(8);
  CHECK(b.size() == 4 * 8);
  CHECK(diameter(b) == doctest::Approx(std::sqrt(2.0)));
}
