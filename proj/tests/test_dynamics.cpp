#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "annulus/dynamics.hpp"
#include "annulus/errors.hpp"
#include "annulus/map_spec.hpp"

using namespace annulus;

namespace {

std::vector<LiftMap> builtin_maps() {
  return {
      identity_map(),
      rigid_rotation(0.4),
      rational_rotation(2, 5),
      fiber_shift(PiecewiseLinear({{0.0, 0.0}, {1.0, 0.5}})),
      fiber_shift(PiecewiseLinear({{0.0, 0.1}, {0.3, -0.2}, {1.0, 0.4}})),
      vertical_bump(0.5),
      vertical_bump(-0.8, BumpProfile::One),
      bump_pseudo_rotation(0, 1, {0.5, 0.5}, 0.1, 0.5),
      bump_pseudo_rotation(1, 2, {0.0, 0.5}, 0.2, 0.3),
      parse_map_spec("vbump eps=0.3\nrotate 1/3\nfibershift pl 0:0 0.5:0.2 1:0"),
  };
}

}  // namespace

TEST_CASE("rigid rotation") {
  const auto r = rational_rotation(2, 5);
  CHECK(r.forward({0.0, 0.5}) == StripPoint{0.4, 0.5});
  const auto orbit = iterate(r, {0.0, 0.5}, 5);
  REQUIRE(orbit.size() == 6);
  CHECK(orbit.back().x == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rigid_rotation(0.0).forward({0.3, 0.7}) == StripPoint{0.3, 0.7});
  CHECK(iterate(rational_rotation(1, 3), {0, 0}, 3).back().x == doctest::Approx(1.0));
  CHECK(iterate(r, {0.2, 0.1}, 0) == std::vector<StripPoint>{{0.2, 0.1}});
}

TEST_CASE("fiber shift closed form") {
  const auto shear = fiber_shift(PiecewiseLinear({{0.0, 0.0}, {1.0, 0.5}}));
  CHECK(shear.forward({0.0, 1.0}).x == doctest::Approx(0.5));
  for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    for (std::int64_t n : {1, 10, 1000}) {
      const double x = shear.power({0.0, t}, n).x;
      CHECK(std::abs(x - n * t / 2.0) <= 1e-12 * n);
    }
  }
  const auto c = fiber_shift(PiecewiseLinear::constant(0.37));
  CHECK(c.forward({0.1, 0.4}).x == doctest::Approx(rigid_rotation(0.37).forward({0.1, 0.4}).x));
}

TEST_CASE("vertical bump") {
  CHECK(vertical_bump(0.0).forward({0.3, 0.4}) == StripPoint{0.3, 0.4});
  const auto b = vertical_bump(0.5, BumpProfile::One);
  CHECK(b.forward({0.1, 0.5}).t == doctest::Approx(0.625));
  for (double x : {0.0, 0.25, 0.6}) {
    CHECK(vertical_bump(0.9).forward({x, 0.0}).t == 0.0);
    CHECK(vertical_bump(0.9).forward({x, 1.0}).t == 1.0);
  }
  CHECK_THROWS_AS(vertical_bump(1.0), Error);
  try {
    vertical_bump(-1.2);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParamOutOfRange);
  }
}

TEST_CASE("bump pseudo-rotation") {
  CHECK(bump_pseudo_rotation(1, 3, {0.5, 0.5}, 0.1, 0.0).forward({0.2, 0.3}).x ==
        doctest::Approx(0.2 + 1.0 / 3.0));
  CHECK_NOTHROW(bump_pseudo_rotation(1, 2, {0.0, 0.5}, 0.2, 0.3));
  try {
    bump_pseudo_rotation(1, 3, {0.5, 0.5}, 0.2, 0.3);
    FAIL("expected DisksOverlap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DisksOverlap);
  }
  // Twist oracle: polar coordinates around the center.
  const double r = 0.1, s = 0.5;
  const auto f = bump_pseudo_rotation(0, 1, {0.5, 0.5}, r, s);
  for (double rho : {0.0, 0.02, 0.05, 0.09, 0.1, 0.2}) {
    for (double th : {0.0, 1.0, 2.5, 4.0}) {
      const StripPoint p{0.5 + rho * std::cos(th), 0.5 + rho * std::sin(th)};
      const double turn = rho < r ? 2.0 * std::numbers::pi * s * (1.0 - rho / r) : 0.0;
      const StripPoint e{0.5 + rho * std::cos(th + turn), 0.5 + rho * std::sin(th + turn)};
      const StripPoint g = f.forward(p);
      CHECK(std::hypot(g.x - e.x, g.t - e.t) < 1e-12);
    }
  }
}

TEST_CASE("bump pseudo-rotation has bounded spreading") {
  const auto f = bump_pseudo_rotation(0, 1, {0.5, 0.5}, 0.1, 0.5);
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j <= 16; ++j) {
      StripPoint p{i / 16.0, j / 16.0};
      const double x0 = p.x;
      for (int n = 1; n <= 1000; ++n) {
        p = f.forward(p);
        worst = std::max(worst, std::abs(p.x - x0));
      }
    }
  }
  CHECK(worst <= 2 * 0.1 + 1.0);
}

TEST_CASE("equivariance, inverse consistency and deck commutation") {
  for (const auto& m : builtin_maps()) {
    CAPTURE(m.description());
    CHECK(equivariance_defect(m) <= 1e-12);
    CHECK(inverse_defect(m) <= 1e-10);
    for (double x : {-0.3, 0.2, 0.9}) {
      for (double t : {0.0, 0.35, 1.0}) {
        const auto a = iterate(m, {x, t}, 4), b = iterate(m, {x + 1.0, t}, 4);
        for (std::size_t k = 0; k < a.size(); ++k) {
          CHECK(b[k].x - a[k].x == doctest::Approx(1.0).epsilon(1e-12));
          CHECK(b[k].t == doctest::Approx(a[k].t).epsilon(1e-12));
        }
      }
    }
    CHECK(m.forward({0.3, 0.0}).t == 0.0);
    CHECK(m.forward({0.3, 1.0}).t == 1.0);
  }
}

TEST_CASE("composition and negative iterates") {
  const LiftMap parts[] = {rigid_rotation(0.15), rigid_rotation(0.3)};
  const auto c = compose(parts);
  for (double x : {0.0, 0.4, 0.8}) CHECK(c.forward({x, 0.5}).x == doctest::Approx(x + 0.45));
  const auto f = vertical_bump(0.6).then(rational_rotation(1, 4));
  const StripPoint p{0.3, 0.4};
  const auto back = iterate(f, iterate(f, p, 7).back(), -7).back();
  CHECK(back.x == doctest::Approx(p.x).epsilon(1e-10));
  CHECK(back.t == doctest::Approx(p.t).epsilon(1e-10));
  CHECK(f.inverse_mode() == InverseMode::FiberwiseRoot);
  CHECK(rigid_rotation(0.1).inverse_mode() == InverseMode::ClosedForm);
}

TEST_CASE("displacement bound") {
  CHECK(rigid_rotation(0.4).displacement_bound() == doctest::Approx(0.6));
  CHECK(vertical_bump(0.5).displacement_bound() == 0.0);
}

TEST_CASE("map spec parsing") {
  const auto m = parse_map_spec("# shear\nfibershift pl 0:0 1:0.5\n\nrotate 2/5\n");
  CHECK(m.stages().size() == 2);
  CHECK(m.forward({0.0, 1.0}).x == doctest::Approx(0.9));
  const auto b = parse_map_spec("bumppr 1/2 center=(0,0.5) r=0.2 s=0.3");
  CHECK(b.forward({0.25, 0.9}).x == doctest::Approx(0.75));
  CHECK(parse_map_spec("vbump eps=0.5 w=one").forward({0.1, 0.5}).t == doctest::Approx(0.625));
  // The description parses back to the same map.
  const auto again = parse_map_spec(m.description());
  CHECK(again.forward({0.2, 0.3}) == m.forward({0.2, 0.3}));
}

TEST_CASE("map spec errors carry line numbers") {
  auto line_of = [](const char* text) {
    try {
      parse_map_spec(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("rotate 1/3\nspin 2") == 2);
  CHECK(line_of("rotate 1/0") == 1);
  CHECK(line_of("rotate 1/3\n\nfibershift pl 0:0 x:1") == 3);
  CHECK(line_of("vbump eps=0.2 w=square") == 1);
  try {
    parse_map_spec("vbump eps=1.5");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::ParamOutOfRange || e.kind() == ErrorKind::ParseError));
  }
}
