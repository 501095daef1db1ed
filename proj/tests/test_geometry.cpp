#include <doctest.h>

#include <random>
#include <sstream>

#include "annulus/errors.hpp"
#include "annulus/geometry.hpp"
#include "oracles.hpp"

using namespace annulus;

namespace {

SpanningArc zigzag() {
  // Crosses x = 0.5 once, between t = 0.4 and t = 0.6.
  return SpanningArc({{0.3, 0.0}, {0.35, 0.4}, {0.65, 0.6}, {0.7, 1.0}});
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("side of a vertical arc") {
  const auto v = SpanningArc::vertical(0.5);
  CHECK(side_of_arc(v, {0.2, 0.3}) == Side::Left);
  CHECK(side_of_arc(v, {0.9, 0.3}) == Side::Right);
  CHECK(side_of_arc(v, {0.5, 0.7}) == Side::On);
}

TEST_CASE("side through vertices and far away") {
  const auto z = zigzag();
  CHECK(side_of_arc(z, {0.35, 0.2}) == Side::Right);  // ray through t = 0.4 vertex height
  CHECK(side_of_arc(z, {0.2, 0.4}) == Side::Left);
  CHECK(side_of_arc(z, {0.9, 0.4}) == Side::Right);
  CHECK(side_of_arc(z, {-50.0, 0.5}) == Side::Left);
  CHECK(side_of_arc(z, {50.0, 0.5}) == Side::Right);
  CHECK(side_of_arc(z, {0.5, 0.5}) == Side::On);
}

TEST_CASE("arc validation") {
  CHECK(kind_of([] { SpanningArc({{0, 0}, {0, 0}, {0, 1}}); }) == ErrorKind::DegenerateArc);
  CHECK(kind_of([] { SpanningArc({{0, 0.1}, {0, 1}}); }) == ErrorKind::DegenerateArc);
  CHECK(kind_of([] { SpanningArc({{0, 0}, {0, 1.0}, {0.2, 1}}); }) == ErrorKind::DegenerateArc);
  // Self-crossing polyline.
  CHECK(kind_of([] {
          SpanningArc({{0, 0}, {1, 0.5}, {1, 0.2}, {0, 0.6}, {0, 1}});
        }) == ErrorKind::DegenerateArc);
  // Non-monotone in t is allowed.
  CHECK_NOTHROW(SpanningArc({{0, 0}, {0, 0.6}, {0.3, 0.6}, {0.3, 0.3}, {0.6, 0.3}, {0.6, 1}}));
}

TEST_CASE("strictly right") {
  const auto a = SpanningArc::vertical(0.7), b = SpanningArc::vertical(0.2);
  CHECK(arc_strictly_right_of(a, b));
  CHECK_FALSE(arc_strictly_right_of(b, a));
  CHECK_FALSE(arc_strictly_right_of(a, a));
  CHECK_FALSE(arc_strictly_right_of(zigzag(), SpanningArc::vertical(0.5)));
  CHECK_FALSE(arc_strictly_right_of(SpanningArc::vertical(0.5), zigzag()));
  // Closer than the separation tolerance counts as a violation.
  CHECK_FALSE(arc_strictly_right_of(SpanningArc::vertical(0.2 + 1e-12), b));
  CHECK(arc_strictly_right_of(SpanningArc::vertical(0.2 + 1e-6), b));
  // Shifted form.
  CHECK(arc_strictly_right_of(b, 1.0, a, 1e-9));
  CHECK_FALSE(arc_strictly_right_of(b, 0.0, a, 1e-9));
}

TEST_CASE("right-of is antisymmetric on random arcs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const auto a = oracle::wiggle(off(rng), oracle::random_shape(rng, 6, 0.3));
    const auto b = oracle::wiggle(off(rng), oracle::random_shape(rng, 6, 0.3));
    const bool ab = arc_strictly_right_of(a, b), ba = arc_strictly_right_of(b, a);
    CHECK_FALSE((ab && ba));
    CHECK(ab == (oracle::graph_gap(a, 0.0, b) >= 1e-9));
  }
}

TEST_CASE("translate") {
  const auto v = SpanningArc::vertical(0.2);
  CHECK(translate_arc(v, {1}).vertices().front().x == doctest::Approx(1.2));
  CHECK(translate_arc(v, {0}).vertices() == v.vertices());
  const auto z = zigzag();
  const auto back = translate_arc(translate_arc(z, {-2}), {2});
  REQUIRE(back.size() == z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(std::abs(back.vertices()[i].x - z.vertices()[i].x) <= 1e-15);
    CHECK(back.vertices()[i].t == z.vertices()[i].t);
  }
}

TEST_CASE("side is deck covariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-1.0, 2.0), ut(0.0, 1.0);
  const auto z = zigzag();
  for (int s = 0; s < 300; ++s) {
    const StripPoint p{ux(rng), ut(rng)};
    for (std::int64_t k : {-3, -1, 2, 5}) {
      CHECK(side_of_arc(translate_arc(z, {k}), DeckTranslate{k}.apply(p)) == side_of_arc(z, p));
    }
  }
}

TEST_CASE("side is constant along paths avoiding the arc") {
  // Points on a horizontal path at t = 0.9, which stays left of x = 0.6
  // where the zigzag sits near the top.
  const auto z = zigzag();
  for (double x = -2.0; x < 0.6; x += 0.05) CHECK(side_of_arc(z, {x, 0.9}) == Side::Left);
  for (double x = 0.8; x < 3.0; x += 0.05) CHECK(side_of_arc(z, {x, 0.9}) == Side::Right);
}

TEST_CASE("annulus betweenness on verticals") {
  const auto a = SpanningArc::vertical(0.0), b = SpanningArc::vertical(0.3),
             c = SpanningArc::vertical(0.7);
  CHECK(annulus_strictly_between(a, b, c));
  CHECK_FALSE(annulus_strictly_between(a, c, b));
  CHECK(kind_of([&] { annulus_strictly_between(a, translate_arc(a, {1}), c); }) ==
        ErrorKind::NotDisjoint);
  CHECK(kind_of([&] { annulus_strictly_between(a, zigzag(), SpanningArc::vertical(0.5)); }) ==
        ErrorKind::NotDisjoint);
}

TEST_CASE("betweenness matches the lift enumeration and is deck invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> off(-1.5, 1.5);
  int agreements = 0;
  for (int k = 0; k < 100; ++k) {
    const auto shape = oracle::random_shape(rng, 7, 0.4);
    const double a1 = off(rng), a2 = off(rng), a3 = off(rng);
    const auto g1 = oracle::wiggle(a1, shape), g2 = oracle::wiggle(a2, shape),
               g3 = oracle::wiggle(a3, shape);
    const SpanningArc* all[] = {&g1, &g2, &g3};
    const bool got = annulus_strictly_between(g1, g2, g3);
    CHECK(got == oracle::between_bruteforce(g1, g2, g3, lift_window(all) + 2));
    CHECK(got == oracle::cyclic_between(a1, a2, a3));
    const DeckTranslate d{std::int64_t(k % 5) - 2};
    CHECK(got == annulus_strictly_between(translate_arc(g1, d), translate_arc(g2, d),
                                          translate_arc(g3, d)));
    agreements += got;
  }
  CHECK(agreements > 10);
  CHECK(agreements < 90);
}

TEST_CASE("arc csv round trip") {
  const SpanningArc a({{0.1, 0.0}, {0.123456789012345, 0.3}, {-0.7, 0.55}, {0.25, 1.0}});
  std::stringstream ss;
  write_arc_csv(ss, a);
  CHECK(ss.str().rfind("t,x\n", 0) == 0);
  const auto b = read_arc_csv(ss);
  CHECK(b.vertices() == a.vertices());
}

TEST_CASE("annulus metric") {
  CHECK(circle_distance(0.1, 0.9) == doctest::Approx(0.2));
  CHECK(circle_distance(3.25, -0.25) == doctest::Approx(0.5));
  CHECK(annulus_distance({0.0, 0.0}, {0.5, 1.0}) == doctest::Approx(std::sqrt(1.25)));
}
