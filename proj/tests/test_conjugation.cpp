#include <doctest.h>

#include <cmath>
#include <memory>

#include "annulus/conjugation.hpp"
#include "annulus/errors.hpp"

using namespace annulus;

namespace {

LiftMap bent_rotation(std::int64_t p, std::int64_t q, double amp) {
  const LiftMap gs[] = {vertical_bump(0.3),
                        fiber_shift(PiecewiseLinear({{0.0, 0.0}, {0.5, amp}, {1.0, 0.0}}))};
  const LiftMap g = compose(gs);
  return g.inverted().then(rational_rotation(p, q)).then(g);
}

CurveFamily verified(const LiftMap& f, CurveFamily fam) {
  fam.certificate = verify_family(f, fam, Tolerances{});
  return fam;
}

bool inside(const Box& b, StripPoint p, double eps) {
  const double x = p.x - std::floor(p.x - b.xmin + eps);
  return x >= b.xmin - eps && x <= b.xmax + eps && p.t >= b.tmin - eps && p.t <= b.tmax + eps;
}

}  // namespace

TEST_CASE("theoretical bound") {
  CHECK(theoretical_bound(10, 1, 10) == doctest::Approx(std::sqrt(0.18)));
  CHECK(theoretical_bound(4, 1, 3) == doctest::Approx(std::sqrt(1.25)));
  double prev = theoretical_bound(3, 1, 3);
  for (std::int64_t k = 4; k <= 64; ++k) {
    const double b = theoretical_bound(k, 1, k);
    CHECK(b <= prev);
    prev = b;
  }
  CHECK(theoretical_bound(8, 1, 8) < theoretical_bound(4, 1, 4));
  CHECK(theoretical_bound(1000, 3, 1000) < 0.01);
}

TEST_CASE("horizontal loops for a rigid rotation") {
  const auto f = rational_rotation(1, 3);
  const auto fam = verified(f, vertical_family(1, 3, 1, 1));
  const auto loops = build_loops(f, fam, 3, SearchBudget{}, Tolerances{});
  CHECK(loops.passed());
  REQUIRE(loops.loops.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(loops.loops[j].at(0.37) == doctest::Approx(j / 3.0));
}

TEST_CASE("loops for a bump pseudo-rotation, N = 4, N' = 3") {
  const auto f = bump_pseudo_rotation(0, 1, {0.5, 0.5}, 0.05, 0.3);
  const auto fam = build_curve_family(f, 0, 1, 4, 1, SearchBudget{}, Tolerances{});
  const auto loops = build_loops(f, fam, 3, SearchBudget{}, Tolerances{});
  CHECK(loops.passed());
  std::size_t between = 0;
  for (const auto& fact : loops.facts) between += fact.kind == "image-between" && fact.holds;
  CHECK(between >= 2);
}

TEST_CASE("strong vertical bump: loops pass or NoLoopsFound") {
  const auto f = vertical_bump(0.9);
  const auto fam = verified(f, vertical_family(0, 1, 2, 1, 0.1));
  SearchBudget small;
  small.loop_attempts = 4;
  try {
    const auto loops = build_loops(f, fam, 2, small, Tolerances{});
    CHECK(loops.passed());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoLoopsFound);
  }
}

TEST_CASE("flat grid and identity conjugacy") {
  const auto f = rational_rotation(0, 1);
  const auto fam = verified(f, vertical_family(0, 1, 4, 1));
  const auto loops = build_loops(f, fam, 3, SearchBudget{}, Tolerances{});
  const auto grid = build_grid(fam, loops);
  CHECK(grid.cells.size() == 12);
  CHECK(grid.area_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(grid.location_failures == 0);
  for (const auto& c : grid.cells) {
    CHECK(c.bounds.xmin == doctest::Approx(c.flat.xmin));
    CHECK(c.bounds.tmax == doctest::Approx(c.flat.tmax));
    CHECK(c.area == doctest::Approx(1.0 / 12.0));
  }
  const auto h = build_conjugacy(grid, Tolerances{});
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b <= 10; ++b) {
      const StripPoint y{a / 10.0 + 0.013, b / 10.0};
      const StripPoint z = h.forward(y);
      CHECK(std::hypot(z.x - y.x, z.t - y.t) <= 1e-12);
    }
  }
  CHECK(conjugate_distance(h, f, 0, 1, 16) <= 1e-10);
}

TEST_CASE("curved grid from the inductive family") {
  SearchBudget budget;
  Tolerances tol;
  const auto f = normalized_lift(bent_rotation(1, 3, 0.2), 1, 3, budget);
  const auto fam = build_curve_family_inductive(f, 1, 3, 2, 1, budget, tol);
  REQUIRE(fam.certificate.passed);
  const auto loops = build_loops(f, fam, 3, budget, tol);
  CHECK(loops.passed());
  const auto grid = build_grid(fam, loops);
  CHECK(grid.cells.size() == std::size_t(2 * 3 * 3));
  CHECK(std::abs(grid.area_sum - 1.0) <= 1e-6);
  CHECK(grid.location_failures == 0);
  const auto h = build_conjugacy(grid, tol);

  // Corners go to corners.
  for (const auto& c : h.grid().cells) {
    const auto& p = c.patches.front();
    const StripPoint z = h.forward(p.c00);
    CHECK(std::abs(z.x - std::floor(z.x + 0.5 - c.flat.xmin) - c.flat.xmin) <= 1e-9);
    CHECK(std::abs(z.t - c.flat.tmin) <= 1e-9);
  }
  // h h^-1 = id, and cells land in their flat cells.
  double round = 0.0;
  for (int a = 0; a < 24; ++a) {
    for (int b = 0; b <= 24; ++b) {
      const StripPoint y{(a + 0.5) / 24.0, b / 24.0};
      const StripPoint z = h.forward(h.inverse(y));
      round = std::max(round, std::hypot(z.x - y.x, z.t - y.t));
    }
  }
  CHECK(round <= tol.inv);
  for (const auto& c : h.grid().cells) {
    for (int a = 1; a < 6; ++a) {
      for (int b = 1; b < 6; ++b) {
        const StripPoint x = c.patches.size() == 1 ? c.patches[0].at(a / 6.0, b / 6.0)
                                                   : c.patches[0].at(a / 6.0, b / 6.0);
        const auto [i, j] = h.locate(x);
        if (i < 0) continue;
        const auto& home = h.grid().cell(i, j);
        CHECK(inside(home.flat, h.forward(x), tol.sep));
      }
    }
  }
  const double d = conjugate_distance(h, f, 1, 3, 32);
  CHECK(d >= 0.0);
  CHECK(d <= std::sqrt(1.25));
  CHECK(d <= theoretical_bound(2, 3, 3) + 2.0 / 32);
}

TEST_CASE("full pipeline on a rigid rotation") {
  std::unique_ptr<GridConjugacy> h;
  const auto rep = run_conjugation(rational_rotation(1, 3), 1, 3, 4, 3, SearchBudget{}, Tolerances{},
                                   32, &h);
  CHECK(rep.passed());
  CHECK(rep.achieved <= 1e-9);
  REQUIRE(h);
  CHECK(h->grid().cells.size() == std::size_t(4 * 3 * 3));
}

TEST_CASE("pipeline on a bump pseudo-rotation, N = N' = 6") {
  const auto f = bump_pseudo_rotation(0, 1, {0.5, 0.5}, 0.05, 0.3);
  const auto rep = run_conjugation(f, 0, 1, 6, 6, SearchBudget{}, Tolerances{}, 32);
  CHECK(rep.seam_mismatch <= 1e-10);
  CHECK(rep.roundtrip_defect <= 1e-10);
  CHECK(rep.containment_failures == 0);
  CHECK(rep.achieved <= rep.bound + 2.0 * rep.mesh);
  CHECK(rep.passed());
  CHECK(rep.text().find("verdict=pass") != std::string::npos);
}

TEST_CASE("pipeline rejects a spreading map") {
  const auto f = fiber_shift(PiecewiseLinear({{0.0, 0.0}, {1.0, 0.5}}));
  CHECK_THROWS_AS(run_conjugation(f, 0, 1, 2, 2, SearchBudget{}, Tolerances{}, 16), Error);
}
