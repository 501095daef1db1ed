#pragma once

// Annulus homeomorphisms isotopic to the identity, represented by lifts to
// the strip that commute with T(x, t) = (x + 1, t). Every map is a list of
// stages applied in order; each stage has a closed-form or fiberwise inverse.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "annulus/geometry.hpp"

namespace annulus {

// Continuous piecewise-linear function on [0,1] given by knots (t_k, v_k)
// with t_0 = 0 < t_1 < ... < t_m = 1.
class PiecewiseLinear {
 public:
  explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);
  static PiecewiseLinear constant(double v) { return PiecewiseLinear({{0.0, v}, {1.0, v}}); }

  double operator()(double t) const;
  double min() const;
  double max() const;
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }
  PiecewiseLinear scaled(double c) const;

 private:
  std::vector<std::pair<double, double>> knots_;
};

enum class BumpProfile { One, Cos };

double bump_profile(BumpProfile w, double x);

struct Rotation {
  double alpha = 0.0;
  std::int64_t p = 0, q = 0;  // q > 0 when alpha was given as p/q
};

struct FiberShift {
  PiecewiseLinear u = PiecewiseLinear::constant(0.0);
};

// t -> t + eps * w(x) * t (1 - t); `inverted` marks the inverse stage.
struct VerticalBump {
  double eps = 0.0;
  BumpProfile w = BumpProfile::Cos;
  bool inverted = false;
};

// Radial twist in the disk of radius r around every translate of `center`:
// a point at distance rho turns by 2 pi turns (1 - rho/r).
struct DiskTwist {
  StripPoint center;
  double radius = 0.0;
  double turns = 0.0;
};

using Stage = std::variant<Rotation, FiberShift, VerticalBump, DiskTwist>;

StripPoint apply_stage(const Stage& s, StripPoint p, double tol_inv = 1e-10);
Stage inverse_stage(const Stage& s);
std::string describe_stage(const Stage& s);
bool is_horizontal(const Stage& s);  // moves only x
bool is_vertical(const Stage& s);    // moves only t

enum class InverseMode { ClosedForm, FiberwiseRoot, FixedPoint };

std::string_view to_string(InverseMode m);

class LiftMap {
 public:
  LiftMap() = default;  // identity
  LiftMap(std::vector<Stage> stages, std::string description);

  StripPoint forward(StripPoint p) const;
  StripPoint inverse(StripPoint p) const;
  StripPoint operator()(StripPoint p) const { return forward(p); }

  // f^n(p); negative n applies the inverse.
  StripPoint power(StripPoint p, std::int64_t n) const;

  LiftMap inverted() const;
  // this map followed by `next`.
  LiftMap then(const LiftMap& next) const;

  InverseMode inverse_mode() const;
  // Max of |p1(f(x)) - p1(x)| over a 64x64 grid of the unit square, times 1.5.
  double displacement_bound() const;

  const std::vector<Stage>& stages() const { return stages_; }
  const std::string& description() const { return description_; }
  bool is_identity() const { return stages_.empty(); }

  double tol_inv = 1e-10;

 private:
  std::vector<Stage> stages_;
  std::string description_;
};

LiftMap identity_map();
LiftMap rigid_rotation(double alpha);
LiftMap rational_rotation(std::int64_t p, std::int64_t q);
LiftMap deck_shift(std::int64_t k);
LiftMap fiber_shift(PiecewiseLinear u);
LiftMap vertical_bump(double eps, BumpProfile w = BumpProfile::Cos);
// R_{p/q} after a radial twist of strength s in the disk of radius r.
LiftMap bump_pseudo_rotation(std::int64_t p, std::int64_t q, StripPoint center, double r, double s);
LiftMap compose(std::span<const LiftMap> maps);

std::vector<StripPoint> iterate(const LiftMap& m, StripPoint p, std::int64_t n);

// Max deviation from the deck relation f(x+1,t) = f(x,t) + (1,0) on a
// res x res grid of the unit square.
double equivariance_defect(const LiftMap& m, int res = 32);
// Max |f(f^{-1}(p)) - p| and |f^{-1}(f(p)) - p| on a res x res grid.
double inverse_defect(const LiftMap& m, int res = 32);

std::int64_t gcd64(std::int64_t a, std::int64_t b);

}  // namespace annulus
