#pragma once

// Rotation intervals, pseudo-rotation angles, and spreading diagnostics for
// lifts, all from deterministic grid samples of the unit square.

#include <cstdint>
#include <optional>
#include <vector>

#include "annulus/dynamics.hpp"

namespace annulus {

struct RotationEstimate {
  std::int64_t n = 0;
  double lo = 0.0;
  double hi = 0.0;
  int samples = 0;
  // Midpoint of the estimate at n / 2, for the Cauchy test.
  double half_mid = 0.0;
  bool converged = false;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

// Samples x = i/r (0 <= i < r), t = j/r (0 <= j <= r) with r = resolution,
// so doubling the resolution keeps every earlier sample.
std::vector<StripPoint> stratified_samples(int resolution);

// lo/hi = min/max of (p1(f^n(x)) - p1(x)) / n over the samples. `converged`
// means the width and the n/2-to-n change are both below tol.
RotationEstimate rotation_interval(const LiftMap& m, std::int64_t n, int resolution = 32,
                                   double tol = 1e-6);

// Angle of a pseudo-rotation, reduced to [0, 1), or empty when the
// estimate is not tight or not Cauchy. Values within tol/2 below 1 are
// reported as 0.
std::optional<double> pseudo_rotation_angle(const LiftMap& m, std::int64_t n, double tol,
                                            int resolution = 32);

// Boundary of the unit square with `per_side` points on each side,
// corners included once.
std::vector<StripPoint> square_boundary(int per_side);

// Diameter of f^n applied to the sampled boundary of the unit square. The
// size measure used by the spreading diagnostics.
double image_diameter(const LiftMap& m, std::int64_t n, int per_side = 256);

double nonspreading_defect(const LiftMap& m, std::int64_t n, int per_side = 256);

// delta * log(max(delta, e)) / n with delta = image_diameter.
double delta_log_delta(const LiftMap& m, std::int64_t n, int per_side = 256);
double delta_log_delta_value(double delta, std::int64_t n);

double diameter(const std::vector<StripPoint>& pts);

}  // namespace annulus
