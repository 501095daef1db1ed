#include "annulus/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "annulus/errors.hpp"

namespace annulus {

std::vector<StripPoint> stratified_samples(int resolution) {
  if (resolution < 1) throw Error(ErrorKind::ParamOutOfRange, "resolution must be positive");
  std::vector<StripPoint> pts;
  pts.reserve(static_cast<std::size_t>(resolution) * (resolution + 1));
  for (int j = 0; j <= resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      pts.push_back({static_cast<double>(i) / resolution, static_cast<double>(j) / resolution});
    }
  }
  return pts;
}

RotationEstimate rotation_interval(const LiftMap& m, std::int64_t n, int resolution, double tol) {
  if (n < 1) throw Error(ErrorKind::ParamOutOfRange, "n must be at least 1");
  const auto pts = stratified_samples(resolution);
  const std::int64_t half = std::max<std::int64_t>(1, n / 2);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double hlo = lo, hhi = hi;
  for (const StripPoint p0 : pts) {
    StripPoint p = p0;
    for (std::int64_t k = 1; k <= n; ++k) {
      p = m.forward(p);
      if (k == half) {
        const double d = (p.x - p0.x) / static_cast<double>(half);
        hlo = std::min(hlo, d);
        hhi = std::max(hhi, d);
      }
    }
    const double d = (p.x - p0.x) / static_cast<double>(n);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  RotationEstimate est;
  est.n = n;
  est.lo = lo;
  est.hi = hi;
  est.samples = static_cast<int>(pts.size());
  est.half_mid = 0.5 * (hlo + hhi);
  est.converged = (hi - lo) < tol && std::abs(est.mid() - est.half_mid) < tol;
  return est;
}

std::optional<double> pseudo_rotation_angle(const LiftMap& m, std::int64_t n, double tol,
                                            int resolution) {
  if (!(tol > 0.0)) throw Error(ErrorKind::ParamOutOfRange, "tolerance must be positive");
  const RotationEstimate est = rotation_interval(m, n, resolution, tol);
  if (!est.converged) return std::nullopt;
  double a = est.mid() - std::floor(est.mid());
  if (1.0 - a < 0.5 * tol) a = 0.0;
  return a;
}

std::vector<StripPoint> square_boundary(int per_side) {
  if (per_side < 1) throw Error(ErrorKind::ParamOutOfRange, "per_side must be positive");
  std::vector<StripPoint> pts;
  pts.reserve(4 * static_cast<std::size_t>(per_side));
  const double h = 1.0 / per_side;
  for (int i = 0; i < per_side; ++i) pts.push_back({i * h, 0.0});
  for (int i = 0; i < per_side; ++i) pts.push_back({1.0, i * h});
  for (int i = 0; i < per_side; ++i) pts.push_back({1.0 - i * h, 1.0});
  for (int i = 0; i < per_side; ++i) pts.push_back({0.0, 1.0 - i * h});
  return pts;
}

double diameter(const std::vector<StripPoint>& pts) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = pts[i].x - pts[j].x, dt = pts[i].t - pts[j].t;
      d2 = std::max(d2, dx * dx + dt * dt);
    }
  }
  return std::sqrt(d2);
}

double image_diameter(const LiftMap& m, std::int64_t n, int per_side) {
  auto pts = square_boundary(per_side);
  for (auto& p : pts) p = m.power(p, n);
  return diameter(pts);
}

double nonspreading_defect(const LiftMap& m, std::int64_t n, int per_side) {
  if (n < 1) throw Error(ErrorKind::ParamOutOfRange, "n must be at least 1");
  return image_diameter(m, n, per_side) / static_cast<double>(n);
}

double delta_log_delta_value(double delta, std::int64_t n) {
  return delta * std::log(std::max(delta, std::numbers::e)) / static_cast<double>(n);
}

double delta_log_delta(const LiftMap& m, std::int64_t n, int per_side) {
  if (n < 1) throw Error(ErrorKind::ParamOutOfRange, "n must be at least 1");
  return delta_log_delta_value(image_diameter(m, n, per_side), n);
}

}  // namespace annulus
