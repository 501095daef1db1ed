#include "annulus/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/tools/toms748_solve.hpp>

#include "annulus/errors.hpp"

namespace annulus {

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

// ---------------------------------------------------------------------------
// PiecewiseLinear

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw Error(ErrorKind::ParamOutOfRange, "need at least two knots");
  if (knots_.front().first != 0.0 || knots_.back().first != 1.0)
    throw Error(ErrorKind::ParamOutOfRange, "knots must start at t=0 and end at t=1");
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (!(knots_[i].first < knots_[i + 1].first))
      throw Error(ErrorKind::ParamOutOfRange, "knot positions must increase");
  }
  for (const auto& [t, v] : knots_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::ParamOutOfRange, "non-finite knot value");
  }
}

double PiecewiseLinear::operator()(double t) const {
  if (t <= knots_.front().first) return knots_.front().second;
  if (t >= knots_.back().first) return knots_.back().second;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const auto& k) { return v < k.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  if (t == t0) return v0;
  return v0 + (v1 - v0) * ((t - t0) / (t1 - t0));
}

double PiecewiseLinear::min() const {
  double m = knots_[0].second;
  for (const auto& k : knots_) m = std::min(m, k.second);
  return m;
}

double PiecewiseLinear::max() const {
  double m = knots_[0].second;
  for (const auto& k : knots_) m = std::max(m, k.second);
  return m;
}

PiecewiseLinear PiecewiseLinear::scaled(double c) const {
  auto k = knots_;
  for (auto& [t, v] : k) v *= c;
  return PiecewiseLinear(std::move(k));
}

double bump_profile(BumpProfile w, double x) {
  if (w == BumpProfile::One) return 1.0;
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * x));
}

// ---------------------------------------------------------------------------
// Stages

namespace {

StripPoint twist(const DiskTwist& d, StripPoint p, double sign) {
  const double k = std::round(p.x - d.center.x);
  const double dx = p.x - d.center.x - k;
  const double dt = p.t - d.center.t;
  const double rho = std::hypot(dx, dt);
  if (!(rho < d.radius)) return p;
  const double th = sign * 2.0 * std::numbers::pi * d.turns * (1.0 - rho / d.radius);
  const double c = std::cos(th), s = std::sin(th);
  return {d.center.x + k + (c * dx - s * dt), d.center.t + (s * dx + c * dt)};
}

double bump_forward(const VerticalBump& b, double x, double t) {
  return t + b.eps * bump_profile(b.w, x) * t * (1.0 - t);
}

double bump_solve(const VerticalBump& b, double x, double target, double tol) {
  if (target <= 0.0) return 0.0;
  if (target >= 1.0) return 1.0;
  const double a = b.eps * bump_profile(b.w, x);
  if (a == 0.0) return target;
  auto g = [&](double t) { return t + a * t * (1.0 - t) - target; };
  std::uintmax_t iters = 200;
  auto stop = [](double lo, double hi) { return hi - lo <= 4.0 * std::numeric_limits<double>::epsilon(); };
  const auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, 1.0, -target, 1.0 - target, stop, iters);
  double t = 0.5 * (lo + hi);
  if (std::abs(g(t)) > tol)
    throw Error(ErrorKind::InverseDiverged, "fiberwise inverse residual exceeds tolerance");
  return t;
}

}  // namespace

StripPoint apply_stage(const Stage& s, StripPoint p, double tol_inv) {
  return std::visit(
      [&](const auto& st) -> StripPoint {
        using S = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<S, Rotation>) {
          return {p.x + st.alpha, p.t};
        } else if constexpr (std::is_same_v<S, FiberShift>) {
          return {p.x + st.u(p.t), p.t};
        } else if constexpr (std::is_same_v<S, VerticalBump>) {
          if (!st.inverted) return {p.x, bump_forward(st, p.x, p.t)};
          return {p.x, bump_solve(st, p.x, p.t, tol_inv)};
        } else {
          return twist(st, p, 1.0);
        }
      },
      s);
}

Stage inverse_stage(const Stage& s) {
  return std::visit(
      [](const auto& st) -> Stage {
        using S = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<S, Rotation>) {
          return Rotation{-st.alpha, st.q > 0 ? -st.p : 0, st.q};
        } else if constexpr (std::is_same_v<S, FiberShift>) {
          return FiberShift{st.u.scaled(-1.0)};
        } else if constexpr (std::is_same_v<S, VerticalBump>) {
          VerticalBump b = st;
          b.inverted = !b.inverted;
          return b;
        } else {
          DiskTwist d = st;
          d.turns = -d.turns;
          return d;
        }
      },
      s);
}

std::string describe_stage(const Stage& s) {
  return std::visit(
      [](const auto& st) -> std::string {
        using S = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<S, Rotation>) {
          if (st.q > 0) return "rotate " + std::to_string(st.p) + "/" + std::to_string(st.q);
          return "rotate " + format_double(st.alpha);
        } else if constexpr (std::is_same_v<S, FiberShift>) {
          std::string out = "fibershift pl";
          for (const auto& [t, v] : st.u.knots()) out += " " + format_double(t) + ":" + format_double(v);
          return out;
        } else if constexpr (std::is_same_v<S, VerticalBump>) {
          std::string out = "vbump eps=" + format_double(st.eps) +
                            " w=" + (st.w == BumpProfile::Cos ? "cos" : "one");
          return st.inverted ? "inverse " + out : out;
        } else {
          return "twist center=(" + format_double(st.center.x) + "," + format_double(st.center.t) +
                 ") r=" + format_double(st.radius) + " s=" + format_double(st.turns);
        }
      },
      s);
}

bool is_horizontal(const Stage& s) {
  return std::holds_alternative<Rotation>(s) || std::holds_alternative<FiberShift>(s);
}

bool is_vertical(const Stage& s) { return std::holds_alternative<VerticalBump>(s); }

std::string_view to_string(InverseMode m) {
  switch (m) {
    case InverseMode::ClosedForm: return "closed-form";
    case InverseMode::FiberwiseRoot: return "fiberwise-root";
    case InverseMode::FixedPoint: return "fixed-point";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LiftMap

LiftMap::LiftMap(std::vector<Stage> stages, std::string description)
    : stages_(std::move(stages)), description_(std::move(description)) {}

StripPoint LiftMap::forward(StripPoint p) const {
  for (const auto& s : stages_) p = apply_stage(s, p, tol_inv);
  return p;
}

StripPoint LiftMap::inverse(StripPoint p) const {
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it)
    p = apply_stage(inverse_stage(*it), p, tol_inv);
  return p;
}

StripPoint LiftMap::power(StripPoint p, std::int64_t n) const {
  if (n >= 0) {
    for (std::int64_t i = 0; i < n; ++i) p = forward(p);
  } else {
    for (std::int64_t i = 0; i < -n; ++i) p = inverse(p);
  }
  return p;
}

LiftMap LiftMap::inverted() const {
  std::vector<Stage> inv;
  inv.reserve(stages_.size());
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) inv.push_back(inverse_stage(*it));
  LiftMap out(std::move(inv), stages_.empty() ? std::string() : "inverse(" + description_ + ")");
  out.tol_inv = tol_inv;
  return out;
}

LiftMap LiftMap::then(const LiftMap& next) const {
  std::vector<Stage> st = stages_;
  st.insert(st.end(), next.stages_.begin(), next.stages_.end());
  std::string d = description_;
  if (!d.empty() && !next.description_.empty()) d += "\n";
  d += next.description_;
  LiftMap out(std::move(st), std::move(d));
  out.tol_inv = std::min(tol_inv, next.tol_inv);
  return out;
}

InverseMode LiftMap::inverse_mode() const {
  for (const auto& s : stages_) {
    if (std::holds_alternative<VerticalBump>(s)) return InverseMode::FiberwiseRoot;
  }
  return InverseMode::ClosedForm;
}

double LiftMap::displacement_bound() const {
  constexpr int res = 64;
  double m = 0.0;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j <= res; ++j) {
      const StripPoint p{static_cast<double>(i) / res, static_cast<double>(j) / res};
      m = std::max(m, std::abs(forward(p).x - p.x));
    }
  }
  return 1.5 * m;
}

// ---------------------------------------------------------------------------
// Built-in families

LiftMap identity_map() { return LiftMap(); }

LiftMap rigid_rotation(double alpha) {
  Stage s = Rotation{alpha, 0, 0};
  std::string d = describe_stage(s);
  return LiftMap({std::move(s)}, std::move(d));
}

LiftMap rational_rotation(std::int64_t p, std::int64_t q) {
  if (q <= 0) throw Error(ErrorKind::BadAngle, "denominator must be positive");
  Stage s = Rotation{static_cast<double>(p) / static_cast<double>(q), p, q};
  std::string d = describe_stage(s);
  return LiftMap({std::move(s)}, std::move(d));
}

LiftMap deck_shift(std::int64_t k) { return rational_rotation(k, 1); }

LiftMap fiber_shift(PiecewiseLinear u) {
  Stage s = FiberShift{std::move(u)};
  std::string d = describe_stage(s);
  return LiftMap({std::move(s)}, std::move(d));
}

LiftMap vertical_bump(double eps, BumpProfile w) {
  if (!(std::abs(eps) < 1.0))
    throw Error(ErrorKind::ParamOutOfRange, "vertical bump needs |eps| < 1");
  Stage s = VerticalBump{eps, w, false};
  std::string d = describe_stage(s);
  return LiftMap({std::move(s)}, std::move(d));
}

LiftMap bump_pseudo_rotation(std::int64_t p, std::int64_t q, StripPoint center, double r, double s) {
  if (q <= 0 || p < 0 || p >= q || gcd64(p, q) != 1)
    throw Error(ErrorKind::BadAngle, "need gcd(p,q)=1 and 0 <= p < q");
  if (!(r > 0.0)) throw Error(ErrorKind::ParamOutOfRange, "radius must be positive");
  if (!(std::abs(s) < 1.0)) throw Error(ErrorKind::ParamOutOfRange, "twist strength needs |s| < 1");
  if (!(r < center.t && r < 1.0 - center.t))
    throw Error(ErrorKind::ParamOutOfRange, "disk must lie inside the open annulus");
  if (!(static_cast<double>(q) * 2.0 * r < 1.0))
    throw Error(ErrorKind::DisksOverlap, "the q rotated disks are not pairwise disjoint");
  std::vector<Stage> st;
  if (s != 0.0) st.push_back(DiskTwist{center, r, s});
  st.push_back(Rotation{static_cast<double>(p) / static_cast<double>(q), p, q});
  std::string d = "bumppr " + std::to_string(p) + "/" + std::to_string(q) + " center=(" +
                  format_double(center.x) + "," + format_double(center.t) + ") r=" +
                  format_double(r) + " s=" + format_double(s);
  if (s == 0.0) d = describe_stage(st.back());
  return LiftMap(std::move(st), std::move(d));
}

LiftMap compose(std::span<const LiftMap> maps) {
  LiftMap out;
  for (const auto& m : maps) out = out.then(m);
  return out;
}

std::vector<StripPoint> iterate(const LiftMap& m, StripPoint p, std::int64_t n) {
  std::vector<StripPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(std::abs(n)) + 1);
  orbit.push_back(p);
  for (std::int64_t i = 0; i < std::abs(n); ++i) {
    p = n >= 0 ? m.forward(p) : m.inverse(p);
    orbit.push_back(p);
  }
  return orbit;
}

double equivariance_defect(const LiftMap& m, int res) {
  double worst = 0.0;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j <= res; ++j) {
      const StripPoint p{static_cast<double>(i) / res, static_cast<double>(j) / res};
      const StripPoint a = m.forward(p);
      const StripPoint b = m.forward({p.x + 1.0, p.t});
      worst = std::max({worst, std::abs(b.x - a.x - 1.0), std::abs(b.t - a.t)});
    }
  }
  return worst;
}

double inverse_defect(const LiftMap& m, int res) {
  double worst = 0.0;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j <= res; ++j) {
      const StripPoint p{static_cast<double>(i) / res, static_cast<double>(j) / res};
      const StripPoint a = m.inverse(m.forward(p));
      const StripPoint b = m.forward(m.inverse(p));
      worst = std::max({worst, std::hypot(a.x - p.x, a.t - p.t), std::hypot(b.x - p.x, b.t - p.t)});
    }
  }
  return worst;
}

}  // namespace annulus
