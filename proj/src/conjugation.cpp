#include "annulus/conjugation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {

namespace {

std::int64_t imod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

bool point_in_polygon(const std::vector<StripPoint>& poly, StripPoint p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const StripPoint a = poly[j], b = poly[i];
    if ((a.t > p.t) != (b.t > p.t)) {
      const double x = a.x + (p.t - a.t) / (b.t - a.t) * (b.x - a.x);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double polygon_area(const std::vector<StripPoint>& poly) {
  double s = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
    s += poly[j].x * poly[i].t - poly[i].x * poly[j].t;
  return 0.5 * s;
}

// Values of t - g(x) along a segment, at its endpoints and at the graph
// knots it passes over, in order along the segment.
void graph_offsets(const GraphLoop& g, StripPoint a, StripPoint b, std::vector<double>& out) {
  out.clear();
  out.push_back(a.t - g.at(a.x));
  if (a.x != b.x) {
    auto ks = g.knots_between(std::min(a.x, b.x), std::max(a.x, b.x));
    if (b.x < a.x) std::reverse(ks.begin(), ks.end());
    for (double x : ks) {
      const double u = (x - a.x) / (b.x - a.x);
      out.push_back(a.t + u * (b.t - a.t) - g.at(x));
    }
  }
  out.push_back(b.t - g.at(b.x));
}

// Minimum of sign * (t - g(x)) over a polyline.
double min_offset(const GraphLoop& g, const std::vector<StripPoint>& pts, double sign) {
  double m = std::numeric_limits<double>::infinity();
  std::vector<double> vals;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    graph_offsets(g, pts[i], pts[i + 1], vals);
    for (double v : vals) m = std::min(m, sign * v);
  }
  if (pts.size() == 1) m = sign * (pts[0].t - g.at(pts[0].x));
  return m;
}

struct Crossing {
  std::size_t seg = 0;  // segment index along the arc
  StripPoint pt;
};

// Crossings of an arc with a graph loop; `transversal` is false if the arc
// touches the graph without crossing.
std::vector<Crossing> arc_crossings(const SpanningArc& arc, const GraphLoop& g, bool& transversal) {
  std::vector<Crossing> out;
  transversal = true;
  const auto& v = arc.vertices();
  for (std::size_t s = 0; s + 1 < v.size(); ++s) {
    const StripPoint a = v[s], b = v[s + 1];
    std::vector<double> xs{a.x};
    if (a.x != b.x) {
      auto ks = g.knots_between(std::min(a.x, b.x), std::max(a.x, b.x));
      if (b.x < a.x) std::reverse(ks.begin(), ks.end());
      xs.insert(xs.end(), ks.begin(), ks.end());
    }
    xs.push_back(b.x);
    auto param = [&](std::size_t k) -> double {
      if (k == 0) return 0.0;
      if (k + 1 == xs.size()) return 1.0;
      return (xs[k] - a.x) / (b.x - a.x);
    };
    auto point = [&](double u) { return StripPoint{a.x + u * (b.x - a.x), a.t + u * (b.t - a.t)}; };
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      const double u0 = param(k), u1 = param(k + 1);
      const StripPoint p0 = point(u0), p1 = point(u1);
      const double h0 = p0.t - g.at(p0.x), h1 = p1.t - g.at(p1.x);
      if (h1 == 0.0 && !(s + 2 == v.size() && k + 2 == xs.size())) {
        transversal = false;
        continue;
      }
      if ((h0 < 0.0 && h1 > 0.0) || (h0 > 0.0 && h1 < 0.0)) {
        const double w = h0 / (h0 - h1);
        const double u = u0 + w * (u1 - u0);
        StripPoint c = point(u);
        c.t = g.at(c.x);
        out.push_back({s, c});
      }
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Loops

double GraphLoop::at(double x) const {
  const auto K = static_cast<std::int64_t>(values.size());
  if (K == 1) return values[0];
  const double u = x * static_cast<double>(K);
  const double fl = std::floor(u);
  const auto k = static_cast<std::int64_t>(fl);
  const double w = u - fl;
  const double v0 = values[static_cast<std::size_t>(imod(k, K))];
  const double v1 = values[static_cast<std::size_t>(imod(k + 1, K))];
  return v0 + w * (v1 - v0);
}

std::vector<double> GraphLoop::knots_between(double x0, double x1) const {
  std::vector<double> out;
  if (values.size() == 1) return out;  // constant: no kinks
  const double K = static_cast<double>(values.size());
  for (double k = std::floor(x0 * K) + 1.0; k / K < x1; k += 1.0) {
    if (k / K > x0) out.push_back(k / K);
  }
  return out;
}

std::vector<StripPoint> GraphLoop::polyline(double x0, double x1) const {
  std::vector<StripPoint> pts{{x0, at(x0)}};
  for (double x : knots_between(x0, x1)) pts.push_back({x, at(x)});
  pts.push_back({x1, at(x1)});
  return pts;
}

bool LoopFamily::passed() const {
  return !facts.empty() &&
         std::all_of(facts.begin(), facts.end(), [](const LoopFact& f) { return f.holds; });
}

std::vector<LoopFact> check_loops(const LiftMap& f, const CurveFamily& fam,
                                  const std::vector<GraphLoop>& loops, const Tolerances& tol) {
  std::vector<LoopFact> facts;
  const auto Np = static_cast<std::int64_t>(loops.size()) - 1;
  {
    LoopFact b;
    b.kind = "boundary";
    b.holds = Np >= 1 &&
              std::all_of(loops.front().values.begin(), loops.front().values.end(),
                          [](double v) { return v == 0.0; }) &&
              std::all_of(loops.back().values.begin(), loops.back().values.end(),
                          [](double v) { return v == 1.0; });
    facts.push_back(b);
    if (!b.holds) return facts;
  }
  for (std::int64_t j = 0; j < Np; ++j) {
    const GraphLoop& lo = loops[static_cast<std::size_t>(j)];
    const GraphLoop& hi = loops[static_cast<std::size_t>(j + 1)];
    LoopFact o;
    o.kind = "ordered";
    o.j = j;
    o.holds = min_offset(lo, hi.polyline(0.0, 1.0), 1.0) > tol.sep &&
              min_offset(hi, lo.polyline(0.0, 1.0), -1.0) > tol.sep;
    facts.push_back(o);
  }
  for (std::int64_t j = 1; j < Np; ++j) {
    const GraphLoop& g = loops[static_cast<std::size_t>(j)];
    LoopFact im;
    im.kind = "image-between";
    im.j = j;
    try {
      const auto img = image_polyline(f, g.polyline(0.0, 1.0), 1, tol.curve);
      const double below = min_offset(loops[static_cast<std::size_t>(j - 1)], img, 1.0);
      const double above = min_offset(loops[static_cast<std::size_t>(j + 1)], img, -1.0);
      im.holds = below > tol.sep && above > tol.sep;
      if (!im.holds)
        im.note = "clearance below " + format_double(below) + ", above " + format_double(above);
    } catch (const Error& e) {
      im.note = e.what();
    }
    facts.push_back(im);
    for (std::int64_t i = 0; i < fam.size(); ++i) {
      LoopFact c;
      c.kind = "crossing";
      c.j = j;
      c.i = i;
      bool transversal = true;
      const auto xs = arc_crossings(fam.curves[static_cast<std::size_t>(i)], g, transversal);
      c.holds = transversal && xs.size() == 1;
      if (!c.holds)
        c.note = std::to_string(xs.size()) + " crossings" + (transversal ? "" : ", tangency");
      facts.push_back(c);
    }
  }
  return facts;
}

LoopFamily build_loops(const LiftMap& f, const CurveFamily& fam, std::int64_t Nprime,
                       const SearchBudget& budget, const Tolerances& tol) {
  if (Nprime < 1) throw Error(ErrorKind::ParamOutOfRange, "N' must be positive");
  LoopFamily lf;
  lf.Nprime = Nprime;
  const double h = 1.0 / static_cast<double>(Nprime);
  for (std::int64_t j = 0; j <= Nprime; ++j)
    lf.loops.push_back(GraphLoop::horizontal(j == Nprime ? 1.0 : static_cast<double>(j) * h));
  lf.facts = check_loops(f, fam, lf.loops, tol);

  // Local repair: move a failing interior loop up or down inside its slot.
  static const double offsets[] = {0.25, -0.25, 0.125, -0.125, 0.375, -0.375, 0.0625, -0.0625};
  for (int attempt = 0; attempt < budget.loop_attempts && !lf.passed(); ++attempt) {
    std::int64_t bad = -1;
    for (const auto& fact : lf.facts) {
      if (!fact.holds && fact.j >= 1 && fact.j < Nprime) {
        bad = fact.j;
        break;
      }
    }
    if (bad < 0) break;
    const double base = static_cast<double>(bad) * h;
    std::size_t best_fail = std::numeric_limits<std::size_t>::max();
    std::vector<GraphLoop> best;
    std::vector<LoopFact> best_facts;
    for (double o : offsets) {
      auto trial = lf.loops;
      trial[static_cast<std::size_t>(bad)] = GraphLoop::horizontal(base + o * h);
      auto facts = check_loops(f, fam, trial, tol);
      const auto fails = static_cast<std::size_t>(
          std::count_if(facts.begin(), facts.end(), [](const LoopFact& x) { return !x.holds; }));
      if (fails < best_fail) {
        best_fail = fails;
        best = std::move(trial);
        best_facts = std::move(facts);
      }
    }
    const auto current = static_cast<std::size_t>(
        std::count_if(lf.facts.begin(), lf.facts.end(), [](const LoopFact& x) { return !x.holds; }));
    if (best_fail >= current) break;
    lf.loops = std::move(best);
    lf.facts = std::move(best_facts);
  }
  if (!lf.passed()) {
    std::size_t fails = 0;
    for (const auto& x : lf.facts) fails += !x.holds;
    throw Error(ErrorKind::NoLoopsFound,
                std::to_string(fails) + " loop conditions still fail after the search budget");
  }
  return lf;
}

// ---------------------------------------------------------------------------
// Edges and patches

EdgeCurve::EdgeCurve(std::vector<StripPoint> p, double a_, double b_, double height_weight)
    : pts(std::move(p)), a(a_), b(b_) {
  if (pts.empty()) return;
  cum.assign(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double dt = std::abs(pts[i].t - pts[i - 1].t);
    const double len = std::hypot(pts[i].x - pts[i - 1].x, dt);
    cum[i] = cum[i - 1] + (1.0 - height_weight) * len + height_weight * dt;
  }
  const double total = cum.back();
  for (auto& c : cum) c = total > 0.0 ? c / total : 0.0;
  cum.back() = 1.0;
}

StripPoint EdgeCurve::at(double u) const {
  const double s = a + u * (b - a);
  if (s <= 0.0) return pts.front();
  if (s >= 1.0) return pts.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum.begin()) - 1;
  const double w = (s - cum[i]) / (cum[i + 1] - cum[i]);
  return {pts[i].x + w * (pts[i + 1].x - pts[i].x), pts[i].t + w * (pts[i + 1].t - pts[i].t)};
}

EdgeCurve EdgeCurve::sub(double u0, double u1) const {
  EdgeCurve e = *this;
  e.a = a + u0 * (b - a);
  e.b = a + u1 * (b - a);
  return e;
}

StripPoint CoonsPatch::at(double u, double v) const {
  const StripPoint B = bottom.at(u), T = top.at(u), L = left.at(v), R = right.at(v);
  const double w00 = (1 - u) * (1 - v), w10 = u * (1 - v), w01 = (1 - u) * v, w11 = u * v;
  return {(1 - v) * B.x + v * T.x + (1 - u) * L.x + u * R.x -
              (w00 * c00.x + w10 * c10.x + w01 * c01.x + w11 * c11.x),
          (1 - v) * B.t + v * T.t + (1 - u) * L.t + u * R.t -
              (w00 * c00.t + w10 * c10.t + w01 * c01.t + w11 * c11.t)};
}

double CoonsPatch::jacobian(double u, double v) const {
  constexpr double e = 1e-6;
  const StripPoint pu = at(u + e, v), mu = at(u - e, v);
  const StripPoint pv = at(u, v + e), mv = at(u, v - e);
  const double xu = (pu.x - mu.x) / (2 * e), tu = (pu.t - mu.t) / (2 * e);
  const double xv = (pv.x - mv.x) / (2 * e), tv = (pv.t - mv.t) / (2 * e);
  return xu * tv - xv * tu;
}

static EdgeCurve straight(StripPoint a, StripPoint b) { return EdgeCurve({a, b}); }

// ---------------------------------------------------------------------------
// Grid

// Side arcs are parameterized mostly by height travelled, so that points
// paired across a thin cell sit at similar heights.
constexpr double kSideHeightWeight = 0.9;

const Cell& CellGrid::cell(std::int64_t i, std::int64_t j) const {
  return cells[static_cast<std::size_t>(j * m + imod(i, m))];
}

CellGrid build_grid(const CurveFamily& fam, const LoopFamily& lf) {
  const std::int64_t m = fam.size();
  const std::int64_t Np = lf.Nprime;
  if (m < 1 || static_cast<std::int64_t>(lf.loops.size()) != Np + 1)
    throw Error(ErrorKind::ParamOutOfRange, "family and loops do not match");

  // For each curve: crossing with every loop, as (segment, point).
  std::vector<std::vector<Crossing>> cross(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    const SpanningArc& arc = fam.curves[static_cast<std::size_t>(i)];
    auto& row = cross[static_cast<std::size_t>(i)];
    row.push_back({0, arc.vertices().front()});
    for (std::int64_t j = 1; j < Np; ++j) {
      bool transversal = true;
      auto xs = arc_crossings(arc, lf.loops[static_cast<std::size_t>(j)], transversal);
      if (!transversal || xs.size() != 1)
        throw Error(ErrorKind::IntersectionCountWrong,
                    "curve " + std::to_string(i) + " meets loop " + std::to_string(j) + " in " +
                        std::to_string(xs.size()) + " points" + (transversal ? "" : " (tangency)"));
      row.push_back(xs[0]);
    }
    row.push_back({arc.size() - 2, arc.vertices().back()});
  }
  auto sub_arc = [&](std::int64_t i, std::int64_t j) {
    const double shift = i >= m ? 1.0 : 0.0;
    const auto ii = static_cast<std::size_t>(i >= m ? i - m : i);
    const auto& v = fam.curves[ii].vertices();
    const Crossing& c0 = cross[ii][static_cast<std::size_t>(j)];
    const Crossing& c1 = cross[ii][static_cast<std::size_t>(j + 1)];
    std::vector<StripPoint> pts{c0.pt};
    for (std::size_t s = c0.seg + 1; s <= c1.seg; ++s)
      if (!(v[s] == pts.back())) pts.push_back(v[s]);
    if (!(c1.pt == pts.back())) pts.push_back(c1.pt);
    for (auto& p : pts) p.x += shift;
    return pts;
  };
  auto corner = [&](std::int64_t i, std::int64_t j) {
    const auto ii = static_cast<std::size_t>(i >= m ? i - m : i);
    StripPoint p = cross[ii][static_cast<std::size_t>(j)].pt;
    if (i >= m) p.x += 1.0;
    return p;
  };
  auto loop_piece = [&](std::int64_t j, StripPoint a, StripPoint b) {
    const GraphLoop& g = lf.loops[static_cast<std::size_t>(j)];
    std::vector<StripPoint> pts{a};
    for (double x : g.knots_between(a.x, b.x)) pts.push_back({x, g.at(x)});
    pts.push_back(b);
    return pts;
  };

  CellGrid grid;
  grid.m = m;
  grid.Nprime = Np;
  for (std::int64_t j = 0; j < Np; ++j) {
    for (std::int64_t i = 0; i < m; ++i) {
      Cell c;
      c.i = i;
      c.j = j;
      const StripPoint p00 = corner(i, j), p10 = corner(i + 1, j);
      const StripPoint p01 = corner(i, j + 1), p11 = corner(i + 1, j + 1);
      if (!(p10.x > p00.x) || !(p11.x > p01.x))
        throw Error(ErrorKind::IntersectionCountWrong, "loop crossings are out of order");
      const auto bottom = loop_piece(j, p00, p10);
      const auto top = loop_piece(j + 1, p01, p11);
      const auto left = sub_arc(i, j);
      const auto right = sub_arc(i + 1, j);
      c.polygon = bottom;
      c.polygon.insert(c.polygon.end(), right.begin() + 1, right.end());
      c.polygon.insert(c.polygon.end(), top.rbegin() + 1, top.rend());
      c.polygon.insert(c.polygon.end(), left.rbegin() + 1, left.rend() - 1);
      c.area = polygon_area(c.polygon);
      c.bounds = {c.polygon[0].x, c.polygon[0].t, c.polygon[0].x, c.polygon[0].t};
      for (const auto& p : c.polygon) {
        c.bounds.xmin = std::min(c.bounds.xmin, p.x);
        c.bounds.xmax = std::max(c.bounds.xmax, p.x);
        c.bounds.tmin = std::min(c.bounds.tmin, p.t);
        c.bounds.tmax = std::max(c.bounds.tmax, p.t);
      }
      const double fm = static_cast<double>(m), fn = static_cast<double>(Np);
      c.flat = {static_cast<double>(i) / fm, static_cast<double>(j) / fn,
                static_cast<double>(i + 1) / fm, static_cast<double>(j + 1) / fn};
      c.patches.push_back(CoonsPatch{EdgeCurve(bottom), EdgeCurve(top), EdgeCurve(left, 0, 1, kSideHeightWeight),
                                     EdgeCurve(right, 0, 1, kSideHeightWeight), p00, p10, p01, p11});
      grid.area_sum += c.area;
      grid.cells.push_back(std::move(c));
    }
  }

  // Every sample of the fundamental square must fall in exactly one cell
  // (up to deck translation).
  constexpr int S = 40;
  for (int a = 0; a < S; ++a) {
    for (int b = 0; b < S; ++b) {
      const StripPoint p{(a + 0.37) / S, (b + 0.41) / S};
      int hits = 0;
      for (int k = -2; k <= 2; ++k) {
        const StripPoint q{p.x + k, p.t};
        for (const auto& c : grid.cells) {
          if (q.x < c.bounds.xmin || q.x > c.bounds.xmax || q.t < c.bounds.tmin || q.t > c.bounds.tmax)
            continue;
          hits += point_in_polygon(c.polygon, q);
        }
      }
      if (hits != 1) ++grid.location_failures;
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Conjugacy

namespace {

bool patch_ok(const CoonsPatch& pt, const std::vector<StripPoint>& polygon) {
  constexpr int S = 8;
  for (int a = 0; a < S; ++a) {
    for (int b = 0; b < S; ++b) {
      const double u = (a + 0.5) / S, v = (b + 0.5) / S;
      if (!(pt.jacobian(u, v) > 0.0)) return false;
      if (!point_in_polygon(polygon, pt.at(u, v))) return false;
    }
  }
  return true;
}

std::vector<CoonsPatch> subdivide(const CoonsPatch& P) {
  const StripPoint mb = P.bottom.at(0.5), mt = P.top.at(0.5);
  const StripPoint ml = P.left.at(0.5), mr = P.right.at(0.5);
  const StripPoint cc = P.at(0.5, 0.5);
  return {
      CoonsPatch{P.bottom.sub(0, 0.5), straight(ml, cc), P.left.sub(0, 0.5), straight(mb, cc),
                 P.c00, mb, ml, cc},
      CoonsPatch{P.bottom.sub(0.5, 1), straight(cc, mr), straight(mb, cc), P.right.sub(0, 0.5),
                 mb, P.c10, cc, mr},
      CoonsPatch{straight(ml, cc), P.top.sub(0, 0.5), P.left.sub(0.5, 1), straight(cc, mt),
                 ml, cc, P.c01, mt},
      CoonsPatch{straight(cc, mr), P.top.sub(0.5, 1), straight(cc, mt), P.right.sub(0.5, 1),
                 cc, mr, mt, P.c11},
  };
}

// Patch and local (u, v) for flat-cell coordinates (u, v).
const CoonsPatch& pick_patch(const Cell& c, double& u, double& v) {
  if (!c.subdivided) return c.patches[0];
  const int qu = u < 0.5 ? 0 : 1, qv = v < 0.5 ? 0 : 1;
  u = 2.0 * u - qu;
  v = 2.0 * v - qv;
  return c.patches[static_cast<std::size_t>(qv * 2 + qu)];
}

bool newton(const CoonsPatch& P, StripPoint target, double& u, double& v, double tol) {
  for (int it = 0; it < 60; ++it) {
    const StripPoint c = P.at(u, v);
    const double rx = c.x - target.x, rt = c.t - target.t;
    if (std::hypot(rx, rt) <= tol) return true;
    // One-sided differences pointing into the patch; the edges are
    // clamped outside [0,1].
    const double eu = u + 1e-7 > 1.0 ? -1e-7 : 1e-7, ev = v + 1e-7 > 1.0 ? -1e-7 : 1e-7;
    const StripPoint pu = P.at(u + eu, v), pv = P.at(u, v + ev);
    const double xu = (pu.x - c.x) / eu, tu = (pu.t - c.t) / eu;
    const double xv = (pv.x - c.x) / ev, tv = (pv.t - c.t) / ev;
    const double det = xu * tv - xv * tu;
    if (det == 0.0 || !std::isfinite(det)) return false;
    double du = (tv * rx - xv * rt) / det;
    double dv = (-tu * rx + xu * rt) / det;
    const double step = std::max(std::abs(du), std::abs(dv));
    if (step > 0.25) {
      du *= 0.25 / step;
      dv *= 0.25 / step;
    }
    u = std::clamp(u - du, -0.05, 1.05);
    v = std::clamp(v - dv, -0.05, 1.05);
  }
  const StripPoint c = P.at(u, v);
  return std::hypot(c.x - target.x, c.t - target.t) <= tol;
}

// Nearest point of a sample grid of the patch, as a Newton start.
std::pair<double, double> nearest_sample(const CoonsPatch& P, StripPoint p) {
  constexpr int S = 48;
  double best = std::numeric_limits<double>::infinity();
  std::pair<double, double> at{0.5, 0.5};
  for (int a = 0; a <= S; ++a) {
    for (int b = 0; b <= S; ++b) {
      const StripPoint q = P.at(static_cast<double>(a) / S, static_cast<double>(b) / S);
      const double d = std::hypot(q.x - p.x, q.t - p.t);
      if (d < best) {
        best = d;
        at = {static_cast<double>(a) / S, static_cast<double>(b) / S};
      }
    }
  }
  return at;
}

// Flat coordinates of p through the patches of c.
bool solve_patches(const Cell& c, StripPoint p, StripPoint& flat) {
  constexpr double tol = 1e-13;
  static const double starts[][2] = {{0.5, 0.5}, {0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  auto accept = [&](std::size_t k, double u, double v) {
    if (u < -1e-9 || u > 1 + 1e-9 || v < -1e-9 || v > 1 + 1e-9) return false;
    // Past the unit square the patch is only an extension of clamped
    // edges, and can be flat in one direction.
    u = std::clamp(u, 0.0, 1.0);
    v = std::clamp(v, 0.0, 1.0);
    if (c.subdivided) {
      u = 0.5 * (u + static_cast<double>(k % 2));
      v = 0.5 * (v + static_cast<double>(k / 2));
    }
    flat = {c.flat.xmin + u * (c.flat.xmax - c.flat.xmin), c.flat.tmin + v * (c.flat.tmax - c.flat.tmin)};
    return true;
  };
  for (std::size_t k = 0; k < c.patches.size(); ++k) {
    for (const auto& s : starts) {
      double u = s[0], v = s[1];
      if (newton(c.patches[k], p, u, v, tol) && accept(k, u, v)) return true;
    }
  }
  for (std::size_t k = 0; k < c.patches.size(); ++k) {
    auto [u, v] = nearest_sample(c.patches[k], p);
    if (newton(c.patches[k], p, u, v, tol) && accept(k, u, v)) return true;
  }
  return false;
}

// Every sampled point of the cell polygon is reached by some patch.
bool covers(const Cell& c) {
  constexpr int S = 10;
  const Box b = c.bounds;
  for (int a = 0; a < S; ++a) {
    for (int k = 0; k < S; ++k) {
      const StripPoint p{b.xmin + (a + 0.5) / S * (b.xmax - b.xmin), b.tmin + (k + 0.5) / S * (b.tmax - b.tmin)};
      if (!point_in_polygon(c.polygon, p)) continue;
      StripPoint flat;
      if (!solve_patches(c, p, flat)) return false;
    }
  }
  return true;
}

}  // namespace

GridConjugacy::GridConjugacy(CellGrid grid, double tol_inv) : grid_(std::move(grid)), tol_inv_(tol_inv) {
  xmin_ = std::numeric_limits<double>::infinity();
  for (const auto& c : grid_.cells) xmin_ = std::min(xmin_, c.bounds.xmin);
}

std::size_t GridConjugacy::subdivided_cells() const {
  return static_cast<std::size_t>(std::count_if(grid_.cells.begin(), grid_.cells.end(),
                                                [](const Cell& c) { return c.subdivided; }));
}

StripPoint GridConjugacy::inverse(StripPoint y) const {
  const double k = std::floor(y.x);
  const double fx = y.x - k;
  const std::int64_t m = grid_.m, Np = grid_.Nprime;
  const auto i = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(fx * m)), 0, m - 1);
  const auto j = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(y.t * Np)), 0, Np - 1);
  const Cell& c = grid_.cell(i, j);
  double u = (fx - c.flat.xmin) / (c.flat.xmax - c.flat.xmin);
  double v = (y.t - c.flat.tmin) / (c.flat.tmax - c.flat.tmin);
  const CoonsPatch& P = pick_patch(c, u, v);
  StripPoint p = P.at(u, v);
  p.x += k;
  return p;
}

bool GridConjugacy::solve_in_cell(const Cell& c, StripPoint p, StripPoint& flat) const {
  return solve_patches(c, p, flat);
}

std::pair<std::int64_t, std::int64_t> GridConjugacy::locate(StripPoint p) const {
  const double k0 = std::floor(p.x - xmin_);
  for (int d = 0; d <= 2; ++d) {
    for (double k : {-k0 - d, -k0 + d}) {
      const StripPoint q{p.x + k, p.t};
      for (const auto& c : grid_.cells) {
        const Box b = c.bounds;
        if (q.x < b.xmin || q.x > b.xmax || q.t < b.tmin || q.t > b.tmax) continue;
        if (point_in_polygon(c.polygon, q)) return {c.i, c.j};
      }
      if (d == 0) break;
    }
  }
  return {-1, -1};
}

StripPoint GridConjugacy::forward(StripPoint p) const {
  const double k0 = std::floor(p.x - xmin_);
  StripPoint flat;
  // Polygon containment first, then any cell whose patch reaches p (points
  // on shared boundaries).
  for (int pass = 0; pass < 2; ++pass) {
    for (int d = 0; d <= 2; ++d) {
      for (double k : {-k0 - d, -k0 + d}) {
        const StripPoint q{p.x + k, p.t};
        for (const auto& c : grid_.cells) {
          const Box b = c.bounds.inflated(pass == 0 ? 0.0 : 1e-9);
          if (q.x < b.xmin || q.x > b.xmax || q.t < b.tmin || q.t > b.tmax) continue;
          if (pass == 0 && !point_in_polygon(c.polygon, q)) continue;
          if (solve_in_cell(c, q, flat)) return {flat.x - k, flat.t};
        }
        if (d == 0) break;
      }
    }
  }
  const auto [ci, cj] = locate(p);
  if (ci >= 0)
    throw Error(ErrorKind::NotInjective, "cell (" + std::to_string(ci) + "," + std::to_string(cj) +
                                             ") is not covered by its interpolation patch");
  throw Error(ErrorKind::InverseDiverged, "point could not be located in the cell grid");
}

GridConjugacy build_conjugacy(CellGrid grid, const Tolerances& tol) {
  for (auto& c : grid.cells) {
    if (patch_ok(c.patches[0], c.polygon) && covers(c)) continue;
    c.patches = subdivide(c.patches[0]);
    c.subdivided = true;
    const bool ok = std::all_of(c.patches.begin(), c.patches.end(),
                                [&](const CoonsPatch& P) { return patch_ok(P, c.polygon); });
    if (!ok || !covers(c))
      throw Error(ErrorKind::NotInjective, "cell (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                                               ") folds after subdivision");
  }
  return GridConjugacy(std::move(grid), tol.inv);
}

double conjugate_distance(const GridConjugacy& h, const LiftMap& f, std::int64_t p, std::int64_t q,
                          int res) {
  const double rot = static_cast<double>(p) / static_cast<double>(q);
  double worst = 0.0;
  for (int b = 0; b <= res; ++b) {
    for (int a = 0; a < res; ++a) {
      const StripPoint y{static_cast<double>(a) / res, static_cast<double>(b) / res};
      const StripPoint w = h.forward(f.forward(h.inverse(y)));
      worst = std::max(worst, annulus_distance(w, {y.x + rot, y.t}));
    }
  }
  return worst;
}

double theoretical_bound(std::int64_t N, std::int64_t q, std::int64_t Nprime) {
  if (N < 1 || q < 1 || Nprime < 1) throw Error(ErrorKind::ParamOutOfRange, "N, q, N' must be positive");
  const double w = std::min(3.0 / static_cast<double>(N * q), 0.5);
  const double h = std::min<double>(3.0, static_cast<double>(Nprime)) / static_cast<double>(Nprime);
  return std::sqrt(w * w + h * h);
}

// ---------------------------------------------------------------------------
// Pipeline

bool ConjugationReport::passed() const {
  return certificates_passed && achieved <= bound + 2.0 * mesh && containment_failures == 0 &&
         location_failures == 0 && std::abs(area_sum - 1.0) <= 1e-6 && seam_mismatch <= tol_inv &&
         roundtrip_defect <= tol_inv;
}

std::string ConjugationReport::text() const {
  std::ostringstream out;
  out << "p/q=" << p << "/" << q << " N=" << N << " Nprime=" << Nprime << '\n';
  out << "family method=" << family.method << " facts=" << family.certificate.facts.size()
      << " failures=" << family.certificate.failures() << " digest=" << hex64(family.certificate.digest())
      << '\n';
  std::size_t loop_fail = 0;
  for (const auto& f : loops.facts) loop_fail += !f.holds;
  out << "loops facts=" << loops.facts.size() << " failures=" << loop_fail << '\n';
  out << "cells=" << N * q * Nprime << " area_sum=" << format_double(area_sum)
      << " location_failures=" << location_failures << " subdivided=" << subdivided << '\n';
  out << "seam_mismatch=" << format_double(seam_mismatch)
      << " roundtrip_defect=" << format_double(roundtrip_defect)
      << " containment_failures=" << containment_failures << '\n';
  out << "achieved=" << format_double(achieved) << " bound=" << format_double(bound)
      << " mesh=" << format_double(mesh) << '\n';
  out << "verdict=" << (passed() ? "pass" : "FAIL") << '\n';
  return out.str();
}

ConjugationReport run_conjugation(const LiftMap& m, std::int64_t p, std::int64_t q, std::int64_t N,
                                  std::int64_t Nprime, const SearchBudget& budget,
                                  const Tolerances& tol, int res,
                                  std::unique_ptr<GridConjugacy>* out_h) {
  ConjugationReport rep;
  rep.p = p;
  rep.q = q;
  rep.N = N;
  rep.Nprime = Nprime;
  rep.tol_inv = tol.inv;
  const LiftMap f = normalized_lift(m, p, q, budget);
  rep.family = build_curve_family(m, p, q, N, 1, budget, tol);
  rep.loops = build_loops(f, rep.family, Nprime, budget, tol);
  rep.certificates_passed = rep.family.certificate.passed && rep.loops.passed();
  CellGrid grid = build_grid(rep.family, rep.loops);
  rep.area_sum = grid.area_sum;
  rep.location_failures = grid.location_failures;
  auto h = std::make_unique<GridConjugacy>(build_conjugacy(std::move(grid), tol));
  rep.subdivided = h->subdivided_cells();
  rep.mesh = 1.0 / res;
  rep.bound = theoretical_bound(N, q, Nprime);
  rep.achieved = conjugate_distance(*h, f, p, q, res);

  // Seams: the two cells on either side of a flat edge must send it to the
  // same curve.
  const CellGrid& g = h->grid();
  for (const auto& c : g.cells) {
    const Cell& right = g.cell(c.i + 1, c.j);
    const double shift = c.i + 1 == g.m ? 1.0 : 0.0;
    for (int s = 0; s <= 8; ++s) {
      double v = s / 8.0, u1 = 1.0, u0 = 0.0, va = v, vb = v;
      const StripPoint a = pick_patch(c, u1, va).at(u1, va);
      const StripPoint b = pick_patch(right, u0, vb).at(u0, vb);
      rep.seam_mismatch = std::max(rep.seam_mismatch, std::hypot(a.x - b.x - shift, a.t - b.t));
    }
    if (c.j + 1 < g.Nprime) {
      const Cell& up = g.cell(c.i, c.j + 1);
      for (int s = 0; s <= 8; ++s) {
        double u = s / 8.0, ua = u, ub = u, v1 = 1.0, v0 = 0.0;
        const StripPoint a = pick_patch(c, ua, v1).at(ua, v1);
        const StripPoint b = pick_patch(up, ub, v0).at(ub, v0);
        rep.seam_mismatch = std::max(rep.seam_mismatch, std::hypot(a.x - b.x, a.t - b.t));
      }
    }
  }
  for (int b = 0; b <= 16; ++b) {
    for (int a = 0; a < 16; ++a) {
      const StripPoint y{(a + 0.5) / 16.0, b / 16.0};
      const StripPoint z = h->forward(h->inverse(y));
      rep.roundtrip_defect = std::max(rep.roundtrip_defect, std::hypot(z.x - y.x, z.t - y.t));
    }
  }
  // Image of each cell boundary stays in the 3x3 block around the shifted
  // cell.
  const std::int64_t shiftidx = N * p;
  for (const auto& c : g.cells) {
    const std::size_t stride = std::max<std::size_t>(1, c.polygon.size() / 32);
    for (std::size_t s = 0; s < c.polygon.size(); s += stride) {
      const StripPoint z = f.forward(c.polygon[s]);
      const StripPoint fz = h->forward(z);
      const double fx = fz.x - std::floor(fz.x);
      const auto i2 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(fx * g.m)), 0, g.m - 1);
      const auto j2 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(fz.t * g.Nprime)), 0,
                                               g.Nprime - 1);
      const std::int64_t di = imod(i2 - c.i - shiftidx, g.m);
      const bool ok_i = di == 0 || di == 1 || di == g.m - 1;
      const bool ok_j = std::abs(j2 - c.j) <= 1;
      if (!ok_i || !ok_j) ++rep.containment_failures;
    }
  }
  if (out_h) *out_h = std::move(h);
  return rep;
}

}  // namespace annulus
