#include "annulus/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {

std::string_view to_string(Side s) {
  switch (s) {
    case Side::Left: return "Left";
    case Side::Right: return "Right";
    case Side::On: return "On";
  }
  return "?";
}

double orient(StripPoint a, StripPoint b, StripPoint c) {
  return (b.x - a.x) * (c.t - a.t) - (b.t - a.t) * (c.x - a.x);
}

double point_segment_distance(StripPoint p, StripPoint a, StripPoint b) {
  const double dx = b.x - a.x, dt = b.t - a.t;
  const double len2 = dx * dx + dt * dt;
  double u = 0.0;
  if (len2 > 0.0) u = std::clamp(((p.x - a.x) * dx + (p.t - a.t) * dt) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + u * dx), p.t - (a.t + u * dt));
}

static bool on_segment(StripPoint p, StripPoint a, StripPoint b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.t, b.t) <= p.t &&
         p.t <= std::max(a.t, b.t);
}

static int sgn(double v) { return (v > 0.0) - (v < 0.0); }

bool segments_intersect(StripPoint a, StripPoint b, StripPoint c, StripPoint d) {
  const int o1 = sgn(orient(a, b, c)), o2 = sgn(orient(a, b, d));
  const int o3 = sgn(orient(c, d, a)), o4 = sgn(orient(c, d, b));
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(c, a, b)) return true;
  if (o2 == 0 && on_segment(d, a, b)) return true;
  if (o3 == 0 && on_segment(a, c, d)) return true;
  if (o4 == 0 && on_segment(b, c, d)) return true;
  return false;
}

double segment_distance(StripPoint a, StripPoint b, StripPoint c, StripPoint d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

double circle_distance(double x1, double x2) {
  double d = std::fmod(std::abs(x1 - x2), 1.0);
  return std::min(d, 1.0 - d);
}

double annulus_distance(StripPoint a, StripPoint b) {
  return std::hypot(circle_distance(a.x, b.x), a.t - b.t);
}

// ---------------------------------------------------------------------------
// SegmentIndex

SegmentIndex::SegmentIndex(std::span<const StripPoint> polyline)
    : pts_(polyline.begin(), polyline.end()) {
  if (pts_.empty()) return;
  bounds_ = {pts_[0].x, pts_[0].t, pts_[0].x, pts_[0].t};
  for (const auto& p : pts_) {
    bounds_.xmin = std::min(bounds_.xmin, p.x);
    bounds_.xmax = std::max(bounds_.xmax, p.x);
    bounds_.tmin = std::min(bounds_.tmin, p.t);
    bounds_.tmax = std::max(bounds_.tmax, p.t);
  }
  const std::size_t nseg = segment_count();
  if (nseg == 0) return;
  const double w = std::max(bounds_.xmax - bounds_.xmin, 1e-12);
  const double h = std::max(bounds_.tmax - bounds_.tmin, 1e-12);
  const double cells = std::max<double>(1.0, static_cast<double>(nseg));
  const double side = std::sqrt(w * h / cells);
  nx_ = std::clamp(static_cast<int>(std::ceil(w / side)), 1, 2048);
  ny_ = std::clamp(static_cast<int>(std::ceil(h / side)), 1, 2048);
  cw_ = w / nx_;
  ch_ = h / ny_;

  std::vector<std::uint32_t> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  auto for_cells = [&](std::size_t s, auto&& fn) {
    const StripPoint a = pts_[s], b = pts_[s + 1];
    const int x0 = cell_x(std::min(a.x, b.x)), x1 = cell_x(std::max(a.x, b.x));
    const int t0 = cell_t(std::min(a.t, b.t)), t1 = cell_t(std::max(a.t, b.t));
    for (int j = t0; j <= t1; ++j)
      for (int i = x0; i <= x1; ++i) fn(static_cast<std::size_t>(j) * nx_ + i);
  };
  for (std::size_t s = 0; s < nseg; ++s) for_cells(s, [&](std::size_t c) { ++counts[c]; });
  start_.assign(counts.size(), 0);
  for (std::size_t c = 1; c < counts.size(); ++c) start_[c] = start_[c - 1] + counts[c - 1];
  ids_.resize(start_.back());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t s = 0; s < nseg; ++s)
    for_cells(s, [&](std::size_t c) { ids_[fill[c]++] = static_cast<std::uint32_t>(s); });
}

int SegmentIndex::cell_x(double x) const {
  const int i = static_cast<int>(std::floor((x - bounds_.xmin) / cw_));
  return std::clamp(i, 0, nx_ - 1);
}

int SegmentIndex::cell_t(double t) const {
  const int j = static_cast<int>(std::floor((t - bounds_.tmin) / ch_));
  return std::clamp(j, 0, ny_ - 1);
}

// ---------------------------------------------------------------------------
// SpanningArc

SpanningArc::SpanningArc(std::vector<StripPoint> vertices) : v_(std::move(vertices)) {
  if (v_.size() < 2) throw Error(ErrorKind::DegenerateArc, "an arc needs at least two vertices");
  for (const auto& p : v_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.t))
      throw Error(ErrorKind::DegenerateArc, "non-finite vertex");
  }
  if (v_.front().t != 0.0) throw Error(ErrorKind::DegenerateArc, "first vertex must have t = 0");
  if (v_.back().t != 1.0) throw Error(ErrorKind::DegenerateArc, "last vertex must have t = 1");
  for (std::size_t i = 1; i + 1 < v_.size(); ++i) {
    if (!(v_[i].t > 0.0 && v_[i].t < 1.0))
      throw Error(ErrorKind::DegenerateArc,
                  "interior vertex " + std::to_string(i) + " is not inside the strip");
  }
  for (std::size_t i = 0; i + 1 < v_.size(); ++i) {
    if (v_[i] == v_[i + 1])
      throw Error(ErrorKind::DegenerateArc, "zero-length segment at " + std::to_string(i));
  }
  index_ = std::make_shared<const SegmentIndex>(std::span<const StripPoint>(v_));
  bounds_ = index_->bounds();

  const std::size_t nseg = v_.size() - 1;
  for (std::size_t i = 0; i < nseg; ++i) {
    const StripPoint a = v_[i], b = v_[i + 1];
    if (i + 1 < nseg) {
      const StripPoint c = v_[i + 2];
      if (orient(a, b, c) == 0.0 && (b.x - a.x) * (c.x - b.x) + (b.t - a.t) * (c.t - b.t) < 0.0)
        throw Error(ErrorKind::DegenerateArc, "arc folds back at vertex " + std::to_string(i + 1));
    }
    const Box box{std::min(a.x, b.x), std::min(a.t, b.t), std::max(a.x, b.x), std::max(a.t, b.t)};
    bool hit = false;
    index_->query(box, [&](std::size_t j) {
      if (hit || j <= i + 1) return;
      if (segments_intersect(a, b, v_[j], v_[j + 1])) hit = true;
    });
    if (hit) throw Error(ErrorKind::DegenerateArc, "arc is not simple");
  }
}

SpanningArc SpanningArc::vertical(double x) { return SpanningArc({{x, 0.0}, {x, 1.0}}); }

double SpanningArc::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v_.size(); ++i)
    s += std::hypot(v_[i + 1].x - v_[i].x, v_[i + 1].t - v_[i].t);
  return s;
}

SpanningArc SpanningArc::translated(double dx) const {
  std::vector<StripPoint> w = v_;
  for (auto& p : w) p.x += dx;
  return SpanningArc(std::move(w));
}

SpanningArc translate_arc(const SpanningArc& arc, DeckTranslate d) {
  if (d.k == 0) return arc;
  return arc.translated(static_cast<double>(d.k));
}

// ---------------------------------------------------------------------------
// Sidedness

Side side_of_arc(const SpanningArc& arc, StripPoint p) {
  const auto& v = arc.vertices();
  const Box& bb = arc.bounds();
  if (p.x > bb.xmax) return Side::Right;
  if (p.x < bb.xmin) return Side::Left;
  // The rightward ray from p is perturbed upward (downward on the top edge),
  // so a vertex at exactly the ray height is counted on one side only.
  const bool top = p.t >= 1.0;
  auto above = [&](double t) { return top ? t >= p.t : t > p.t; };
  int crossings = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const StripPoint a = v[i], b = v[i + 1];
    const double o = orient(a, b, p);
    if (o == 0.0 && on_segment(p, a, b)) return Side::On;
    const bool aa = above(a.t), ba = above(b.t);
    if (aa == ba) continue;
    // Upward edge: crossing lies right of p iff p is left of the edge.
    if (ba ? o > 0.0 : o < 0.0) ++crossings;
  }
  return (crossings % 2 == 1) ? Side::Left : Side::Right;
}

static bool arcs_within(const SpanningArc& a, double dx, const SpanningArc& b, double r) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  const SegmentIndex& idx = b.index();
  for (std::size_t i = 0; i + 1 < va.size(); ++i) {
    const StripPoint p{va[i].x + dx, va[i].t}, q{va[i + 1].x + dx, va[i + 1].t};
    const Box box =
        Box{std::min(p.x, q.x), std::min(p.t, q.t), std::max(p.x, q.x), std::max(p.t, q.t)}
            .inflated(r);
    bool hit = false;
    idx.query(box, [&](std::size_t j) {
      if (!hit && segment_distance(p, q, vb[j], vb[j + 1]) < r) hit = true;
    });
    if (hit) return true;
  }
  return false;
}

double arc_distance(const SpanningArc& a, const SpanningArc& b, double dx, double cutoff) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  const SegmentIndex& idx = b.index();
  const Box& bb = idx.bounds();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < va.size(); ++i) {
    const StripPoint p{va[i].x + dx, va[i].t}, q{va[i + 1].x + dx, va[i + 1].t};
    Box box{std::min(p.x, q.x), std::min(p.t, q.t), std::max(p.x, q.x), std::max(p.t, q.t)};
    if (std::isinf(best)) {
      // Seed with a bound that is guaranteed to reach some segment of b.
      const double reach = std::max({std::abs(box.xmin - bb.xmax), std::abs(box.xmax - bb.xmin),
                                     std::abs(box.tmin - bb.tmax), std::abs(box.tmax - bb.tmin)});
      box = box.inflated(reach + 1.0);
    } else {
      box = box.inflated(best);
    }
    idx.query(box, [&](std::size_t j) {
      best = std::min(best, segment_distance(p, q, vb[j], vb[j + 1]));
    });
    if (best < cutoff) return best;
  }
  return best;
}

bool arc_strictly_right_of(const SpanningArc& subject, double shift, const SpanningArc& reference,
                           double sep) {
  const Box& sb = subject.bounds();
  const Box& rb = reference.bounds();
  if (sb.xmin + shift > rb.xmax + sep) return true;
  if (sb.xmax + shift < rb.xmin + sep) return false;
  if (arcs_within(subject, shift, reference, sep)) return false;
  const auto& v = subject.vertices();
  const StripPoint probe{0.5 * (v[0].x + v[1].x) + shift, 0.5 * (v[0].t + v[1].t)};
  return side_of_arc(reference, probe) == Side::Right;
}

bool arc_strictly_right_of(const SpanningArc& subject, const SpanningArc& reference, double sep) {
  return arc_strictly_right_of(subject, 0.0, reference, sep);
}

// ---------------------------------------------------------------------------
// Annulus relations

std::int64_t lift_window(std::span<const SpanningArc* const> arcs) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const SpanningArc* a : arcs) {
    lo = std::min(lo, a->bounds().xmin);
    hi = std::max(hi, a->bounds().xmax);
  }
  return 2 + static_cast<std::int64_t>(std::ceil(hi - lo));
}

// Same annulus curve: vertex lists equal up to one integer translation.
static bool same_annulus_curve(const SpanningArc& a, const SpanningArc& b) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  if (va.size() != vb.size()) return false;
  const double k = std::round(vb[0].x - va[0].x);
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (va[i].t != vb[i].t || va[i].x + k != vb[i].x) return false;
  }
  return true;
}

static void require_simple_projection(const SpanningArc& a, double sep) {
  const double w = a.bounds().xmax - a.bounds().xmin;
  const auto kmax = static_cast<std::int64_t>(std::ceil(w)) + 1;
  for (std::int64_t k = 1; k <= kmax; ++k) {
    if (arcs_within(a, static_cast<double>(k), a, sep))
      throw Error(ErrorKind::NotDisjoint, "curve meets its own translate by " + std::to_string(k));
  }
}

static void require_pair_disjoint(const SpanningArc& a, const SpanningArc& b, double sep) {
  const Box& ab = a.bounds();
  const Box& bb = b.bounds();
  const auto klo = static_cast<std::int64_t>(std::floor(bb.xmin - ab.xmax - sep)) - 1;
  const auto khi = static_cast<std::int64_t>(std::ceil(bb.xmax - ab.xmin + sep)) + 1;
  for (std::int64_t k = klo; k <= khi; ++k) {
    if (arcs_within(a, static_cast<double>(k), b, sep))
      throw Error(ErrorKind::NotDisjoint,
                  "projected curves meet (translate " + std::to_string(k) + ")");
  }
}

void require_annulus_disjoint(std::span<const SpanningArc* const> arcs, double sep) {
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    require_simple_projection(*arcs[i], sep);
    for (std::size_t j = i + 1; j < arcs.size(); ++j) require_pair_disjoint(*arcs[i], *arcs[j], sep);
  }
}

BetweenWitness annulus_between_witness(const SpanningArc& g1, const SpanningArc& g2,
                                       const SpanningArc& g3, double sep) {
  require_simple_projection(g1, sep);
  require_simple_projection(g2, sep);
  require_simple_projection(g3, sep);
  require_pair_disjoint(g1, g2, sep);
  require_pair_disjoint(g2, g3, sep);
  if (!same_annulus_curve(g1, g3)) require_pair_disjoint(g1, g3, sep);

  const SpanningArc* all[] = {&g1, &g2, &g3};
  const std::int64_t w = lift_window(all);
  auto first_right = [&](const SpanningArc& g, std::int64_t& out) {
    for (std::int64_t k = -w; k <= w; ++k) {
      if (arc_strictly_right_of(g, static_cast<double>(k), g1, sep)) {
        out = k;
        return true;
      }
    }
    return false;
  };
  BetweenWitness wit;
  if (!first_right(g2, wit.lift2) || !first_right(g3, wit.lift3)) return wit;
  wit.holds = arc_strictly_right_of(g3, static_cast<double>(wit.lift3 - wit.lift2), g2, sep);
  return wit;
}

bool annulus_strictly_between(const SpanningArc& g1, const SpanningArc& g2, const SpanningArc& g3,
                              double sep) {
  return annulus_between_witness(g1, g2, g3, sep).holds;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

void write_arc_csv(std::ostream& out, const SpanningArc& arc) {
  out << "t,x\n";
  for (const auto& p : arc.vertices()) out << format_double(p.t) << ',' << format_double(p.x) << '\n';
}

static double parse_double(std::string_view s, int line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(line, "bad number '" + std::string(s) + "'");
  return v;
}

SpanningArc read_arc_csv(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::vector<StripPoint> pts;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "t,x") throw ParseError(1, "expected header 't,x'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(lineno, "expected 't,x'");
    const std::string_view sv(line);
    const double t = parse_double(sv.substr(0, comma), lineno);
    const double x = parse_double(sv.substr(comma + 1), lineno);
    pts.push_back({x, t});
  }
  return SpanningArc(std::move(pts));
}

void save_arc_csv(const std::filesystem::path& path, const SpanningArc& arc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.filename().string());
  write_arc_csv(out, arc);
}

SpanningArc load_arc_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.filename().string());
  return read_arc_csv(in);
}

}  // namespace annulus
