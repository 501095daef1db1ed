// Threading a spanning arc between two bundles of arcs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "annulus/curves.hpp"
#include "annulus/errors.hpp"

namespace annulus {

std::optional<SpanningArc> place_between(const SpanningArc& arc, const SpanningArc& left,
                                         const SpanningArc& right, double sep) {
  const SpanningArc* all[] = {&arc, &left, &right};
  const std::int64_t w = lift_window(all) + static_cast<std::int64_t>(std::ceil(
                             std::abs(arc.bounds().xmin - left.bounds().xmin)));
  for (std::int64_t c = -w; c <= w; ++c) {
    const double dc = static_cast<double>(c);
    if (arc_strictly_right_of(arc, dc, left, sep) && arc_strictly_right_of(right, -dc, arc, sep))
      return arc.translated(dc);
  }
  return std::nullopt;
}

namespace {

struct Raster {
  double x0 = 0.0, h = 1.0;
  int cols = 0, rows = 0;
  std::vector<std::uint8_t> free;

  std::size_t id(int c, int r) const { return static_cast<std::size_t>(r) * cols + c; }
  double cx(int c) const { return x0 + (c + 0.5) * h; }
  double ct(int r) const { return (r + 0.5) * h; }
  int col(double x) const { return static_cast<int>(std::floor((x - x0) / h)); }
  int row(double t) const { return std::clamp(static_cast<int>(std::floor(t / h)), 0, rows - 1); }
  bool is_free(int c, int r) const {
    return c >= 0 && c < cols && r >= 0 && r < rows && free[id(c, r)];
  }
};

// x-coordinates where the arc crosses the horizontal line at height t.
std::vector<double> crossings(const SpanningArc& a, double t) {
  std::vector<double> xs;
  const auto& v = a.vertices();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if ((v[i].t > t) == (v[i + 1].t > t)) continue;
    const double u = (t - v[i].t) / (v[i + 1].t - v[i].t);
    xs.push_back(v[i].x + u * (v[i + 1].x - v[i].x));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

void mark_sides(Raster& g, std::span<const SpanningArc> arcs, bool want_right) {
  for (int r = 0; r < g.rows; ++r) {
    for (const auto& a : arcs) {
      const auto xs = crossings(a, g.ct(r));
      std::size_t k = 0;
      for (int c = 0; c < g.cols; ++c) {
        const double x = g.cx(c);
        while (k < xs.size() && xs[k] <= x) ++k;
        const bool right = (xs.size() - k) % 2 == 0;
        if (right != want_right) g.free[g.id(c, r)] = 0;
      }
    }
  }
}

void mark_blocked(Raster& g, std::span<const SpanningArc> arcs) {
  for (const auto& a : arcs) {
    const auto& v = a.vertices();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double len = std::hypot(v[i + 1].x - v[i].x, v[i + 1].t - v[i].t);
      const int steps = std::max(1, static_cast<int>(std::ceil(4.0 * len / g.h)));
      for (int s = 0; s <= steps; ++s) {
        const double u = static_cast<double>(s) / steps;
        const int c = g.col(v[i].x + u * (v[i + 1].x - v[i].x));
        const int r = g.row(v[i].t + u * (v[i + 1].t - v[i].t));
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int cc = c + dc, rr = r + dr;
            if (cc >= 0 && cc < g.cols && rr >= 0 && rr < g.rows) g.free[g.id(cc, rr)] = 0;
          }
      }
    }
  }
}

bool segment_free(const Raster& g, StripPoint a, StripPoint b) {
  const double len = std::hypot(b.x - a.x, b.t - a.t);
  const int steps = std::max(1, static_cast<int>(std::ceil(4.0 * len / g.h)));
  for (int s = 0; s <= steps; ++s) {
    const double u = static_cast<double>(s) / steps;
    const double x = a.x + u * (b.x - a.x), t = a.t + u * (b.t - a.t);
    if (!g.is_free(g.col(x), g.row(t))) return false;
  }
  return true;
}

std::optional<std::vector<StripPoint>> cheapest_path(const Raster& g) {
  const std::size_t n = g.free.size();
  // Clearance: grid distance to the nearest blocked cell.
  std::vector<int> clear(n, std::numeric_limits<int>::max());
  std::queue<std::size_t> bfs;
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c)
      if (!g.free[g.id(c, r)] || c == 0 || c == g.cols - 1) {
        clear[g.id(c, r)] = g.free[g.id(c, r)] ? 1 : 0;
        bfs.push(g.id(c, r));
      }
  const int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
  while (!bfs.empty()) {
    const std::size_t u = bfs.front();
    bfs.pop();
    const int c = static_cast<int>(u % g.cols), r = static_cast<int>(u / g.cols);
    for (int k = 0; k < 4; ++k) {
      const int cc = c + dc[k], rr = r + dr[k];
      if (cc < 0 || cc >= g.cols || rr < 0 || rr >= g.rows) continue;
      const std::size_t v = g.id(cc, rr);
      if (clear[v] > clear[u] + 1) {
        clear[v] = clear[u] + 1;
        bfs.push(v);
      }
    }
  }

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> prev(n, -1);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (int c = 0; c < g.cols; ++c) {
    if (!g.free[g.id(c, 0)]) continue;
    dist[g.id(c, 0)] = 1.0 / clear[g.id(c, 0)];
    pq.push({dist[g.id(c, 0)], g.id(c, 0)});
  }
  std::int64_t goal = -1;
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    const int c = static_cast<int>(u % g.cols), r = static_cast<int>(u / g.cols);
    if (r == g.rows - 1) {
      goal = static_cast<std::int64_t>(u);
      break;
    }
    for (int k = 0; k < 4; ++k) {
      const int cc = c + dc[k], rr = r + dr[k];
      if (!g.is_free(cc, rr)) continue;
      const std::size_t v = g.id(cc, rr);
      const double nd = d + 0.25 + 4.0 / clear[v];
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = static_cast<std::int64_t>(u);
        pq.push({nd, v});
      }
    }
  }
  if (goal < 0) return std::nullopt;

  std::vector<StripPoint> cells;
  for (std::int64_t u = goal; u >= 0; u = prev[static_cast<std::size_t>(u)]) {
    const int c = static_cast<int>(u % g.cols), r = static_cast<int>(u / g.cols);
    cells.push_back({g.cx(c), g.ct(r)});
  }
  std::reverse(cells.begin(), cells.end());
  std::vector<StripPoint> pts;
  pts.push_back({cells.front().x, 0.0});
  pts.insert(pts.end(), cells.begin(), cells.end());
  pts.push_back({cells.back().x, 1.0});

  // Greedy shortcutting inside the free cells.
  std::vector<StripPoint> out{pts.front()};
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    std::size_t j = i + 1;
    for (std::size_t k = pts.size() - 1; k > i + 1; --k) {
      if (segment_free(g, pts[i], pts[k])) {
        j = k;
        break;
      }
    }
    out.push_back(pts[j]);
    i = j;
  }
  return out;
}

}  // namespace

std::optional<SpanningArc> thread_corridor(std::span<const SpanningArc> left,
                                           std::span<const SpanningArc> right, int rows,
                                           int doublings, double sep) {
  if (left.empty() || right.empty()) return std::nullopt;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& a : left) lo = std::min(lo, a.bounds().xmin);
  for (const auto& a : right) hi = std::max(hi, a.bounds().xmax);
  for (int level = 0; level <= doublings; ++level) {
    Raster g;
    g.rows = rows << level;
    g.h = 1.0 / g.rows;
    g.x0 = lo - 2.0 * g.h;
    g.cols = static_cast<int>(std::ceil((hi - lo) / g.h)) + 4;
    g.free.assign(static_cast<std::size_t>(g.cols) * g.rows, 1);
    mark_sides(g, left, true);
    mark_sides(g, right, false);
    mark_blocked(g, left);
    mark_blocked(g, right);
    const auto path = cheapest_path(g);
    if (!path) continue;
    std::optional<SpanningArc> arc;
    try {
      arc.emplace(*path);
    } catch (const Error&) {
      continue;
    }
    bool ok = true;
    for (const auto& a : left) ok = ok && arc_strictly_right_of(*arc, a, sep);
    for (const auto& b : right) ok = ok && arc_strictly_right_of(b, *arc, sep);
    if (ok) return arc;
  }
  return std::nullopt;
}

}  // namespace annulus
