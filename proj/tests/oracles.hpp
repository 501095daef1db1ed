#pragma once

// Reference implementations used only by the tests. They avoid the library
// predicates on purpose.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "annulus/geometry.hpp"

namespace oracle {

using annulus::SpanningArc;
using annulus::StripPoint;

// x-coordinate of a t-monotone polyline at height t.
inline double graph_x(const SpanningArc& a, double t) {
  const auto& v = a.vertices();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (t <= v[i + 1].t) {
      const double s = (t - v[i].t) / (v[i + 1].t - v[i].t);
      return v[i].x + s * (v[i + 1].x - v[i].x);
    }
  }
  return v.back().x;
}

// min over t of x_sub(t) + shift - x_ref(t); the difference of two PL graphs
// is PL between the union of their knot heights, so the knots suffice.
inline double graph_gap(const SpanningArc& sub, double shift, const SpanningArc& ref) {
  std::vector<double> ts;
  for (const auto& p : sub.vertices()) ts.push_back(p.t);
  for (const auto& p : ref.vertices()) ts.push_back(p.t);
  double g = std::numeric_limits<double>::infinity();
  for (double t : ts) g = std::min(g, graph_x(sub, t) + shift - graph_x(ref, t));
  return g;
}

// Strictly-between by the definition, over every pair of lifts in
// [-w, w]^2: some lift of g2 right of g1 that is left of every lift of g3
// right of g1.
inline bool between_bruteforce(const SpanningArc& g1, const SpanningArc& g2,
                               const SpanningArc& g3, std::int64_t w, double sep = 1e-9) {
  for (std::int64_t b = -w; b <= w; ++b) {
    if (graph_gap(g2, double(b), g1) < sep) continue;
    bool all = true, any3 = false;
    for (std::int64_t c = -w; c <= w && all; ++c) {
      if (graph_gap(g3, double(c), g1) < sep) continue;
      any3 = true;
      if (graph_gap(g3, double(c), g2) - double(b) < sep) all = false;
    }
    if (all && any3) return true;
  }
  return false;
}

// Cyclic order of offsets on the circle: a2 strictly inside the arc from a1
// to a3.
inline bool cyclic_between(double a1, double a2, double a3) {
  auto m = [](double v) { return v - std::floor(v); };
  const double d2 = m(a2 - a1), d3 = m(a3 - a1);
  return d2 > 0.0 && d2 < d3;
}

// A t-monotone wiggly arc translated by `offset`.
inline SpanningArc wiggle(double offset, const std::vector<double>& dx) {
  std::vector<StripPoint> v;
  const std::size_t k = dx.size();
  for (std::size_t i = 0; i < k; ++i)
    v.push_back({offset + dx[i], double(i) / double(k - 1)});
  v.front().t = 0.0;
  v.back().t = 1.0;
  return SpanningArc(v);
}

inline std::vector<double> random_shape(std::mt19937_64& rng, std::size_t knots, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> dx(knots);
  for (auto& d : dx) d = u(rng);
  return dx;
}

}  // namespace oracle
