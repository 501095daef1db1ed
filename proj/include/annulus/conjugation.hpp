#pragma once

// From a verified curve family to a conjugating homeomorphism h: transversal
// loops, the curved cell grid, cell-wise transfinite interpolation onto the
// flat grid, and the distance between h f h^-1 and the rigid rotation.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "annulus/curves.hpp"
#include "annulus/dynamics.hpp"
#include "annulus/geometry.hpp"
#include "annulus/tolerances.hpp"

namespace annulus {

// A loop t = g(x) with g periodic and piecewise linear through the knots
// (k/K, values[k]), k = 0..K-1.
struct GraphLoop {
  std::vector<double> values;

  static GraphLoop horizontal(double t) { return GraphLoop{{t}}; }
  double at(double x) const;
  std::size_t knots() const { return values.size(); }
  // Knot abscissae strictly inside (x0, x1).
  std::vector<double> knots_between(double x0, double x1) const;
  // Points of the graph over [x0, x1], endpoints and knots included.
  std::vector<StripPoint> polyline(double x0, double x1) const;
};

struct LoopFact {
  std::string kind;  // ordered | image-between | crossing
  std::int64_t j = 0, i = 0;
  bool holds = false;
  std::string note;
};

struct LoopFamily {
  std::int64_t Nprime = 1;
  std::vector<GraphLoop> loops;  // 0..N'
  std::vector<LoopFact> facts;

  bool passed() const;
};

// Checks every loop condition and records the facts.
std::vector<LoopFact> check_loops(const LiftMap& f, const CurveFamily& fam,
                                  const std::vector<GraphLoop>& loops, const Tolerances& tol);

LoopFamily build_loops(const LiftMap& f, const CurveFamily& fam, std::int64_t Nprime,
                       const SearchBudget& budget, const Tolerances& tol);

// A boundary piece used by a cell: a polyline parameterized by normalized
// length, restricted to [a, b] of that parameter. Length blends Euclidean
// length with height travelled |dt| by `height_weight`.
struct EdgeCurve {
  std::vector<StripPoint> pts;
  std::vector<double> cum;  // normalized cumulative length, cum.front() = 0, back() = 1
  double a = 0.0, b = 1.0;

  explicit EdgeCurve(std::vector<StripPoint> pts = {}, double a = 0.0, double b = 1.0,
                     double height_weight = 0.0);
  StripPoint at(double u) const;  // u in [0,1] maps to parameter a + u (b - a)
  EdgeCurve sub(double u0, double u1) const;
};

// Coons patch of four edges with matching corners: bottom(u), top(u),
// left(v), right(v), u and v in [0,1].
struct CoonsPatch {
  EdgeCurve bottom, top, left, right;
  StripPoint c00, c10, c01, c11;

  StripPoint at(double u, double v) const;
  // Jacobian determinant by central differences.
  double jacobian(double u, double v) const;
};

struct Cell {
  std::int64_t i = 0, j = 0;
  std::vector<StripPoint> polygon;  // counter-clockwise
  Box bounds{};
  Box flat{};  // [i/m, (i+1)/m] x [j/N', (j+1)/N']
  std::vector<CoonsPatch> patches;  // one, or four after subdivision
  bool subdivided = false;
  double area = 0.0;
};

struct CellGrid {
  std::int64_t m = 1;  // curves (N q)
  std::int64_t Nprime = 1;
  std::vector<Cell> cells;  // index j * m + i
  double area_sum = 0.0;
  std::size_t location_failures = 0;  // samples not in exactly one cell

  const Cell& cell(std::int64_t i, std::int64_t j) const;
};

CellGrid build_grid(const CurveFamily& fam, const LoopFamily& loops);

class GridConjugacy {
 public:
  explicit GridConjugacy(CellGrid grid, double tol_inv = 1e-10);

  // h: curved grid to flat grid.
  StripPoint forward(StripPoint p) const;
  // h^-1: flat grid to curved grid, closed form on each cell.
  StripPoint inverse(StripPoint p) const;
  // Cell (i, j) containing p (after an integer shift), or {-1, -1}.
  std::pair<std::int64_t, std::int64_t> locate(StripPoint p) const;

  const CellGrid& grid() const { return grid_; }
  std::size_t subdivided_cells() const;

 private:
  CellGrid grid_;
  double tol_inv_;
  double xmin_ = 0.0;

  bool solve_in_cell(const Cell& c, StripPoint p, StripPoint& flat) const;
};

GridConjugacy build_conjugacy(CellGrid grid, const Tolerances& tol);

// sup over a res x (res+1) grid of the annulus distance between
// h f h^-1 (y) and R_{p/q}(y).
double conjugate_distance(const GridConjugacy& h, const LiftMap& f, std::int64_t p, std::int64_t q,
                          int res);

// Diameter of a 3x3 block of flat cells in the annulus metric.
double theoretical_bound(std::int64_t N, std::int64_t q, std::int64_t Nprime);

struct ConjugationReport {
  std::int64_t p = 0, q = 1, N = 1, Nprime = 1;
  CurveFamily family;
  LoopFamily loops;
  double achieved = 0.0;
  double bound = 0.0;
  double mesh = 0.0;
  double seam_mismatch = 0.0;
  double roundtrip_defect = 0.0;  // h(h^-1(y)) - y
  double tol_inv = 1e-10;         // bound for the seam and round-trip defects
  std::size_t containment_failures = 0;
  std::size_t location_failures = 0;
  double area_sum = 0.0;
  std::size_t subdivided = 0;
  bool certificates_passed = false;

  bool passed() const;
  std::string text() const;
};

// Whole pipeline: family with n = N, loops, grid, h, distance and bound.
// Returns the conjugacy through `out_h` when non-null.
ConjugationReport run_conjugation(const LiftMap& m, std::int64_t p, std::int64_t q, std::int64_t N,
                                  std::int64_t Nprime, const SearchBudget& budget,
                                  const Tolerances& tol, int res,
                                  std::unique_ptr<GridConjugacy>* out_h = nullptr);

}  // namespace annulus
