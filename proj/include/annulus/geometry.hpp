#pragma once

// Geometry on the strip R x [0,1], the universal cover of the annulus
// S^1 x [0,1]. A point is (x, t): x is the lift coordinate, t the fiber.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <string>
#include <vector>

namespace annulus {

struct StripPoint {
  double x = 0.0;
  double t = 0.0;

  friend bool operator==(const StripPoint&, const StripPoint&) = default;
};

struct Box {
  double xmin, tmin, xmax, tmax;

  bool overlaps(const Box& o) const {
    return xmin <= o.xmax && o.xmin <= xmax && tmin <= o.tmax && o.tmin <= tmax;
  }
  Box inflated(double d) const { return {xmin - d, tmin - d, xmax + d, tmax + d}; }
};

// Power of the unit deck translation T(x, t) = (x + 1, t).
struct DeckTranslate {
  std::int64_t k = 0;

  StripPoint apply(StripPoint p) const { return {p.x + static_cast<double>(k), p.t}; }
};

enum class Side { Left, Right, On };

std::string_view to_string(Side s);

double orient(StripPoint a, StripPoint b, StripPoint c);
double segment_distance(StripPoint a, StripPoint b, StripPoint c, StripPoint d);
double point_segment_distance(StripPoint p, StripPoint a, StripPoint b);
bool segments_intersect(StripPoint a, StripPoint b, StripPoint c, StripPoint d);

// Distance on the annulus: circle distance in x, plain difference in t,
// combined as a Euclidean product.
double annulus_distance(StripPoint a, StripPoint b);
double circle_distance(double x1, double x2);

// Uniform-grid bucket index over the segments of a polyline; answers
// "which segments might touch this box" queries. A segment can be visited
// more than once per query.
class SegmentIndex {
 public:
  explicit SegmentIndex(std::span<const StripPoint> polyline);

  template <class Visit>
  void query(const Box& box, Visit&& visit) const;

  const Box& bounds() const { return bounds_; }
  std::size_t segment_count() const { return pts_.size() < 2 ? 0 : pts_.size() - 1; }

 private:
  std::vector<StripPoint> pts_;
  Box bounds_{};
  int nx_ = 1, ny_ = 1;
  double cw_ = 1.0, ch_ = 1.0;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> ids_;

  int cell_x(double x) const;
  int cell_t(double t) const;
};

// A simple polyline joining the bottom boundary (t = 0) to the top
// boundary (t = 1) of the strip, oriented upward.
class SpanningArc {
 public:
  // Validates endpoints, interior vertices, segment lengths and simplicity.
  explicit SpanningArc(std::vector<StripPoint> vertices);

  static SpanningArc vertical(double x);

  const std::vector<StripPoint>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  const Box& bounds() const { return bounds_; }
  const SegmentIndex& index() const { return *index_; }
  double length() const;

  SpanningArc translated(double dx) const;

 private:
  std::vector<StripPoint> v_;
  Box bounds_{};
  std::shared_ptr<const SegmentIndex> index_;
};

Side side_of_arc(const SpanningArc& arc, StripPoint p);

// Minimum distance between the polylines, with `a` shifted by dx. Returns
// early with any value below `cutoff` once one is found.
double arc_distance(const SpanningArc& a, const SpanningArc& b, double dx = 0.0,
                    double cutoff = 0.0);

// True iff `subject` lies in the right component of strip minus `reference`
// with clearance at least `sep`.
bool arc_strictly_right_of(const SpanningArc& subject, const SpanningArc& reference,
                           double sep = 1e-9);
// Same relation for T^shift(subject) against reference, without copying.
bool arc_strictly_right_of(const SpanningArc& subject, double shift,
                           const SpanningArc& reference, double sep);

SpanningArc translate_arc(const SpanningArc& arc, DeckTranslate d);

// Half-width of the lift search window used by the betweenness predicate.
std::int64_t lift_window(std::span<const SpanningArc* const> arcs);

// Annulus curves are given by one lift each. Throws NotDisjoint when the
// projections meet (or come closer than `sep`) or are not simple.
bool annulus_strictly_between(const SpanningArc& g1, const SpanningArc& g2,
                              const SpanningArc& g3, double sep = 1e-9);

// Witness data for the betweenness relation: lifts T^b g2 and T^c g3 with
// g1 fixed at k = 0.
struct BetweenWitness {
  bool holds = false;
  std::int64_t lift2 = 0;
  std::int64_t lift3 = 0;
};
BetweenWitness annulus_between_witness(const SpanningArc& g1, const SpanningArc& g2,
                                       const SpanningArc& g3, double sep = 1e-9);

void require_annulus_disjoint(std::span<const SpanningArc* const> arcs, double sep);

// CSV with header `t,x`, one vertex per row.
void write_arc_csv(std::ostream& out, const SpanningArc& arc);
SpanningArc read_arc_csv(std::istream& in);
void save_arc_csv(const std::filesystem::path& path, const SpanningArc& arc);
SpanningArc load_arc_csv(const std::filesystem::path& path);

std::string format_double(double v);

// ---------------------------------------------------------------------------

template <class Visit>
void SegmentIndex::query(const Box& box, Visit&& visit) const {
  if (pts_.size() < 2 || !box.overlaps(bounds_)) return;
  const int x0 = cell_x(box.xmin), x1 = cell_x(box.xmax);
  const int t0 = cell_t(box.tmin), t1 = cell_t(box.tmax);
  for (int j = t0; j <= t1; ++j) {
    for (int i = x0; i <= x1; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
      for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) {
        visit(static_cast<std::size_t>(ids_[k]));
      }
    }
  }
}

}  // namespace annulus
