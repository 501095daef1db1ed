#pragma once

// Curve families on the annulus whose images under a rational
// pseudo-rotation are squeezed between neighbours, together with an exact
// verifier producing a list of checked facts.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "annulus/dynamics.hpp"
#include "annulus/geometry.hpp"
#include "annulus/tolerances.hpp"

namespace annulus {

// The permutation sigma of {1..q-1} and integers t(i) with
// sigma(i) p/q + t(i) = i/q, extended by sigma(0) = sigma(q) = 0,
// t(0) = 0, t(q) = 1.
struct SigmaData {
  std::int64_t p = 0, q = 1;
  std::vector<std::int64_t> sigma;  // indices 0..q
  std::vector<std::int64_t> t;      // indices 0..q

  std::int64_t sigma_inv(std::int64_t i) const;
};

SigmaData sigma_data(std::int64_t p, std::int64_t q);

// T^shift composed with f^power; all such lifts of one map commute.
struct LiftTerm {
  std::int64_t shift = 0;
  std::int64_t power = 1;

  StripPoint apply(const LiftMap& f, StripPoint p) const;
  friend bool operator==(const LiftTerm&, const LiftTerm&) = default;
};

// The two families of lifts whose common pushed curve starts the
// construction, for 0 <= i < q and 0 <= j <= M, duplicates removed.
std::vector<LiftTerm> base_lift_terms(const SigmaData& sd, std::int64_t M);

struct SearchBudget {
  int grid_w = 512;          // frontier grid columns over a 4-unit window
  int grid_h = 128;          // frontier grid rows
  int doublings = 2;         // resolution doublings before giving up
  double window = 4.0;       // how far left of the start the frontier may move
  int corridor_res = 64;     // rows of the corridor grid used for threading
  std::int64_t rotation_n = 512;
  int rotation_res = 16;
  double angle_tol = 1e-2;
  std::size_t max_curve_points = 400000;
  int loop_attempts = 64;
};

// Polyline image of f^power(arc) (then shifted by `shift`), refined until
// consecutive image points are within tol.curve.
SpanningArc image_arc(const LiftMap& f, const SpanningArc& arc, std::int64_t power,
                      const Tolerances& tol, double shift = 0.0,
                      std::size_t max_points = 400000);

// Image points of f^power along an arbitrary polyline, refined so that
// consecutive points are within tau.
std::vector<StripPoint> image_polyline(const LiftMap& f, const std::vector<StripPoint>& src,
                                       std::int64_t power, double tau,
                                       std::size_t max_points = 400000);

// All images f^k(arc) for k = 0..count (or 0..-count when count < 0),
// computed incrementally.
std::vector<SpanningArc> image_orbit(const LiftMap& f, const SpanningArc& arc, std::int64_t count,
                                     const Tolerances& tol, std::size_t max_points = 400000);

// A spanning arc gamma with every F(gamma) strictly right of gamma, checked
// exactly before it is returned.
SpanningArc push_right_curve(const LiftMap& f, std::span<const LiftTerm> lifts,
                             const SearchBudget& budget, const Tolerances& tol);

// Translate of `arc` lying strictly right of `left` and strictly left of
// `right`, searched over integer shifts.
std::optional<SpanningArc> place_between(const SpanningArc& arc, const SpanningArc& left,
                                         const SpanningArc& right, double sep);

// A spanning arc strictly right of every arc in `left` and strictly left of
// every arc in `right`, threaded through the free corridor between them.
std::optional<SpanningArc> thread_corridor(std::span<const SpanningArc> left,
                                           std::span<const SpanningArc> right, int rows,
                                           int doublings, double sep);

struct FamilyFact {
  std::string kind;  // disjoint | between | single-lift
  std::int64_t i = 0, k = 0;
  std::int64_t lo = 0, hi = 0;  // neighbour indices for `between`
  bool holds = false;
  std::int64_t lift2 = 0, lift3 = 0;
  int meets = 0;
  std::string note;
};

struct VerificationReport {
  bool passed = false;
  std::vector<FamilyFact> facts;

  std::size_t failures() const;
  std::string text() const;
  std::uint64_t digest() const;
};

struct CurveFamily {
  std::int64_t p = 0, q = 1, n = 1, N = 1;
  // Lifts ordered left to right inside [lift_0, T lift_0).
  std::vector<SpanningArc> curves;
  VerificationReport certificate;
  std::string method;  // vertical-candidates | induction | loaded

  std::int64_t size() const { return static_cast<std::int64_t>(curves.size()); }
  const SpanningArc& at(std::int64_t i) const;  // index taken mod nq
  CurveFamily translated(double dx) const;
};

// Verticals x0 + i/(nq).
CurveFamily vertical_family(std::int64_t p, std::int64_t q, std::int64_t n, std::int64_t N,
                            double x0 = 0.0);

VerificationReport verify_family(const LiftMap& f, const CurveFamily& fam, const Tolerances& tol);

// The lift of m with rotation number close to p/q (m shifted by a deck
// translation), or NotPseudoRotation.
LiftMap normalized_lift(const LiftMap& m, std::int64_t p, std::int64_t q,
                        const SearchBudget& budget);

CurveFamily build_curve_family(const LiftMap& m, std::int64_t p, std::int64_t q, std::int64_t n,
                               std::int64_t N, const SearchBudget& budget, const Tolerances& tol);

// Construction through the inductive scheme only (no vertical shortcut).
CurveFamily build_curve_family_inductive(const LiftMap& f, std::int64_t p, std::int64_t q,
                                         std::int64_t n, std::int64_t N,
                                         const SearchBudget& budget, const Tolerances& tol);

void save_family(const std::filesystem::path& dir, const CurveFamily& fam);
CurveFamily load_family(const std::filesystem::path& dir);

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull);
std::string hex64(std::uint64_t v);

}  // namespace annulus
