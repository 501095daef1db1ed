#include "annulus/curves.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "annulus/errors.hpp"
#include "annulus/rotation.hpp"

namespace annulus {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
  return s;
}

// ---------------------------------------------------------------------------
// Sigma data and base lifts

static std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

std::int64_t SigmaData::sigma_inv(std::int64_t i) const { return mod(i * p, q); }

SigmaData sigma_data(std::int64_t p, std::int64_t q) {
  const bool trivial = (p == 0 && q == 1);
  if (!trivial && !(q > 1 && p > 0 && p < q && gcd64(p, q) == 1))
    throw Error(ErrorKind::BadAngle, "need (p,q) = (0,1) or 0 < p < q with gcd(p,q) = 1");
  SigmaData sd;
  sd.p = p;
  sd.q = q;
  sd.sigma.assign(static_cast<std::size_t>(q) + 1, 0);
  sd.t.assign(static_cast<std::size_t>(q) + 1, 0);
  for (std::int64_t i = 1; i < q; ++i) sd.sigma[static_cast<std::size_t>(mod(i * p, q))] = i;
  for (std::int64_t i = 1; i < q; ++i) {
    const std::int64_t num = i - sd.sigma[static_cast<std::size_t>(i)] * p;
    sd.t[static_cast<std::size_t>(i)] = num / q;  // exact by construction
  }
  sd.t[static_cast<std::size_t>(q)] = 1;
  return sd;
}

StripPoint LiftTerm::apply(const LiftMap& f, StripPoint p) const {
  p = f.power(p, power);
  p.x += static_cast<double>(shift);
  return p;
}

std::vector<LiftTerm> base_lift_terms(const SigmaData& sd, std::int64_t M) {
  std::vector<LiftTerm> out;
  auto add = [&](LiftTerm t) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  for (std::int64_t i = 0; i < sd.q; ++i) {
    const auto a = static_cast<std::size_t>(i), b = a + 1;
    const std::int64_t dt = sd.t[b] - sd.t[a];
    const std::int64_t ds = sd.sigma[b] - sd.sigma[a];
    for (std::int64_t j = 0; j <= M; ++j) {
      add({dt - j * sd.p, ds + j * sd.q});
      add({dt + j * sd.p, ds - j * sd.q});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curve images

namespace {

StripPoint source_point(const std::vector<StripPoint>& v, double s) {
  const auto n = v.size() - 1;
  std::size_t i = static_cast<std::size_t>(std::floor(s));
  if (i >= n) return v.back();
  const double u = s - static_cast<double>(i);
  return {v[i].x + u * (v[i + 1].x - v[i].x), v[i].t + u * (v[i + 1].t - v[i].t)};
}

// Images of points along a source polyline, refined so consecutive images
// are within tau. `params` are positions along the source (vertex i at i).
struct TrackedImage {
  std::vector<double> params;
  std::vector<StripPoint> pts;

  void refine(const std::vector<StripPoint>& src, const std::function<StripPoint(StripPoint)>& eval,
              double tau, std::size_t max_points) {
    std::vector<double> np;
    std::vector<StripPoint> npts;
    np.reserve(params.size());
    npts.reserve(pts.size());
    struct Gap {
      double s0, s1;
      StripPoint p0, p1;
    };
    std::vector<Gap> stack;
    for (std::size_t i = 0; i + 1 < params.size(); ++i) {
      np.push_back(params[i]);
      npts.push_back(pts[i]);
      stack.push_back({params[i], params[i + 1], pts[i], pts[i + 1]});
      // Depth-first so that points come out in order.
      std::vector<std::pair<double, StripPoint>> inserted;
      while (!stack.empty()) {
        Gap g = stack.back();
        stack.pop_back();
        if (std::hypot(g.p1.x - g.p0.x, g.p1.t - g.p0.t) <= tau || g.s1 - g.s0 < 1e-12 ||
            np.size() + inserted.size() + params.size() > max_points)
          continue;
        const double sm = 0.5 * (g.s0 + g.s1);
        const StripPoint pm = eval(source_point(src, sm));
        inserted.push_back({sm, pm});
        stack.push_back({sm, g.s1, pm, g.p1});
        stack.push_back({g.s0, sm, g.p0, pm});
      }
      std::sort(inserted.begin(), inserted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [s, p] : inserted) {
        np.push_back(s);
        npts.push_back(p);
      }
    }
    np.push_back(params.back());
    npts.push_back(pts.back());
    params = std::move(np);
    pts = std::move(npts);
  }

  SpanningArc arc(double shift) const {
    std::vector<StripPoint> v;
    v.reserve(pts.size());
    for (const auto& p : pts) {
      const StripPoint q{p.x + shift, p.t};
      if (!v.empty() && v.back() == q) continue;
      v.push_back(q);
    }
    return SpanningArc(std::move(v));
  }
};

TrackedImage start_tracking(const SpanningArc& arc) {
  TrackedImage ti;
  const auto& v = arc.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    ti.params.push_back(static_cast<double>(i));
    ti.pts.push_back(v[i]);
  }
  return ti;
}

}  // namespace

std::vector<StripPoint> image_polyline(const LiftMap& f, const std::vector<StripPoint>& src,
                                       std::int64_t power, double tau, std::size_t max_points) {
  TrackedImage ti;
  auto eval = [&](StripPoint p) { return f.power(p, power); };
  for (std::size_t i = 0; i < src.size(); ++i) {
    ti.params.push_back(static_cast<double>(i));
    ti.pts.push_back(eval(src[i]));
  }
  if (src.size() >= 2) ti.refine(src, eval, tau, max_points);
  return ti.pts;
}

SpanningArc image_arc(const LiftMap& f, const SpanningArc& arc, std::int64_t power,
                      const Tolerances& tol, double shift, std::size_t max_points) {
  if (power == 0) return shift == 0.0 ? arc : arc.translated(shift);
  TrackedImage ti = start_tracking(arc);
  auto eval = [&](StripPoint p) { return f.power(p, power); };
  for (auto& p : ti.pts) p = eval(p);
  ti.refine(arc.vertices(), eval, tol.curve, max_points);
  return ti.arc(shift);
}

std::vector<SpanningArc> image_orbit(const LiftMap& f, const SpanningArc& arc, std::int64_t count,
                                     const Tolerances& tol, std::size_t max_points) {
  std::vector<SpanningArc> out{arc};
  TrackedImage ti = start_tracking(arc);
  const std::int64_t step = count >= 0 ? 1 : -1;
  for (std::int64_t k = 1; k <= std::abs(count); ++k) {
    for (auto& p : ti.pts) p = step > 0 ? f.forward(p) : f.inverse(p);
    const std::int64_t power = k * step;
    ti.refine(arc.vertices(), [&](StripPoint p) { return f.power(p, power); }, tol.curve,
              max_points);
    out.push_back(ti.arc(0.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pushed curve

namespace {

bool pushed_right(const LiftMap& f, const SpanningArc& g, std::span<const LiftTerm> lifts,
                  const Tolerances& tol, std::size_t max_points) {
  for (const auto& L : lifts) {
    try {
      const SpanningArc img = image_arc(f, g, L.power, tol, static_cast<double>(L.shift), max_points);
      if (!arc_strictly_right_of(img, g, tol.sep)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

std::optional<SpanningArc> frontier_curve(const LiftMap& f, std::span<const LiftTerm> lifts,
                                          const SearchBudget& budget, int level) {
  const std::int64_t cols_per_unit = static_cast<std::int64_t>(budget.grid_w / 4) << level;
  const int rows = budget.grid_h << level;
  const double cw = 1.0 / static_cast<double>(cols_per_unit);
  const double ch = 1.0 / rows;
  const auto floor_col = static_cast<std::int64_t>(-std::ceil(budget.window * cols_per_unit));

  // Largest leftward move of any lift on the unit square.
  double maxleft = 0.0;
  for (const auto& p : stratified_samples(32)) {
    for (const auto& L : lifts) maxleft = std::max(maxleft, p.x - L.apply(f, p).x);
  }
  const auto reach = static_cast<std::int64_t>(std::ceil(maxleft / cw)) + 2;

  std::vector<std::int64_t> phi(static_cast<std::size_t>(rows), 0);
  auto row_of = [&](double t) { return std::clamp(static_cast<int>(std::floor(t * rows)), 0, rows - 1); };
  bool changed = true;
  while (changed) {
    changed = false;
    const std::int64_t phimax = *std::max_element(phi.begin(), phi.end());
    for (int r = 0; r < rows; ++r) {
      for (std::int64_t c = phi[static_cast<std::size_t>(r)]; c <= phimax + reach; ++c) {
        for (int a = 0; a <= 2; ++a) {
          for (int b = 0; b <= 2; ++b) {
            const StripPoint p{(static_cast<double>(c) + 0.5 * a) * cw,
                               std::min(1.0, (r + 0.5 * b) * ch)};
            for (const auto& L : lifts) {
              const StripPoint q = L.apply(f, p);
              const int rq = row_of(q.t);
              const auto cq = static_cast<std::int64_t>(std::floor(q.x / cw)) - 1;
              for (int rr = std::max(0, rq - 1); rr <= std::min(rows - 1, rq + 1); ++rr) {
                auto& v = phi[static_cast<std::size_t>(rr)];
                if (cq < v) {
                  v = cq;
                  changed = true;
                  if (v < floor_col) return std::nullopt;
                }
              }
            }
          }
        }
      }
    }
  }

  std::vector<StripPoint> pts;
  auto xr = [&](int r) { return static_cast<double>(phi[static_cast<std::size_t>(r)]) * cw; };
  pts.push_back({xr(0), 0.0});
  for (int r = 0; r + 1 < rows; ++r) {
    if (phi[static_cast<std::size_t>(r)] == phi[static_cast<std::size_t>(r) + 1]) continue;
    const double t = static_cast<double>(r + 1) / rows;
    pts.push_back({xr(r), t});
    pts.push_back({xr(r + 1), t});
  }
  pts.push_back({xr(rows - 1), 1.0});
  return SpanningArc(std::move(pts));
}

}  // namespace

SpanningArc push_right_curve(const LiftMap& f, std::span<const LiftTerm> lifts,
                             const SearchBudget& budget, const Tolerances& tol) {
  if (lifts.empty()) throw Error(ErrorKind::ParamOutOfRange, "no lifts supplied");
  const auto probes = stratified_samples(2);
  for (std::size_t a = 0; a < lifts.size(); ++a) {
    for (std::size_t b = a + 1; b < lifts.size(); ++b) {
      for (const auto& p : probes) {
        const StripPoint u = lifts[a].apply(f, lifts[b].apply(f, p));
        const StripPoint v = lifts[b].apply(f, lifts[a].apply(f, p));
        if (std::hypot(u.x - v.x, u.t - v.t) > tol.inv)
          throw Error(ErrorKind::HypothesisViolated, "supplied lifts do not commute");
      }
    }
  }
  const RotationEstimate est = rotation_interval(f, budget.rotation_n, budget.rotation_res);
  for (const auto& L : lifts) {
    const double b = static_cast<double>(L.power);
    const double lo = static_cast<double>(L.shift) + (b >= 0 ? b * est.lo : b * est.hi);
    if (!(lo > 0.0))
      throw Error(ErrorKind::HypothesisViolated,
                  "lift T^" + std::to_string(L.shift) + " f^" + std::to_string(L.power) +
                      " has a rotation interval reaching " + format_double(lo));
  }

  for (int k = 0; k < 8; ++k) {
    // 0, 1/2, 1/4, 3/4, 1/8, ...
    static const double offsets[8] = {0.0, 0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875};
    const SpanningArc g = SpanningArc::vertical(offsets[k]);
    if (pushed_right(f, g, lifts, tol, budget.max_curve_points)) return g;
  }
  for (int level = 0; level <= budget.doublings; ++level) {
    auto g = frontier_curve(f, lifts, budget, level);
    if (g && pushed_right(f, *g, lifts, tol, budget.max_curve_points)) return *g;
  }
  throw Error(ErrorKind::NoCurveFound, "frontier search exhausted its budget");
}

// ---------------------------------------------------------------------------
// Families

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(facts.begin(), facts.end(), [](const FamilyFact& f) { return !f.holds; }));
}

std::string VerificationReport::text() const {
  std::ostringstream out;
  for (const auto& f : facts) {
    out << f.kind << " i=" << f.i << " k=" << f.k;
    if (f.kind == "between") out << " lo=" << f.lo << " hi=" << f.hi << " lifts=" << f.lift2 << "," << f.lift3;
    if (f.kind == "single-lift") out << " meets=" << f.meets;
    out << (f.holds ? " pass" : " FAIL");
    if (!f.note.empty()) out << " (" << f.note << ")";
    out << '\n';
  }
  return out.str();
}

std::uint64_t VerificationReport::digest() const { return fnv1a(text()); }

const SpanningArc& CurveFamily::at(std::int64_t i) const {
  return curves[static_cast<std::size_t>(mod(i, size()))];
}

CurveFamily CurveFamily::translated(double dx) const {
  CurveFamily out = *this;
  for (auto& c : out.curves) c = c.translated(dx);
  return out;
}

CurveFamily vertical_family(std::int64_t p, std::int64_t q, std::int64_t n, std::int64_t N,
                            double x0) {
  CurveFamily fam;
  fam.p = p;
  fam.q = q;
  fam.n = n;
  fam.N = N;
  fam.method = "vertical-candidates";
  const std::int64_t m = n * q;
  for (std::int64_t i = 0; i < m; ++i)
    fam.curves.push_back(SpanningArc::vertical(x0 + static_cast<double>(i) / static_cast<double>(m)));
  return fam;
}

VerificationReport verify_family(const LiftMap& f, const CurveFamily& fam, const Tolerances& tol) {
  VerificationReport rep;
  const std::int64_t m = fam.size();
  {
    FamilyFact d;
    d.kind = "disjoint";
    d.holds = m > 0;
    std::vector<const SpanningArc*> ptrs;
    for (const auto& c : fam.curves) ptrs.push_back(&c);
    if (m > 0) {
      try {
        require_annulus_disjoint(ptrs, tol.sep);
      } catch (const Error& e) {
        d.holds = false;
        d.note = e.what();
      }
    }
    rep.facts.push_back(d);
    if (!d.holds) return rep;
  }

  const bool single = (fam.n == 1 && fam.q == 1);
  for (std::int64_t i = 0; i < m; ++i) {
    std::vector<SpanningArc> orbit;
    std::string orbit_error;
    try {
      orbit = image_orbit(f, fam.at(i), fam.N, tol);
    } catch (const Error& e) {
      orbit_error = e.what();
    }
    for (std::int64_t k = 0; k <= fam.N; ++k) {
      FamilyFact fact;
      fact.i = i;
      fact.k = k;
      if (!orbit_error.empty()) {
        fact.kind = single ? "single-lift" : "between";
        fact.note = orbit_error;
        rep.facts.push_back(fact);
        continue;
      }
      const SpanningArc& img = orbit[static_cast<std::size_t>(k)];
      if (single) {
        fact.kind = "single-lift";
        const SpanningArc& g = fam.curves[0];
        const SpanningArc* both[] = {&img, &g};
        const std::int64_t w = lift_window(both) + 1;
        for (std::int64_t c = -w; c <= w; ++c) {
          if (arc_distance(img, g, static_cast<double>(c), tol.sep) < tol.sep) ++fact.meets;
        }
        fact.holds = fact.meets <= 1;
      } else {
        fact.kind = "between";
        const std::int64_t j = i + k * fam.n * fam.p;
        fact.lo = mod(j - 1, m);
        fact.hi = mod(j + 1, m);
        try {
          const BetweenWitness w = annulus_between_witness(fam.at(j - 1), img, fam.at(j + 1), tol.sep);
          fact.holds = w.holds;
          fact.lift2 = w.lift2;
          fact.lift3 = w.lift3;
        } catch (const Error& e) {
          fact.holds = false;
          fact.note = e.what();
        }
      }
      rep.facts.push_back(fact);
    }
  }
  rep.passed = rep.failures() == 0;
  return rep;
}

LiftMap normalized_lift(const LiftMap& m, std::int64_t p, std::int64_t q,
                        const SearchBudget& budget) {
  const RotationEstimate est =
      rotation_interval(m, budget.rotation_n, budget.rotation_res, budget.angle_tol);
  const double target = static_cast<double>(p) / static_cast<double>(q);
  const double k = std::round(est.mid() - target);
  if (!est.converged || std::abs(est.mid() - target - k) > budget.angle_tol)
    throw Error(ErrorKind::NotPseudoRotation,
                "rotation estimate [" + format_double(est.lo) + ", " + format_double(est.hi) +
                    "] is not within tolerance of " + std::to_string(p) + "/" + std::to_string(q));
  if (k == 0.0) return m;
  return m.then(deck_shift(-static_cast<std::int64_t>(k)));
}

namespace {

SpanningArc lift_at(const std::vector<SpanningArc>& v, std::int64_t i) {
  const auto s = static_cast<std::int64_t>(v.size());
  const std::int64_t k = (i >= 0) ? i / s : -((-i + s - 1) / s);
  const SpanningArc& a = v[static_cast<std::size_t>(i - k * s)];
  return k == 0 ? a : a.translated(static_cast<double>(k));
}

std::vector<SpanningArc> family_level(const LiftMap& f, const SigmaData& sd, std::int64_t L,
                                      std::int64_t K, const SearchBudget& budget,
                                      const Tolerances& tol) {
  const std::int64_t p = sd.p, q = sd.q;
  if (L == 1) {
    const std::int64_t M = K / q + 1;
    const auto terms = base_lift_terms(sd, M);
    const SpanningArc g = push_right_curve(f, terms, budget, tol);
    std::vector<SpanningArc> out;
    for (std::int64_t i = 0; i < q; ++i) {
      const auto a = static_cast<std::size_t>(i);
      out.push_back(image_arc(f, g, sd.sigma[a], tol, static_cast<double>(sd.t[a]),
                              budget.max_curve_points));
    }
    return out;
  }

  const std::int64_t Nn = (K + q - 1) / q;
  const auto alpha = family_level(f, sd, L - 1, 2 * Nn * q, budget, tol);

  auto bundle = [&](const SpanningArc& a) {
    std::vector<SpanningArc> out;
    const auto fwd = image_orbit(f, a, Nn * q, tol, budget.max_curve_points);
    const auto bwd = image_orbit(f, a, -Nn * q, tol, budget.max_curve_points);
    for (std::int64_t k = -Nn; k <= Nn; ++k) {
      const auto idx = static_cast<std::size_t>(std::abs(k) * q);
      const SpanningArc& img = k >= 0 ? fwd[idx] : bwd[idx];
      out.push_back(img.translated(static_cast<double>(-k * p)));
    }
    return out;
  };
  const auto left = bundle(lift_at(alpha, 0));
  const auto right = bundle(lift_at(alpha, 1));
  auto g1 = thread_corridor(left, right, budget.corridor_res, budget.doublings, tol.sep);
  if (!g1) throw Error(ErrorKind::NoCurveFound, "no free corridor between the curve bundles");

  const std::int64_t m = L * q;
  std::vector<std::optional<SpanningArc>> out(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t l = i / L, r = i % L;
    if (r > 1) out[static_cast<std::size_t>(i)] = lift_at(alpha, l * (L - 1) + r - 1);
    else if (r == 0) out[static_cast<std::size_t>(i)] = lift_at(alpha, l * (L - 1));
  }
  out[1] = *g1;
  for (std::int64_t j = 1; j < q; ++j) {
    const std::int64_t i = mod(1 + j * L * p, m);
    const SpanningArc img = image_arc(f, *g1, j, tol, 0.0, budget.max_curve_points);
    const SpanningArc& lo = *out[static_cast<std::size_t>(i - 1)];
    const SpanningArc hi = i + 1 < m ? *out[static_cast<std::size_t>(i + 1)] : out[0]->translated(1.0);
    auto placed = place_between(img, lo, hi, tol.sep);
    if (!placed) throw Error(ErrorKind::NoCurveFound, "image of the threaded curve does not fit");
    out[static_cast<std::size_t>(i)] = std::move(*placed);
  }
  std::vector<SpanningArc> res;
  for (auto& c : out) res.push_back(std::move(*c));
  return res;
}

CurveFamily normalize(CurveFamily fam) {
  const double x0 = fam.curves.front().vertices().front().x;
  const double k = std::floor(x0);
  return k == 0.0 ? fam : fam.translated(-k);
}

}  // namespace

CurveFamily build_curve_family_inductive(const LiftMap& f, std::int64_t p, std::int64_t q,
                                         std::int64_t n, std::int64_t N,
                                         const SearchBudget& budget, const Tolerances& tol) {
  const SigmaData sd = sigma_data(p, q);
  if (n < 1 || N < 1) throw Error(ErrorKind::ParamOutOfRange, "n and N must be positive");
  CurveFamily fam;
  fam.p = p;
  fam.q = q;
  fam.n = n;
  fam.N = N;
  fam.method = "induction";
  fam.curves = family_level(f, sd, n, N, budget, tol);
  fam = normalize(std::move(fam));
  fam.certificate = verify_family(f, fam, tol);
  if (!fam.certificate.passed)
    throw Error(ErrorKind::NoCurveFound, "constructed family failed " +
                                             std::to_string(fam.certificate.failures()) +
                                             " verification facts");
  return fam;
}

CurveFamily build_curve_family(const LiftMap& m, std::int64_t p, std::int64_t q, std::int64_t n,
                               std::int64_t N, const SearchBudget& budget, const Tolerances& tol) {
  sigma_data(p, q);
  if (n < 1 || N < 1) throw Error(ErrorKind::ParamOutOfRange, "n and N must be positive");
  const LiftMap f = normalized_lift(m, p, q, budget);
  static const double offsets[8] = {0.0, 0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875};
  const double step = 1.0 / static_cast<double>(n * q);
  for (double off : offsets) {
    CurveFamily fam = vertical_family(p, q, n, N, off * step);
    fam.certificate = verify_family(f, fam, tol);
    if (fam.certificate.passed) return fam;
  }
  return build_curve_family_inductive(f, p, q, n, N, budget, tol);
}

// ---------------------------------------------------------------------------
// Serialization

void save_family(const std::filesystem::path& dir, const CurveFamily& fam) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j;
  j["p"] = fam.p;
  j["q"] = fam.q;
  j["n"] = fam.n;
  j["N"] = fam.N;
  j["method"] = fam.method;
  std::vector<std::string> files;
  for (std::size_t i = 0; i < fam.curves.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "curve_%03zu.csv", i);
    save_arc_csv(dir / name, fam.curves[i]);
    files.emplace_back(name);
  }
  j["curves"] = files;
  j["certificate"] = {{"passed", fam.certificate.passed},
                      {"facts", fam.certificate.facts.size()},
                      {"failures", fam.certificate.failures()},
                      {"digest", hex64(fam.certificate.digest())}};
  std::ofstream out(dir / "family.json", std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write family.json");
  out << j.dump(2) << '\n';
}

CurveFamily load_family(const std::filesystem::path& dir) {
  std::ifstream in(dir / "family.json", std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read family.json");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("bad family.json: ") + e.what());
  }
  CurveFamily fam;
  fam.p = j.at("p").get<std::int64_t>();
  fam.q = j.at("q").get<std::int64_t>();
  fam.n = j.at("n").get<std::int64_t>();
  fam.N = j.at("N").get<std::int64_t>();
  fam.method = "loaded";
  for (const auto& name : j.at("curves")) fam.curves.push_back(load_arc_csv(dir / name.get<std::string>()));
  return fam;
}

}  // namespace annulus
