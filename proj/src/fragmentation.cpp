#include "annulus/fragmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "annulus/curves.hpp"
#include "annulus/errors.hpp"

namespace annulus {

namespace {

double smoothstep(double z) {
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  return z * z * (3.0 - 2.0 * z);
}

double frac(double x) { return x - std::floor(x); }

// Increasing root of g on [a, b]; g(a) <= 0 <= g(b).
template <class G>
double monotone_root(G g, double a, double b) {
  const double ga = g(a), gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if (ga > 0.0 || gb < 0.0) throw Error(ErrorKind::InverseDiverged, "factor inverse not bracketed");
  std::uintmax_t it = 200;
  const auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb,
                                                   boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (r.first + r.second);
}

}  // namespace

// ---------------------------------------------------------------------------
// Cover

BallCover make_cover(int kx, int kt, double overlap) {
  if (kx < 3 || kt < 2) throw Error(ErrorKind::BadMesh, "need kx >= 3 and kt >= 2");
  if (!(overlap >= 0.0 && overlap < 0.5)) throw Error(ErrorKind::BadMesh, "overlap must lie in (0, 1/2)");
  BallCover c;
  c.kx = kx;
  c.kt = kt;
  c.overlap = overlap;
  c.lebesgue = std::min(overlap / kx, overlap / kt);
  for (int r = 0; r < kt; ++r) {
    for (int a = 0; a < kx; ++a) {
      CoverElement e;
      e.index = r * kx + a;
      e.col = a;
      e.row = r;
      e.box = {(a - overlap) / kx, std::max(0.0, (r - overlap) / kt), (a + 1 + overlap) / kx,
               std::min(1.0, (r + 1 + overlap) / kt)};
      e.half = r == 0 || r == kt - 1;
      c.elements.push_back(e);
    }
  }
  // Every sample, seams included, needs an element containing its
  // lebesgue/2-neighbourhood.
  const double margin = c.lebesgue / 2.0;
  const int sx = 4 * kx, st = 4 * kt;
  for (int i = 0; i < sx; ++i) {
    for (int j = 0; j <= st; ++j) {
      const StripPoint p{static_cast<double>(i) / sx, static_cast<double>(j) / st};
      bool covered = false;
      for (const auto& e : c.elements) {
        double x = p.x;
        while (x < e.box.xmin) x += 1.0;
        const bool in_x = x - e.box.xmin > margin && e.box.xmax - x > margin;
        const bool lo_ok = e.box.tmin == 0.0 ? p.t >= 0.0 : p.t - e.box.tmin > margin;
        const bool hi_ok = e.box.tmax == 1.0 ? p.t <= 1.0 : e.box.tmax - p.t > margin;
        if (in_x && lo_ok && hi_ok && margin > 0.0) {
          covered = true;
          break;
        }
      }
      if (!covered)
        throw Error(ErrorKind::BadMesh, "cover interiors miss the point (" + format_double(p.x) + ", " +
                                            format_double(p.t) + ")");
    }
  }
  return c;
}

bool BallCover::in_interior(int e, StripPoint p) const {
  const Box& b = elements[static_cast<std::size_t>(e)].box;
  double x = p.x - std::floor(p.x - b.xmin);
  const bool in_x = x > b.xmin && x < b.xmax;
  const bool lo = b.tmin == 0.0 ? p.t >= 0.0 : p.t > b.tmin;
  const bool hi = b.tmax == 1.0 ? p.t <= 1.0 : p.t < b.tmax;
  return in_x && lo && hi;
}

namespace {

// Weight of column (or row) `k` of `count` at coordinate u in cell units.
// Ramps of half-width h straddle each seam.
double axis_weight(int k, int count, double u, double h, bool periodic) {
  int c = static_cast<int>(std::floor(u));
  if (periodic) {
    c = ((c % count) + count) % count;
    u = u - std::floor(u) + c;
  } else {
    c = std::clamp(c, 0, count - 1);
  }
  const double w = u - c;
  auto wrap = [&](int i) { return periodic ? ((i % count) + count) % count : i; };
  if (w < h && (periodic || c > 0)) {
    const double r = smoothstep((w + h) / (2.0 * h));
    if (k == c) return r;
    if (k == wrap(c - 1)) return 1.0 - r;
    return 0.0;
  }
  if (w > 1.0 - h && (periodic || c < count - 1)) {
    const double r = smoothstep((w - 1.0 + h) / (2.0 * h));
    if (k == wrap(c + 1)) return r;
    if (k == c) return 1.0 - r;
    return 0.0;
  }
  return k == c ? 1.0 : 0.0;
}

}  // namespace

double BallCover::weight(int e, StripPoint p) const {
  const auto& el = elements[static_cast<std::size_t>(e)];
  const double h = overlap / 2.0;
  const double a = axis_weight(el.col, kx, frac(p.x) * kx, h, true);
  if (a == 0.0) return 0.0;
  return a * axis_weight(el.row, kt, std::clamp(p.t, 0.0, 1.0) * kt, h, false);
}

std::string BallCover::describe() const {
  return "cover kx=" + std::to_string(kx) + " kt=" + std::to_string(kt) +
         " overlap=" + format_double(overlap);
}

int required_split(double displacement, double lebesgue) {
  const double half = lebesgue / 2.0;
  if (!(half > 0.0)) throw Error(ErrorKind::BadMesh, "lebesgue number must be positive");
  double r = displacement / half;
  // Ratios that are whole numbers up to rounding count as whole, so equal
  // displacements reached by different float paths split the same way.
  if (std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r)) r = std::round(r);
  return static_cast<int>(std::floor(r)) + 1;
}

char kind_code(FactorKind k) {
  switch (k) {
    case FactorKind::Horizontal: return 'h';
    case FactorKind::Vertical: return 'v';
    case FactorKind::Twist: return 'd';
  }
  return '?';
}

// ---------------------------------------------------------------------------
// Factors
//
// With Psi_k the sum of the first k+1 partition weights and D the
// displacement of a stage piece, G_k(y) = y + Psi_k(y) D(y) along the
// stage's moving coordinate, and factor k is G_k o G_{k-1}^-1.

struct FactorImpl {
  FactorKind kind = FactorKind::Horizontal;
  std::shared_ptr<const BallCover> cover;
  int element = 0;
  std::string description;

  // Horizontal: displacement d(t).
  PiecewiseLinear d = PiecewiseLinear::constant(0.0);
  // Vertical: piece P_{lam1} o P_{lam0}^-1 of the path P_lam from the
  // identity to the vertical bump (or its inverse).
  VerticalBump bump;
  double lam0 = 0.0, lam1 = 0.0;
  // Twist.
  DiskTwist twist;

  double psi_upto(int k, StripPoint p) const {
    double s = 0.0;
    for (int e = 0; e <= k; ++e) s += cover->weight(e, p);
    return s;
  }

  double bump_c(double x, double lam) const { return lam * bump.eps * bump_profile(bump.w, x); }
  static double phi(double c, double t) { return t + c * t * (1.0 - t); }
  static double phi_inv(double c, double s) {
    if (c == 0.0) return s;
    const double b = 1.0 + c;
    return 2.0 * s / (b + std::sqrt(std::max(0.0, b * b - 4.0 * c * s)));
  }
  double path(double x, double lam, double t) const {
    const double c = bump_c(x, lam);
    return bump.inverted ? phi_inv(c, t) : phi(c, t);
  }
  double path_inv(double x, double lam, double t) const {
    const double c = bump_c(x, lam);
    return bump.inverted ? phi(c, t) : phi_inv(c, t);
  }
  double vdisp(double x, double t) const { return path(x, lam1, path_inv(x, lam0, t)) - t; }

  // G_k(p); k = -1 is the identity.
  StripPoint G(int k, StripPoint p) const {
    if (k < 0) return p;
    if (kind == FactorKind::Horizontal) return {p.x + psi_upto(k, p) * d(p.t), p.t};
    return {p.x, p.t + psi_upto(k, p) * vdisp(p.x, p.t)};
  }
  StripPoint G_inv(int k, StripPoint z) const {
    if (k < 0) return z;
    if (kind == FactorKind::Horizontal) {
      const double dt = d(z.t);
      const double r = std::abs(dt) + 1e-12 + 1e-15 * std::abs(z.x);
      const double x = monotone_root(
          [&](double x) { return x + psi_upto(k, {x, z.t}) * dt - z.x; }, z.x - r, z.x + r);
      return {x, z.t};
    }
    if (z.t <= 0.0 || z.t >= 1.0) return z;
    const double t = monotone_root(
        [&](double t) { return t + psi_upto(k, {z.x, t}) * vdisp(z.x, t) - z.t; }, 0.0, 1.0);
    return {z.x, t};
  }

  StripPoint step(StripPoint z, bool inverted) const {
    if (kind == FactorKind::Twist) {
      const Stage s = twist;
      return inverted ? apply_stage(inverse_stage(s), z) : apply_stage(s, z);
    }
    const int k = element;
    const StripPoint y = inverted ? G_inv(k, z) : G_inv(k - 1, z);
    if (cover->weight(k, y) == 0.0) return z;
    return inverted ? G(k - 1, y) : G(k, y);
  }
};

Factor::Factor(std::shared_ptr<const FactorImpl> impl, bool inverted)
    : impl_(std::move(impl)), inverted_(inverted) {
  description_ = (inverted_ ? "inverse " : "") + impl_->description;
  digest_ = hex64(fnv1a(description_));
}

StripPoint Factor::apply(StripPoint p) const { return impl_->step(p, inverted_); }
int Factor::element() const { return impl_->element; }
FactorKind Factor::kind() const { return impl_->kind; }

// ---------------------------------------------------------------------------
// Certificates

std::size_t FragmentationCertificate::distinct_count() const {
  std::set<std::string> d;
  for (const auto& f : factors) d.insert(f.digest());
  return d.size();
}

StripPoint FragmentationCertificate::apply(StripPoint p) const {
  for (const auto& f : factors) p = f.apply(p);
  return p;
}

std::string FragmentationCertificate::manifest() const {
  std::string out;
  for (const auto& f : factors) {
    out += "idx=" + std::to_string(f.element()) + " stage=" + f.digest() + " kind=" + kind_code(f.kind()) +
           "\n";
  }
  return out;
}

double certificate_residual(const FragmentationCertificate& c, int res) {
  double worst = 0.0;
  for (int j = 0; j <= res; ++j) {
    for (int i = 0; i < res; ++i) {
      const StripPoint p{static_cast<double>(i) / res, static_cast<double>(j) / res};
      worst = std::max(worst, annulus_distance(c.apply(p), c.target.forward(p)));
    }
  }
  return worst;
}

std::vector<std::string> validate_certificate(const FragmentationCertificate& c, const Tolerances& tol,
                                              int support_res) {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& f : c.factors) {
    if (!seen.insert(f.digest()).second) continue;
    const int e = f.element();
    for (int i = 0; i < support_res && problems.size() < 8; ++i) {
      for (int j = 0; j <= support_res; ++j) {
        const StripPoint p{(i + 0.5) / support_res, static_cast<double>(j) / support_res};
        if (c.cover.in_interior(e, p)) continue;
        const StripPoint q = f.apply(p);
        if (q.x != p.x || q.t != p.t) {
          problems.push_back("factor " + f.digest() + " moves a point outside element " + std::to_string(e));
          break;
        }
      }
    }
  }
  if (static_cast<std::int64_t>(c.distinct_count()) > c.C)
    problems.push_back(std::to_string(c.distinct_count()) + " distinct factors exceed C=" + std::to_string(c.C));
  if (!(c.residual <= tol.frag)) problems.push_back("residual " + format_double(c.residual) + " above tolerance");
  return problems;
}

namespace {

void finish(FragmentationCertificate& c, const Tolerances& tol, int res, int support_res) {
  c.for_map = hex64(fnv1a(c.target.description()));
  c.residual = certificate_residual(c, res);
  const auto problems = validate_certificate(c, tol, support_res);
  if (!problems.empty()) throw Error(ErrorKind::HypothesisViolated, "certificate invalid: " + problems.front());
}

PiecewiseLinear horizontal_displacement(const Stage& s) {
  if (const auto* r = std::get_if<Rotation>(&s)) return PiecewiseLinear::constant(r->alpha);
  return std::get<FiberShift>(s).u;
}

PiecewiseLinear add(const PiecewiseLinear& a, const PiecewiseLinear& b) {
  std::vector<double> ts;
  for (const auto& k : a.knots()) ts.push_back(k.first);
  for (const auto& k : b.knots()) ts.push_back(k.first);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<std::pair<double, double>> knots;
  for (double t : ts) knots.push_back({t, a(t) + b(t)});
  return PiecewiseLinear(std::move(knots));
}

std::string describe_pl(const PiecewiseLinear& u) {
  std::string s;
  for (const auto& [t, v] : u.knots()) s += " " + format_double(t) + ":" + format_double(v);
  return s;
}

// Consecutive horizontal stages merged into one displacement, with the
// integer part removed (a deck translation is the identity downstairs).
// Rotations given as p/q are summed exactly in `rp / rq`.
struct Piece {
  bool horizontal = false;
  PiecewiseLinear d = PiecewiseLinear::constant(0.0);
  std::int64_t rp = 0, rq = 1;
  Stage stage;
};

void add_rational(Piece& p, std::int64_t a, std::int64_t b) {
  const std::int64_t g = gcd64(p.rq, b);
  const std::int64_t q = p.rq / g * b;
  std::int64_t n = p.rp * (q / p.rq) + a * (q / b);
  n %= q;  // whole turns are deck translations
  const std::int64_t h = gcd64(n < 0 ? -n : n, q);
  p.rp = n / h;
  p.rq = q / h;
}

std::vector<Piece> normalize(const LiftMap& m) {
  std::vector<Piece> out;
  for (const auto& s : m.stages()) {
    if (is_horizontal(s)) {
      if (out.empty() || !out.back().horizontal) {
        Piece p;
        p.horizontal = true;
        out.push_back(std::move(p));
      }
      const auto* r = std::get_if<Rotation>(&s);
      if (r && r->q > 0) add_rational(out.back(), r->p, r->q);
      else out.back().d = add(out.back().d, horizontal_displacement(s));
    } else {
      Piece p;
      p.stage = s;
      out.push_back(std::move(p));
    }
  }
  for (auto& p : out) {
    if (!p.horizontal) continue;
    // Residue of the rational part in (-1/2, 1/2].
    std::int64_t n = p.rp % p.rq;
    if (2 * n > p.rq) n -= p.rq;
    if (2 * n <= -p.rq) n += p.rq;
    if (n != 0) p.d = add(p.d, PiecewiseLinear::constant(static_cast<double>(n) / static_cast<double>(p.rq)));
    const double k = std::round(0.5 * (p.d.max() + p.d.min()));
    if (k != 0.0) p.d = add(p.d, PiecewiseLinear::constant(-k));
  }
  return out;
}

}  // namespace

FragmentationCertificate fragment(const LiftMap& m, const BallCover& cover, const FragmentOptions& opts,
                                  const Tolerances& tol) {
  FragmentationCertificate c;
  c.cover = cover;
  c.target = m;
  const auto shared = std::make_shared<const BallCover>(cover);
  const int M = static_cast<int>(cover.count());
  const std::string cdesc = cover.describe();

  for (const auto& piece : normalize(m)) {
    if (piece.horizontal) {
      const double D = std::max(std::abs(piece.d.max()), std::abs(piece.d.min()));
      // Rounding residue of a whole number of turns; the residual check
      // still covers it.
      if (D <= 1e-3 * tol.frag) continue;
      const int s = required_split(D, cover.lebesgue);
      if (s > 1 && !opts.auto_split)
        throw DisplacementTooLarge("horizontal displacement " + format_double(D) + " needs " +
                                       std::to_string(s) + " pieces",
                                   s);
      const PiecewiseLinear d = piece.d.scaled(1.0 / s);
      std::vector<std::shared_ptr<const FactorImpl>> row;
      for (int e = 0; e < M; ++e) {
        auto f = std::make_shared<FactorImpl>();
        f->kind = FactorKind::Horizontal;
        f->cover = shared;
        f->element = e;
        f->d = d;
        f->description = "h elem=" + std::to_string(e) + " disp" + describe_pl(d) + " " + cdesc;
        row.push_back(f);
      }
      for (int k = 0; k < s; ++k)
        for (const auto& f : row) c.factors.emplace_back(f, false);
      continue;
    }
    const Stage& st = piece.stage;
    if (const auto* vb = std::get_if<VerticalBump>(&st)) {
      const double e = std::abs(vb->eps);
      if (e == 0.0) continue;
      const int s_disp = required_split(e / 4.0, cover.lebesgue);
      const int s_slope = static_cast<int>(std::floor(4.0 * e / (1.0 - e))) + 1;
      const int s = std::max(s_disp, s_slope);
      if (s > 1 && !opts.auto_split)
        throw DisplacementTooLarge("vertical stage needs " + std::to_string(s) + " pieces", s);
      for (int k = 0; k < s; ++k) {
        for (int el = 0; el < M; ++el) {
          auto f = std::make_shared<FactorImpl>();
          f->kind = FactorKind::Vertical;
          f->cover = shared;
          f->element = el;
          f->bump = *vb;
          f->lam0 = static_cast<double>(k) / s;
          f->lam1 = static_cast<double>(k + 1) / s;
          f->description = "v elem=" + std::to_string(el) + " " + describe_stage(st) + " piece=" +
                           std::to_string(k) + "/" + std::to_string(s) + " " + cdesc;
          c.factors.emplace_back(std::shared_ptr<const FactorImpl>(f), false);
        }
      }
      continue;
    }
    if (const auto* tw = std::get_if<DiskTwist>(&st)) {
      if (tw->turns == 0.0) continue;
      int host = -1;
      for (const auto& el : cover.elements) {
        const double r = tw->radius;
        const StripPoint ctr = tw->center;
        const double x = ctr.x - std::floor(ctr.x - el.box.xmin);
        const bool in_x = x - r > el.box.xmin && x + r < el.box.xmax;
        const bool in_t = (el.box.tmin == 0.0 || ctr.t - r > el.box.tmin) &&
                          (el.box.tmax == 1.0 || ctr.t + r < el.box.tmax);
        if (in_x && in_t) {
          host = el.index;
          break;
        }
      }
      if (host < 0) throw Error(ErrorKind::NotTriangular, "twist disk fits in no cover element");
      auto f = std::make_shared<FactorImpl>();
      f->kind = FactorKind::Twist;
      f->cover = shared;
      f->element = host;
      f->twist = *tw;
      f->description = "d elem=" + std::to_string(host) + " " + describe_stage(st);
      c.factors.emplace_back(std::shared_ptr<const FactorImpl>(f), false);
      continue;
    }
    throw Error(ErrorKind::NotTriangular, "stage '" + describe_stage(st) + "' is not triangular");
  }

  const auto distinct = static_cast<std::int64_t>(c.distinct_count());
  if (opts.C > 0) {
    if (distinct > opts.C)
      throw Error(ErrorKind::CTooSmall, std::to_string(distinct) + " distinct factors exceed C=" +
                                            std::to_string(opts.C));
    c.C = opts.C;
  } else {
    c.C = std::max<std::int64_t>(5 * static_cast<std::int64_t>(cover.count()), distinct);
  }
  finish(c, tol, opts.residual_res, opts.support_res);
  return c;
}

FragmentationCertificate compose_certificates(const FragmentationCertificate& outer,
                                              const FragmentationCertificate& inner, const Tolerances& tol,
                                              int residual_res) {
  if (!(outer.cover == inner.cover)) throw Error(ErrorKind::CoverMismatch, "certificates use different covers");
  FragmentationCertificate c;
  c.cover = outer.cover;
  c.factors = inner.factors;
  c.factors.insert(c.factors.end(), outer.factors.begin(), outer.factors.end());
  c.C = outer.C + inner.C;
  c.target = inner.target.then(outer.target);
  finish(c, tol, residual_res, 0);
  return c;
}

FragmentationCertificate power_certificate(const FragmentationCertificate& c, std::int64_t p,
                                           const Tolerances& tol, int residual_res) {
  if (p < 1) throw Error(ErrorKind::ParamOutOfRange, "power must be at least 1");
  FragmentationCertificate out;
  out.cover = c.cover;
  out.C = c.C;
  std::vector<LiftMap> maps(static_cast<std::size_t>(p), c.target);
  out.target = compose(maps);
  for (std::int64_t k = 0; k < p; ++k) out.factors.insert(out.factors.end(), c.factors.begin(), c.factors.end());
  finish(out, tol, residual_res, 0);
  return out;
}

FragmentationCertificate inverse_certificate(const FragmentationCertificate& c, const Tolerances& tol,
                                             int residual_res) {
  FragmentationCertificate out;
  out.cover = c.cover;
  out.C = c.C;
  out.target = c.target.inverted();
  for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it) out.factors.push_back(it->inverse());
  finish(out, tol, residual_res, 0);
  return out;
}

double reencode_factor(double C) { return 14.0 * std::log(C) + 14.0; }

std::int64_t reencode_bound(std::int64_t length, std::int64_t C, std::int64_t N_U) {
  if (N_U < 1) throw Error(ErrorKind::ParamOutOfRange, "cover must be non-empty");
  if (C < 5 * N_U)
    throw Error(ErrorKind::CTooSmall, "C=" + std::to_string(C) + " is below 5 N(U)=" + std::to_string(5 * N_U));
  if (length < 0) throw Error(ErrorKind::ParamOutOfRange, "negative length");
  return static_cast<std::int64_t>(std::ceil(reencode_factor(static_cast<double>(C)))) * length;
}

// ---------------------------------------------------------------------------
// Series

std::string CertificateSeries::csv() const {
  std::string out = "n,length,avg\n";
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const auto n = static_cast<std::int64_t>(i + 1);
    out += std::to_string(n) + "," + std::to_string(lengths[i]) + "," +
           format_double(static_cast<double>(lengths[i]) / static_cast<double>(n)) + "\n";
  }
  return out;
}

void check_euclid(CertificateSeries& s) {
  s.euclid_checked = 0;
  s.euclid_violations = 0;
  const auto len = [&](std::int64_t n) { return n == 0 ? 0 : s.lengths[static_cast<std::size_t>(n - 1)]; };
  for (std::int64_t k = 1; k <= s.n_max; ++k) {
    for (std::int64_t q = 1; q * k <= s.n_max; ++q) {
      for (std::int64_t r = 0; r < k && q * k + r <= s.n_max; ++r) {
        ++s.euclid_checked;
        if (len(q * k + r) > q * len(k) + len(r)) ++s.euclid_violations;
      }
    }
  }
}

CertificateSeries series_estimates(const LiftMap& m, const BallCover& cover, std::int64_t C, std::int64_t n_max,
                                   const Tolerances& tol) {
  if (n_max < 1) throw Error(ErrorKind::ParamOutOfRange, "n_max must be positive");
  CertificateSeries s;
  s.n_max = n_max;
  FragmentOptions opts;
  opts.C = C;
  opts.residual_res = 6;
  opts.support_res = 8;
  std::vector<LiftMap> maps;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    maps.push_back(m);
    const auto cert = fragment(compose(maps), cover, opts, tol);
    s.lengths.push_back(static_cast<std::int64_t>(cert.length()));
  }
  s.slope = static_cast<double>(s.lengths.front());
  s.g_lo = std::numeric_limits<double>::infinity();
  s.G_hi = 0.0;
  for (std::int64_t n = std::max<std::int64_t>(1, n_max / 2); n <= n_max; ++n) {
    const double avg = static_cast<double>(s.lengths[static_cast<std::size_t>(n - 1)]) / static_cast<double>(n);
    s.g_lo = std::min(s.g_lo, avg);
    s.G_hi = std::max(s.G_hi, avg);
  }
  check_euclid(s);
  return s;
}

std::string TransferReport::text() const {
  std::ostringstream out;
  out << "n=" << n << " len_h=" << len_h << " len_conj=" << len_conj << " len_witness=" << len_witness << '\n'
      << "C_witness=" << C_witness << " C_claimed=" << C_claimed << " distinct=" << distinct << '\n'
      << "residual=" << format_double(residual) << " holds=" << (holds ? "yes" : "no") << '\n';
  return out.str();
}

TransferReport conjugacy_transfer(const FragmentationCertificate& h_cert, const FragmentationCertificate& conj_cert,
                                  const LiftMap& f, std::int64_t n, const Tolerances& tol) {
  if (!(h_cert.cover == conj_cert.cover)) throw Error(ErrorKind::CoverMismatch, "certificates use different covers");
  TransferReport rep;
  rep.n = n;
  rep.len_h = h_cert.length();
  rep.len_conj = conj_cert.length();
  const auto h_inv = inverse_certificate(h_cert, tol);
  FragmentationCertificate w;
  w.cover = h_cert.cover;
  w.factors = h_cert.factors;
  w.factors.insert(w.factors.end(), conj_cert.factors.begin(), conj_cert.factors.end());
  w.factors.insert(w.factors.end(), h_inv.factors.begin(), h_inv.factors.end());
  std::vector<LiftMap> maps(static_cast<std::size_t>(n), f);
  w.target = compose(maps);
  w.C = conj_cert.C + h_cert.C;
  rep.len_witness = w.length();
  rep.C_witness = w.C;
  rep.C_claimed = 10 * static_cast<std::int64_t>(h_cert.cover.count());
  rep.distinct = w.distinct_count();
  rep.residual = certificate_residual(w, 8);
  rep.holds = rep.len_witness == rep.len_conj + 2 * rep.len_h && rep.residual <= tol.frag &&
              static_cast<std::int64_t>(rep.distinct) <= rep.C_witness && rep.C_witness <= rep.C_claimed;
  return rep;
}

}  // namespace annulus
