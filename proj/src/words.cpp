#include "annulus/words.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "annulus/errors.hpp"
#include "annulus/rotation.hpp"

namespace annulus {

GroupWord GroupWord::reduced() const {
  GroupWord out;
  for (int l : letters) {
    if (l == 0) throw Error(ErrorKind::ParamOutOfRange, "letter 0 is not a generator");
    if (!out.letters.empty() && out.letters.back() == -l) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(l);
    }
  }
  return out;
}

std::string GroupWord::text() const {
  if (letters.empty()) return "1";
  bool single = std::all_of(letters.begin(), letters.end(), [](int l) { return std::abs(l) == 1; });
  std::string out;
  for (int l : letters) {
    out += single ? std::string("T") : "g" + std::to_string(std::abs(l));
    if (l < 0) out += "^-1";
  }
  return out;
}

GroupWord GroupWord::power(int generator, std::int64_t n) {
  GroupWord w;
  const int l = n < 0 ? -generator : generator;
  for (std::int64_t i = 0; i < std::abs(n); ++i) w.letters.push_back(l);
  return w;
}

std::size_t word_length(const GroupWord& w) { return w.reduced().letters.size(); }

namespace {

// Distance between the unit square and its translate by k: the two
// boundaries are compared segment by segment.
double square_distance(std::int64_t k) {
  const StripPoint a[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const double dk = static_cast<double>(k);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const StripPoint b0{a[j].x + dk, a[j].t}, b1{a[(j + 1) % 4].x + dk, a[(j + 1) % 4].t};
      best = std::min(best, segment_distance(a[i], a[(i + 1) % 4], b0, b1));
    }
  }
  return best;
}

}  // namespace

bool SvarcReport::passed() const {
  return exact && std::all_of(rows.begin(), rows.end(), [](const SvarcRow& r) { return r.holds; });
}

std::string SvarcReport::csv() const {
  std::string out = "k,deck_distance,reach,image_diameter,holds\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + format_double(r.deck_distance) + "," + std::to_string(r.reach) + "," +
           format_double(r.image_diameter) + "," + (r.holds ? "1" : "0") + "\n";
  }
  return out;
}

SvarcReport svarc_milnor_check(const LiftMap& m, std::int64_t k_max, int per_side) {
  if (k_max < 2) throw Error(ErrorKind::ParamOutOfRange, "need at least two translates to fit");
  SvarcReport rep;
  std::vector<std::pair<std::int64_t, double>> pts;
  for (std::int64_t k = -k_max; k <= k_max; ++k)
    if (k != 0) pts.push_back({k, square_distance(k)});
  // Slope from the extreme translates, offset from the worst point.
  const double d1 = square_distance(1), dk = square_distance(k_max);
  rep.C = (dk - d1) / static_cast<double>(k_max - 1);
  rep.Cprime = 0.0;
  for (const auto& [k, d] : pts) rep.Cprime = std::max(rep.Cprime, rep.C * std::abs(static_cast<double>(k)) - d);
  rep.exact = std::all_of(pts.begin(), pts.end(), [&](const auto& kd) {
    return kd.second == rep.C * std::abs(static_cast<double>(kd.first)) - rep.Cprime;
  });

  const auto boundary = square_boundary(per_side);
  std::vector<StripPoint> img = boundary;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    for (auto& p : img) p = m.forward(p);
    SvarcRow row;
    row.k = k;
    row.deck_distance = square_distance(k);
    row.image_diameter = diameter(img);
    // f^k(D) meets T^lo D and T^hi D, so its diameter is at least
    // d(D, T^(hi-lo) D).
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& p : img) {
      const auto j = static_cast<std::int64_t>(std::floor(p.x));
      lo = std::min(lo, j);
      hi = std::max(hi, j);
    }
    row.reach = hi - lo;
    row.holds = row.image_diameter >= rep.C * static_cast<double>(row.reach) - rep.Cprime;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace annulus
