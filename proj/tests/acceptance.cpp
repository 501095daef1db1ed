// Acceptance run: one PASS/FAIL line per criterion. Every criterion writes
// its artifacts into its own directory so the determinism check can rerun
// it and compare hashes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "annulus/cli.hpp"
#include "annulus/curves.hpp"
#include "annulus/fragmentation.hpp"
#include "annulus/rotation.hpp"
#include "annulus/words.hpp"
#include "oracles.hpp"

using namespace annulus;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome(const fs::path&)> body;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// CSV rows as string fields, header dropped.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    out.push_back(f);
  }
  return out;
}

double num(const std::string& s) { return std::stod(s); }

// Value of `key=` in a report.
std::string field(const std::string& report, const std::string& key) {
  const auto pos = report.find(key + "=");
  if (pos == std::string::npos) return "";
  const auto start = pos + key.size() + 1;
  return report.substr(start, report.find_first_of(" \n", start) - start);
}

int cli(const fs::path& dir, const std::string& spec, RunConfig cfg) {
  cfg.map_text = spec;
  cfg.out = dir.string();
  std::ostringstream out, err;
  return run(cfg, out, err);
}

RunConfig cmd(const std::string& c, std::vector<std::int64_t> n = {}) {
  RunConfig cfg;
  cfg.command = c;
  cfg.n = std::move(n);
  return cfg;
}

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

const char* kShear = "fibershift pl 0:0 1:0.5";
const char* kBump = "bumppr 0/1 center=(0.5,0.5) r=0.05 s=0.3";

Outcome rotation_exactness(const fs::path& dir) {
  const int c1 = cli(dir / "rigid", "rotate 2/5", cmd("rotation", {1000}));
  const int c2 = cli(dir / "shear", kShear, cmd("rotation", {1000}));
  const auto r = rows(dir / "rigid" / "rotation.csv").back();
  const auto s = rows(dir / "shear" / "rotation.csv").back();
  const double lo = num(r[1]), hi = num(r[2]), slo = num(s[1]), shi = num(s[2]);
  Outcome o;
  o.pass = c1 == 0 && c2 == 2 && std::abs(lo - 0.4) <= 1e-12 && std::abs(hi - 0.4) <= 1e-12 &&
           std::abs(slo) <= 1e-3 && std::abs(shi - 0.5) <= 1e-3;
  o.detail = "rigid [" + r[1] + ", " + r[2] + "], shear [" + s[1] + ", " + s[2] + "]";
  return o;
}

Outcome nonspreading(const fs::path& dir) {
  cli(dir / "rigid", "rotate 2/5", cmd("nonspread", {1, 10, 100}));
  cli(dir / "shear", kShear, cmd("nonspread", {1000}));
  double worst = 0.0;
  for (const auto& r : rows(dir / "rigid" / "nonspread.csv"))
    worst = std::max(worst, std::abs(num(r[1]) - std::sqrt(2.0) / num(r[0])));
  const double sd = num(rows(dir / "shear" / "nonspread.csv").back()[1]);
  Outcome o;
  o.pass = worst <= 1e-12 && sd >= 0.49 && sd <= 0.51 && rows(dir / "rigid" / "nonspread.csv").size() == 3;
  o.detail = "max |defect - sqrt2/n| = " + fmt(worst) + ", shear defect(1000) = " + fmt(sd);
  return o;
}

Outcome curve_recovery(const fs::path& dir) {
  auto cfg = cmd("curves", {2});
  cfg.p = 1;
  cfg.q = 3;
  cfg.N = 3;
  const int code = cli(dir, "rotate 1/3", cfg);
  const auto fam = load_family(dir / "curves");
  const auto rep = verify_family(rational_rotation(1, 3), fam, Tolerances{});
  double dev = 0.0;
  const double shift = std::floor(fam.curves.front().vertices().front().x + 1e-6);
  for (std::int64_t i = 0; i < fam.size(); ++i)
    for (const auto& v : fam.curves[i].vertices()) dev = std::max(dev, std::abs(v.x - shift - i / 6.0));
  Outcome o;
  o.pass = code == 0 && fam.size() == 6 && dev <= 1e-3 && rep.passed && rep.failures() == 0;
  o.detail = "6 curves, max deviation " + fmt(dev) + ", " + std::to_string(rep.facts.size()) +
             " facts verified, failures " + std::to_string(rep.failures());
  return o;
}

Outcome betweenness_oracle(const fs::path& dir) {
  std::mt19937_64 rng(20241016);
  std::uniform_real_distribution<double> off(-2.0, 2.0);
  std::string csv = "a1,a2,a3,library,bruteforce\n";
  int agree = 0, holds = 0;
  for (int k = 0; k < 200; ++k) {
    const auto shape = k % 4 == 0 ? std::vector<double>{0.0, 0.0}
                                  : oracle::random_shape(rng, 2 + std::size_t(rng() % 8), 0.45);
    const double a[3] = {off(rng), off(rng), off(rng)};
    const auto g1 = oracle::wiggle(a[0], shape), g2 = oracle::wiggle(a[1], shape),
               g3 = oracle::wiggle(a[2], shape);
    const SpanningArc* all[] = {&g1, &g2, &g3};
    const bool lib = annulus_strictly_between(g1, g2, g3);
    const bool brute = oracle::between_bruteforce(g1, g2, g3, lift_window(all) + 2);
    agree += lib == brute;
    holds += lib;
    csv += format_double(a[0]) + "," + format_double(a[1]) + "," + format_double(a[2]) + "," +
           (lib ? "1" : "0") + "," + (brute ? "1" : "0") + "\n";
  }
  write(dir / "betweenness.csv", csv);
  Outcome o;
  o.pass = agree == 200;
  o.detail = std::to_string(agree) + "/200 agree (" + std::to_string(holds) + " between)";
  return o;
}

Outcome conjugation_bound(const fs::path& dir) {
  double bound[2] = {0, 0};
  std::string detail;
  bool ok = true;
  int idx = 0;
  for (std::int64_t N : {4, 8}) {
    auto cfg = cmd("conjugate");
    cfg.N = N;
    cfg.Nprime = N;
    const fs::path d = dir / ("N" + std::to_string(N));
    const int code = cli(d, kBump, cfg);
    if (!fs::exists(d / "conjugate.csv")) {
      ok = false;
      detail += "(" + std::to_string(N) + "," + std::to_string(N) + ") no result; ";
      continue;
    }
    const auto r = rows(d / "conjugate.csv").front();
    const double achieved = num(r[2]), b = num(r[3]), mesh = num(r[4]);
    bound[idx++] = b;
    ok = ok && code == 0 && achieved <= b + 2.0 * mesh;
    detail += "(" + std::to_string(N) + "," + std::to_string(N) + ") achieved " + fmt(achieved) +
              " bound " + fmt(b) + "; ";
  }
  Outcome o;
  o.pass = ok && idx == 2 && bound[1] < bound[0];
  o.detail = detail + "bound shrinks: " + (bound[1] < bound[0] ? "yes" : "no");
  return o;
}

Outcome identity_limit(const fs::path& dir) {
  auto cfg = cmd("conjugate");
  cfg.p = 1;
  cfg.q = 3;
  cfg.N = 4;
  cfg.Nprime = 3;
  const int code = cli(dir, "rotate 1/3", cfg);
  const double achieved = num(rows(dir / "conjugate.csv").front()[2]);
  Outcome o;
  o.pass = code == 0 && achieved <= 1e-9;
  o.detail = "achieved distance " + fmt(achieved);
  return o;
}

Outcome certificate_calculus(const fs::path& dir) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.04, 0.04), e(-0.3, 0.3);
  const auto cover = make_cover(3, 2, 0.25);
  auto random_map = [&]() {
    const auto shear = fiber_shift(PiecewiseLinear({{0.0, u(rng)}, {0.5, u(rng)}, {1.0, u(rng)}}));
    switch (rng() % 3) {
      case 0: return shear;
      case 1: return vertical_bump(e(rng));
      default: return shear.then(vertical_bump(e(rng)));
    }
  };
  FragmentOptions opts;
  opts.residual_res = 3;
  opts.support_res = 3;
  int ok = 0;
  std::string csv = "pair,len_a,len_b,len_ab,C_a,C_b,C_ab,p,len_ap\n";
  for (int k = 0; k < 1000; ++k) {
    const auto a = fragment(random_map(), cover, opts), b = fragment(random_map(), cover, opts);
    const auto ab = compose_certificates(a, b, Tolerances{}, 3);
    const std::int64_t p = 1 + std::int64_t(rng() % 5);
    const auto ap = power_certificate(a, p, Tolerances{}, 3);
    const bool fact1 = ab.length() == a.length() + b.length() && ab.C == a.C + b.C &&
                       ab.distinct_count() <= a.distinct_count() + b.distinct_count();
    const bool fact2 = ap.length() == std::size_t(p) * a.length() && ap.C == a.C &&
                       ap.distinct_count() == a.distinct_count();
    ok += fact1 && fact2;
    csv += std::to_string(k) + "," + std::to_string(a.length()) + "," + std::to_string(b.length()) + "," +
           std::to_string(ab.length()) + "," + std::to_string(a.C) + "," + std::to_string(b.C) + "," +
           std::to_string(ab.C) + "," + std::to_string(p) + "," + std::to_string(ap.length()) + "\n";
  }
  write(dir / "certificates.csv", csv);
  cli(dir / "series", "rotate 2/5", cmd("distortion", {64}));
  const auto rep = slurp(dir / "series" / "report.txt");
  const std::string checked = field(rep, "euclid_checked"), bad = field(rep, "euclid_violations");
  Outcome o;
  o.pass = ok == 1000 && !checked.empty() && std::stol(checked) > 0 && bad == "0";
  o.detail = std::to_string(ok) + "/1000 pairs exact, euclid pairs " + checked + " violations " + bad;
  return o;
}

Outcome distortion_criterion(const fs::path& dir) {
  cli(dir / "rotation", "rotate 2/5", cmd("nonspread", {1000}));
  const double dld = num(rows(dir / "rotation" / "nonspread.csv").back()[2]);
  cli(dir / "series", "rotate 2/5", cmd("distortion", {64}));
  const auto rep = slurp(dir / "series" / "report.txt");
  const double G = num(field(rep, "G_hi")), slope = num(field(rep, "slope"));
  Outcome o;
  o.pass = dld < 0.01 && std::isfinite(G) && G <= slope;
  o.detail = "delta log delta / n at 1000 = " + fmt(dld) + ", G_hi " + fmt(G) + " <= slope " + fmt(slope);
  return o;
}

Outcome svarc(const fs::path& dir) {
  const auto rep = svarc_milnor_check(rigid_rotation(0.4), 20);
  write(dir / "svarc.csv", rep.csv());
  bool dist_ok = rep.rows.size() == 20;
  // Independent: the gap between [0,1]^2 and [k,k+1]^2 along x.
  for (const auto& r : rep.rows) dist_ok = dist_ok && r.deck_distance == double(std::abs(r.k) - 1);
  Outcome o;
  o.pass = dist_ok && rep.exact && rep.C == 1.0 && rep.Cprime == 1.0;
  o.detail = "C = " + fmt(rep.C) + ", C' = " + fmt(rep.Cprime) + ", exact fit " + (rep.exact ? "yes" : "no");
  return o;
}

std::map<std::string, std::uint64_t> hashes(const fs::path& dir) {
  std::map<std::string, std::uint64_t> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = fnv1a(slurp(e.path()));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path base = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "annulus_acceptance";
  fs::remove_all(base);
  const std::vector<Criterion> criteria = {
      {1, "rotation exactness", 1.0, rotation_exactness},
      {2, "non-spreading dichotomy", 1.0, nonspreading},
      {3, "curve-family recovery", 10.0, curve_recovery},
      {4, "betweenness oracle equivalence", 5.0, betweenness_oracle},
      {5, "conjugation bound", 120.0, conjugation_bound},
      {6, "identity limit", 0.0, identity_limit},
      {7, "certificate calculus", 30.0, certificate_calculus},
      {8, "distortion criterion", 30.0, distortion_criterion},
      {9, "Svarc-Milnor specialization", 1.0, svarc},
  };
  int failures = 0;
  auto report = [&](int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %d %s: %s: %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += !pass;
  };
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body(base / ("c" + std::to_string(c.id)));
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s <= 0.0 || s < c.limit_s;
    std::string detail = o.detail + " (" + fmt(s) + " s";
    detail += c.limit_s > 0.0 ? ", limit " + fmt(c.limit_s) + " s)" : ")";
    report(c.id, c.name, o.pass && in_time, detail);
  }

  // 10: rerun every criterion into a fresh directory and compare artifacts.
  std::size_t files = 0, differing = 0;
  for (const auto& c : criteria) {
    const fs::path a = base / ("c" + std::to_string(c.id)), b = base / ("c" + std::to_string(c.id) + "-rerun");
    try {
      c.body(b);
    } catch (const std::exception&) {
    }
    const auto ha = hashes(a), hb = hashes(b);
    files += ha.size();
    if (ha != hb) {
      for (const auto& [k, v] : ha) differing += !hb.count(k) || hb.at(k) != v;
      differing += hb.size() > ha.size() ? hb.size() - ha.size() : 0;
    }
  }
  report(10, "determinism", files > 0 && differing == 0,
         std::to_string(files) + " artifacts rehashed, " + std::to_string(differing) + " differ");
  return failures == 0 ? 0 : 1;
}
