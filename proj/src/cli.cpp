#include "annulus/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "annulus/conjugation.hpp"
#include "annulus/errors.hpp"
#include "annulus/fragmentation.hpp"
#include "annulus/map_spec.hpp"
#include "annulus/rotation.hpp"
#include "annulus/svg.hpp"
#include "annulus/words.hpp"

namespace annulus {

namespace fs = std::filesystem;

std::pair<std::int64_t, std::int64_t> parse_pq(const std::string& s) {
  const auto slash = s.find('/');
  std::int64_t p = 0, q = 0;
  auto parse = [](std::string_view v, std::int64_t& out) {
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    return r.ec == std::errc() && r.ptr == v.data() + v.size() && !v.empty();
  };
  if (slash == std::string::npos || !parse(std::string_view(s).substr(0, slash), p) ||
      !parse(std::string_view(s).substr(slash + 1), q))
    throw Error(ErrorKind::BadAngle, "expected P/Q, got '" + s + "'");
  if (q <= 0) throw Error(ErrorKind::BadAngle, "denominator must be positive");
  return {p, q};
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.filename().string());
  out << text;
}

LiftMap load_map(const RunConfig& cfg) {
  if (!cfg.map_text.empty()) return parse_map_spec(cfg.map_text);
  if (cfg.map_path.empty()) throw Error(ErrorKind::Io, "no map given (use --map FILE)");
  return load_map_spec(cfg.map_path);
}

std::vector<std::int64_t> ns_or(const RunConfig& cfg, std::vector<std::int64_t> def) {
  auto ns = cfg.n.empty() ? std::move(def) : cfg.n;
  for (auto v : ns)
    if (v < 1) throw Error(ErrorKind::ParamOutOfRange, "n must be positive");
  return ns;
}

std::string header(const RunConfig& cfg, const LiftMap& m) {
  std::string out = "command: " + cfg.command + "\nmap:\n";
  std::istringstream lines(m.description());
  for (std::string l; std::getline(lines, l);) out += "  " + l + "\n";
  return out;
}

bool verified_failure(ErrorKind k) {
  return k == ErrorKind::NotPseudoRotation || k == ErrorKind::NoCurveFound || k == ErrorKind::NoLoopsFound ||
         k == ErrorKind::HypothesisViolated;
}

std::vector<Polyline> family_lines(const CurveFamily& fam) {
  std::vector<Polyline> lines;
  for (const auto& c : fam.curves) lines.push_back({c.vertices(), "#1f77b4", 1.0});
  return lines;
}

Box family_view(const CurveFamily& fam) {
  double x0 = 0.0;
  if (!fam.curves.empty()) x0 = fam.curves.front().bounds().xmin;
  double x1 = x0 + 1.0;
  for (const auto& c : fam.curves) x1 = std::max(x1, c.bounds().xmax);
  return {x0 - 0.05, 0.0, x1 + 0.05, 1.0};
}

int cmd_rotation(const RunConfig& cfg, const LiftMap& m, const fs::path& dir) {
  const auto ns = ns_or(cfg, {10, 100, 1000});
  std::string csv = "n,lo,hi,defect,dld\n";
  PlotSeries lo{"lo", {}, {}}, hi{"hi", {}, {}};
  RotationEstimate last;
  for (auto n : ns) {
    last = rotation_interval(m, n, cfg.samples, cfg.tol_rot);
    const double defect = nonspreading_defect(m, n);
    const double dld = delta_log_delta(m, n);
    csv += std::to_string(n) + "," + format_double(last.lo) + "," + format_double(last.hi) + "," +
           format_double(defect) + "," + format_double(dld) + "\n";
    lo.x.push_back(static_cast<double>(n));
    lo.y.push_back(last.lo);
    hi.x.push_back(static_cast<double>(n));
    hi.y.push_back(last.hi);
  }
  write_file(dir / "rotation.csv", csv);
  write_file(dir / "rotation.svg", svg_plot("rotation interval", "n", "displacement / n", {lo, hi}, true));
  std::string rep = header(cfg, m) + csv;
  const bool ok = last.converged;
  rep += ok ? "verdict=pass pseudo-rotation angle=" + format_double(last.mid()) + "\n"
            : "verdict=FAIL interval width " + format_double(last.width()) + " at n=" + std::to_string(last.n) +
                  " exceeds " + format_double(cfg.tol_rot) + "\n";
  write_file(dir / "report.txt", rep);
  return ok ? 0 : 2;
}

int cmd_nonspread(const RunConfig& cfg, const LiftMap& m, const fs::path& dir) {
  const auto ns = ns_or(cfg, {1, 10, 100, 1000});
  std::string csv = "n,defect,dld\n";
  PlotSeries def{"defect", {}, {}}, dld{"delta log delta / n", {}, {}};
  for (auto n : ns) {
    const double d = nonspreading_defect(m, n);
    const double l = delta_log_delta(m, n);
    csv += std::to_string(n) + "," + format_double(d) + "," + format_double(l) + "\n";
    def.x.push_back(static_cast<double>(n));
    def.y.push_back(d);
    dld.x.push_back(static_cast<double>(n));
    dld.y.push_back(l);
  }
  write_file(dir / "nonspread.csv", csv);
  write_file(dir / "nonspread.svg", svg_plot("spreading of the unit square", "n", "value", {def, dld}, true));
  write_file(dir / "report.txt", header(cfg, m) + csv);
  return 0;
}

int cmd_curves(const RunConfig& cfg, const LiftMap& m, const fs::path& dir) {
  const std::int64_t n = ns_or(cfg, {1}).front();
  std::string rep = header(cfg, m);
  rep += "p/q=" + std::to_string(cfg.p) + "/" + std::to_string(cfg.q) + " n=" + std::to_string(n) +
         " N=" + std::to_string(cfg.N) + "\n";
  CurveFamily fam;
  int code = 0;
  try {
    fam = build_curve_family(m, cfg.p, cfg.q, n, cfg.N, cfg.budget, cfg.tol);
  } catch (const Error& e) {
    if (!verified_failure(e.kind())) throw;
    rep += "construction failed: " + std::string(e.what()) + "\n";
    rep += "checking the vertical candidate family against the given lift\n";
    fam = vertical_family(cfg.p, cfg.q, n, cfg.N);
    fam.method = "vertical-fallback";
    fam.certificate = verify_family(m, fam, cfg.tol);
    code = 2;
  }
  if (!fam.certificate.passed) code = 2;
  save_family(dir / "curves", fam);
  write_file(dir / "curves.svg", svg_strip("curve family (" + fam.method + ")", family_lines(fam), family_view(fam)));
  rep += "method=" + fam.method + "\n" + fam.certificate.text();
  rep += std::string("verdict=") + (code == 0 ? "pass" : "FAIL") + "\n";
  write_file(dir / "report.txt", rep);
  return code;
}

int cmd_conjugate(const RunConfig& cfg, const LiftMap& m, const fs::path& dir) {
  std::string rep = header(cfg, m);
  ConjugationReport cr;
  try {
    cr = run_conjugation(m, cfg.p, cfg.q, cfg.N, cfg.Nprime, cfg.budget, cfg.tol, cfg.samples);
  } catch (const Error& e) {
    if (!verified_failure(e.kind()) && e.kind() != ErrorKind::IntersectionCountWrong &&
        e.kind() != ErrorKind::NotInjective)
      throw;
    write_file(dir / "report.txt", rep + "verdict=FAIL " + e.what() + "\n");
    return 2;
  }
  const std::string csv = "N,Nprime,achieved,bound,mesh,passed\n" + std::to_string(cr.N) + "," +
                          std::to_string(cr.Nprime) + "," + format_double(cr.achieved) + "," +
                          format_double(cr.bound) + "," + format_double(cr.mesh) + "," +
                          (cr.passed() ? "1" : "0") + "\n";
  write_file(dir / "conjugate.csv", csv);
  save_family(dir / "curves", cr.family);
  const Box view = family_view(cr.family);
  std::string loops = "j,x,t\n";
  auto lines = family_lines(cr.family);
  for (std::size_t j = 0; j < cr.loops.loops.size(); ++j) {
    const auto pts = cr.loops.loops[j].polyline(view.xmin, view.xmax);
    for (const auto& p : pts) loops += std::to_string(j) + "," + format_double(p.x) + "," + format_double(p.t) + "\n";
    lines.push_back({pts, "#d62728", 1.0});
  }
  write_file(dir / "loops.csv", loops);
  write_file(dir / "grid.svg", svg_strip("curves and loops", lines, view));
  write_file(dir / "report.txt", rep + cr.text());
  return cr.passed() ? 0 : 2;
}

int cmd_fragment(const RunConfig& cfg, const LiftMap& m, const fs::path& dir) {
  const std::int64_t n = ns_or(cfg, {1}).front();
  const BallCover cover = make_cover(cfg.kx, cfg.kt, cfg.overlap);
  std::vector<LiftMap> maps(static_cast<std::size_t>(n), m);
  FragmentOptions opts;
  opts.auto_split = cfg.auto_split;
  opts.C = cfg.C;
  const auto cert = fragment(compose(maps), cover, opts, cfg.tol);
  write_file(dir / "manifest.txt", cert.manifest());
  std::string csv = "idx,stage,kind\n";
  std::vector<int> per(cover.count(), 0);
  for (const auto& f : cert.factors) {
    csv += std::to_string(f.element()) + "," + f.digest() + "," + kind_code(f.kind()) + "\n";
    ++per[static_cast<std::size_t>(f.element())];
  }
  write_file(dir / "fragment.csv", csv);
  std::string cover_csv = "idx,xmin,tmin,xmax,tmax,factors\n";
  std::vector<Polyline> boxes;
  for (const auto& e : cover.elements) {
    const Box& b = e.box;
    cover_csv += std::to_string(e.index) + "," + format_double(b.xmin) + "," + format_double(b.tmin) + "," +
                 format_double(b.xmax) + "," + format_double(b.tmax) + "," +
                 std::to_string(per[static_cast<std::size_t>(e.index)]) + "\n";
    boxes.push_back({{{b.xmin, b.tmin}, {b.xmax, b.tmin}, {b.xmax, b.tmax}, {b.xmin, b.tmax}, {b.xmin, b.tmin}},
                     per[static_cast<std::size_t>(e.index)] > 0 ? "#d62728" : "#888888",
                     per[static_cast<std::size_t>(e.index)] > 0 ? 1.5 : 0.75});
  }
  write_file(dir / "cover.csv", cover_csv);
  write_file(dir / "cover.svg", svg_strip(cover.describe(), boxes, {-0.5, 0.0, 1.5, 1.0}));
  const auto NU = static_cast<std::int64_t>(cover.count());
  std::string rep = header(cfg, m);
  rep += "power=" + std::to_string(n) + "\n" + cover.describe() + " N(U)=" + std::to_string(NU) +
         " lebesgue=" + format_double(cover.lebesgue) + "\n";
  rep += "length=" + std::to_string(cert.length()) + " distinct=" + std::to_string(cert.distinct_count()) +
         " C=" + std::to_string(cert.C) + " residual=" + format_double(cert.residual) + "\n";
  rep += "map_digest=" + cert.for_map + "\n";
  if (cert.C >= 5 * NU)
    rep += "reencoded_bound(C=" + std::to_string(cert.C) + ")=" +
           std::to_string(reencode_bound(static_cast<std::int64_t>(cert.length()), cert.C, NU)) + "\n";
  rep += "verdict=pass\n";
  write_file(dir / "report.txt", rep);
  return 0;
}

int cmd_distortion(const RunConfig& cfg, const LiftMap& m, const fs::path& dir) {
  const std::int64_t n_max = ns_or(cfg, {64}).front();
  const BallCover cover = make_cover(cfg.kx, cfg.kt, cfg.overlap);
  const auto series = series_estimates(m, cover, cfg.C, n_max, cfg.tol);
  write_file(dir / "series.csv", series.csv());
  PlotSeries avg{"length / n", {}, {}};
  for (std::size_t i = 0; i < series.lengths.size(); ++i) {
    avg.x.push_back(static_cast<double>(i + 1));
    avg.y.push_back(static_cast<double>(series.lengths[i]) / static_cast<double>(i + 1));
  }
  write_file(dir / "series.svg", svg_plot("fragmentation length per power", "n", "length / n", {avg}));
  const auto sv = svarc_milnor_check(m, 20);
  write_file(dir / "svarc.csv", sv.csv());
  const double dld = delta_log_delta(m, n_max);
  const bool ok = series.consistent() && series.G_hi <= series.slope && sv.passed();
  std::string rep = header(cfg, m);
  rep += cover.describe() + " n_max=" + std::to_string(n_max) + "\n";
  rep += "g_lo=" + format_double(series.g_lo) + " G_hi=" + format_double(series.G_hi) +
         " slope=" + format_double(series.slope) + "\n";
  rep += "euclid_checked=" + std::to_string(series.euclid_checked) +
         " euclid_violations=" + std::to_string(series.euclid_violations) + "\n";
  rep += "delta_log_delta(n_max)=" + format_double(dld) + "\n";
  rep += "svarc C=" + format_double(sv.C) + " C'=" + format_double(sv.Cprime) + " exact=" + (sv.exact ? "yes" : "no") +
         "\n";
  rep += std::string("verdict=") + (ok ? "pass" : "FAIL") + "\n";
  write_file(dir / "report.txt", rep);
  return ok ? 0 : 2;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.tol.sep <= 0 || cfg.tol.inv <= 0 || cfg.tol.frag <= 0 || cfg.tol.curve <= 0 || cfg.tol_rot <= 0)
      throw Error(ErrorKind::ParamOutOfRange, "tolerances must be positive");
    if (cfg.samples < 2) throw Error(ErrorKind::ParamOutOfRange, "need at least 2 samples per axis");
    const LiftMap m = load_map(cfg);
    const fs::path dir = cfg.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory");
    int code = 1;
    if (cfg.command == "rotation") code = cmd_rotation(cfg, m, dir);
    else if (cfg.command == "nonspread") code = cmd_nonspread(cfg, m, dir);
    else if (cfg.command == "curves") code = cmd_curves(cfg, m, dir);
    else if (cfg.command == "conjugate") code = cmd_conjugate(cfg, m, dir);
    else if (cfg.command == "fragment") code = cmd_fragment(cfg, m, dir);
    else if (cfg.command == "distortion") code = cmd_distortion(cfg, m, dir);
    else throw Error(ErrorKind::ParamOutOfRange, "unknown command '" + cfg.command + "'");
    out << cfg.command << ": " << (code == 0 ? "pass" : "verification failed") << " (see report.txt)\n";
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Pseudo-rotations of the annulus: rotation data, curve families, conjugacies, fragmentation"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string pq = "0/1";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--map", cfg.map_path, "map spec file")->required();
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--samples", cfg.samples, "samples per axis");
    sub->add_option("--seed", cfg.seed, "recorded only; the searches are deterministic");
    sub->add_option("--tol-sep", cfg.tol.sep, "strict separation");
    sub->add_option("--tol-inv", cfg.tol.inv, "inverse and seam consistency");
    sub->add_option("--tol-frag", cfg.tol.frag, "fragmentation residual");
    sub->add_option("--tol-curve", cfg.tol.curve, "image curve refinement");
    sub->add_option("--tol-rot", cfg.tol_rot, "rotation interval width");
  };
  auto budget = [&](CLI::App* sub) {
    sub->add_option("--budget-grid-w", cfg.budget.grid_w, "frontier grid columns");
    sub->add_option("--budget-grid-h", cfg.budget.grid_h, "frontier grid rows");
    sub->add_option("--budget-doublings", cfg.budget.doublings, "resolution doublings");
    sub->add_option("--budget-corridor", cfg.budget.corridor_res, "corridor grid rows");
    sub->add_option("--budget-rotation-n", cfg.budget.rotation_n, "iterates for the angle check");
    sub->add_option("--budget-loops", cfg.budget.loop_attempts, "loop repair attempts");
  };
  auto cover = [&](CLI::App* sub) {
    sub->add_option("--kx", cfg.kx, "cover columns");
    sub->add_option("--kt", cfg.kt, "cover rows");
    sub->add_option("--overlap", cfg.overlap, "cover overlap, fraction of a cell");
    sub->add_option("--C", cfg.C, "bound on distinct factors (0: automatic)");
  };

  auto* rot = app.add_subcommand("rotation", "rotation interval of f^n; CSV n,lo,hi,defect,dld");
  common(rot);
  rot->add_option("--n", cfg.n, "iterate counts")->delimiter(',');
  auto* ns = app.add_subcommand("nonspread", "spreading of the unit square; CSV n,defect,dld");
  common(ns);
  ns->add_option("--n", cfg.n, "iterate counts")->delimiter(',');
  auto* cur = app.add_subcommand("curves", "curve family with a betweenness certificate");
  common(cur);
  budget(cur);
  cur->add_option("--pq", pq, "rotation number P/Q");
  cur->add_option("--n", cfg.n, "curves per rotation orbit");
  cur->add_option("--N", cfg.N, "iterates covered by the certificate");
  auto* con = app.add_subcommand("conjugate", "conjugacy to the rigid rotation; CSV N,Nprime,achieved,bound");
  common(con);
  budget(con);
  con->add_option("--pq", pq, "rotation number P/Q");
  con->add_option("--N", cfg.N, "curves per rotation orbit");
  con->add_option("--Nprime", cfg.Nprime, "loops");
  auto* fr = app.add_subcommand("fragment", "fragmentation certificate of f^n; manifest + CSV");
  common(fr);
  cover(fr);
  fr->add_option("--n", cfg.n, "power of the map");
  fr->add_flag("!--no-auto-split", cfg.auto_split, "fail instead of splitting large stages");
  auto* dis = app.add_subcommand("distortion", "fragmentation lengths of f^n; CSV n,length,avg");
  common(dis);
  cover(dis);
  dis->add_option("--n", cfg.n, "largest power");

  try {
    app.parse(argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "curves" || cfg.command == "conjugate") {
      const auto [p, q] = parse_pq(pq);
      cfg.p = p;
      cfg.q = q;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return run(cfg, std::cout, std::cerr);
}

}  // namespace annulus
