#pragma once

// Command-line front end. Every subcommand writes its CSV, SVG and
// report.txt into the output directory and returns 0 when all
// verifications pass, 2 when a verification fails, 1 on errors.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "annulus/curves.hpp"
#include "annulus/tolerances.hpp"

namespace annulus {

struct RunConfig {
  std::string command;  // rotation | nonspread | curves | conjugate | fragment | distortion
  std::string map_path;
  std::string map_text;  // used instead of map_path when non-empty
  std::vector<std::int64_t> n;  // empty: per-command default
  std::int64_t N = 1;
  std::int64_t Nprime = 3;
  std::int64_t p = 0, q = 1;
  std::string out = "out";
  Tolerances tol;
  double tol_rot = 1e-3;
  SearchBudget budget;
  std::uint64_t seed = 0;
  int samples = 32;
  int kx = 4, kt = 2;
  double overlap = 0.2;
  std::int64_t C = 0;
  bool auto_split = true;
};

// Parses "P/Q".
std::pair<std::int64_t, std::int64_t> parse_pq(const std::string& s);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command line: parses flags with CLI11 and calls run().
int cli_main(int argc, char** argv);

}  // namespace annulus
