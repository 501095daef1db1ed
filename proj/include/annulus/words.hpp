#pragma once

// Words over a finite generating set and the deck-group specialization of
// the Svarc-Milnor inequality.

#include <cstdint>
#include <string>
#include <vector>

#include "annulus/dynamics.hpp"

namespace annulus {

// Letters are nonzero integers: +g is generator g, -g its inverse.
struct GroupWord {
  std::vector<int> letters;

  // Free reduction; idempotent.
  GroupWord reduced() const;
  // Letters written as T, T^-1 (single generator) or g1, g1^-1, ...
  std::string text() const;
  static GroupWord power(int generator, std::int64_t n);
};

std::size_t word_length(const GroupWord& w);

struct SvarcRow {
  std::int64_t k = 0;
  double deck_distance = 0.0;  // d(D, T^k D)
  std::int64_t reach = 0;      // spread of the translates T^j D met by f^k(D)
  double image_diameter = 0.0; // diam f^k(D)
  bool holds = false;          // image_diameter >= C |reach| - C'
};

struct SvarcReport {
  double C = 0.0, Cprime = 0.0;
  bool exact = false;  // d(D, T^k D) = C |k| - C' on every row
  std::vector<SvarcRow> rows;

  bool passed() const;
  std::string csv() const;  // k,deck_distance,reach,image_diameter,holds
};

// D is the unit square. Fits d(D, T^k D) >= C |k| - C' over 1 <= |k| <= k_max
// and checks diam f^k(D) against it for k = 1..k_max.
SvarcReport svarc_milnor_check(const LiftMap& m, std::int64_t k_max, int per_side = 64);

}  // namespace annulus
