#pragma once

// Covers of the annulus by overlapping rectangles, constructive
// fragmentation of triangular maps into factors supported in single cover
// elements, and the bookkeeping built on fragmentation lengths.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "annulus/dynamics.hpp"
#include "annulus/geometry.hpp"
#include "annulus/tolerances.hpp"

namespace annulus {

struct CoverElement {
  int index = 0;
  int col = 0, row = 0;
  Box box{};          // in strip coordinates; x may run past [0,1]
  bool half = false;  // touches a boundary circle
};

// kx columns by kt rows of rectangles, each widened by `overlap` of a cell
// on every side (clipped at t = 0 and t = 1, where the elements are
// half-balls). Element index is row * kx + col.
struct BallCover {
  int kx = 0, kt = 0;
  double overlap = 0.0;
  double lebesgue = 0.0;
  std::vector<CoverElement> elements;

  std::size_t count() const { return elements.size(); }
  // p (taken mod 1 in x) lies in the interior of element e.
  bool in_interior(int e, StripPoint p) const;
  // Partition of unity subordinate to the cover: sum over e is 1, and the
  // support of weight(e, .) stays lebesgue/2 inside element e.
  double weight(int e, StripPoint p) const;
  std::string describe() const;

  friend bool operator==(const BallCover& a, const BallCover& b) {
    return a.kx == b.kx && a.kt == b.kt && a.overlap == b.overlap;
  }
};

BallCover make_cover(int kx, int kt, double overlap);

// Number of equal pieces that brings a displacement under lebesgue/2.
int required_split(double displacement, double lebesgue);

enum class FactorKind { Horizontal, Vertical, Twist };

char kind_code(FactorKind k);  // h, v, d

struct FactorImpl;

// One fragmentation factor, supported in the interior of one cover element.
class Factor {
 public:
  Factor(std::shared_ptr<const FactorImpl> impl, bool inverted);

  StripPoint apply(StripPoint p) const;
  Factor inverse() const { return Factor(impl_, !inverted_); }

  int element() const;
  FactorKind kind() const;
  const std::string& description() const { return description_; }
  const std::string& digest() const { return digest_; }

 private:
  std::shared_ptr<const FactorImpl> impl_;
  bool inverted_ = false;
  std::string description_;
  std::string digest_;
};

struct FragmentationCertificate {
  BallCover cover;
  std::vector<Factor> factors;  // applied first to last
  std::int64_t C = 0;
  LiftMap target;
  std::string for_map;  // digest of the target description
  double residual = 0.0;

  std::size_t length() const { return factors.size(); }
  std::size_t distinct_count() const;
  StripPoint apply(StripPoint p) const;
  // One line per factor: idx=<element> stage=<digest> kind=<h|v|d>.
  std::string manifest() const;
};

struct FragmentOptions {
  bool auto_split = true;
  std::int64_t C = 0;        // 0: max(5 N(U), distinct factors)
  int residual_res = 12;     // residual samples per axis
  int support_res = 16;      // support samples per axis
};

// Sup annulus distance between the composed factors and the target on a
// res x (res+1) grid.
double certificate_residual(const FragmentationCertificate& c, int res);

// Problems with the three defining conditions; empty when valid.
std::vector<std::string> validate_certificate(const FragmentationCertificate& c,
                                              const Tolerances& tol, int support_res = 16);

FragmentationCertificate fragment(const LiftMap& m, const BallCover& cover,
                                  const FragmentOptions& opts = {}, const Tolerances& tol = {});

// outer after inner.
FragmentationCertificate compose_certificates(const FragmentationCertificate& outer,
                                              const FragmentationCertificate& inner,
                                              const Tolerances& tol = {}, int residual_res = 8);
FragmentationCertificate power_certificate(const FragmentationCertificate& c, std::int64_t p,
                                           const Tolerances& tol = {}, int residual_res = 8);
FragmentationCertificate inverse_certificate(const FragmentationCertificate& c,
                                             const Tolerances& tol = {}, int residual_res = 8);

// 14 ln(C) + 14.
double reencode_factor(double C);
// ceil(14 ln(C) + 14) * length; CTooSmall when C < 5 N_U.
std::int64_t reencode_bound(std::int64_t length, std::int64_t C, std::int64_t N_U);

struct CertificateSeries {
  std::int64_t n_max = 0;
  std::vector<std::int64_t> lengths;  // lengths[n - 1] for f^n
  double g_lo = 0.0, G_hi = 0.0;      // min / max of length/n over [n_max/2, n_max]
  double slope = 0.0;                 // length(f), the per-power cost
  std::size_t euclid_checked = 0;
  std::size_t euclid_violations = 0;

  bool consistent() const { return euclid_violations == 0 && g_lo <= G_hi; }
  std::string csv() const;  // n,length,avg
};

// Euclidean-division consistency: length(f^{qk+r}) <= q length(f^k) +
// length(f^r) for every k >= 1, q >= 1, 0 <= r < k with qk + r <= n_max.
void check_euclid(CertificateSeries& s);

CertificateSeries series_estimates(const LiftMap& m, const BallCover& cover, std::int64_t C,
                                   std::int64_t n_max, const Tolerances& tol = {});

struct TransferReport {
  std::int64_t n = 0;
  std::size_t len_h = 0, len_conj = 0, len_witness = 0;
  std::int64_t C_witness = 0, C_claimed = 0;
  std::size_t distinct = 0;
  double residual = 0.0;
  bool holds = false;

  std::string text() const;
};

// Builds h^-1 (h f^n h^-1) h from the certificates and checks that it is a
// certificate for f^n with C = 10 N(U) and length len(conj) + 2 len(h).
TransferReport conjugacy_transfer(const FragmentationCertificate& h_cert,
                                  const FragmentationCertificate& conj_cert, const LiftMap& f,
                                  std::int64_t n, const Tolerances& tol = {});

}  // namespace annulus
