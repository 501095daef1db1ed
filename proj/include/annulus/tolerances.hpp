#pragma once

namespace annulus {

struct Tolerances {
  double sep = 1e-9;     // minimum clearance for a "strict" geometric relation
  double inv = 1e-10;    // inverse consistency / seam continuity
  double frag = 1e-9;    // fragmentation residual
  double curve = 1e-3;   // max gap between consecutive image points of a curve
  double eq = 1e-12;     // equivariance checks
};

}  // namespace annulus
