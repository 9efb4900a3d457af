#pragma once

#include "depthlab/grid.hpp"

namespace depthlab {

/// Result of one bilinear tap: interpolated value plus the partial
/// derivatives of that value w.r.t. the sample coordinates.
struct Sample {
  double value = 0.0;
  double dvalue_dx = 0.0;
  double dvalue_dy = 0.0;
};

/// Bilinear lookup with clamp-to-edge extension.
///
/// Invariants the rest of the library leans on:
///  - integer coordinates reproduce grid values bit-exactly;
///  - outside [0, n-1] the surface is flat and the reported derivative is 0;
///  - on lattice lines the derivative is the left/lower one-sided slope, so
///    value and derivative always describe the same (left-continuous) cell.
Sample sample_bilinear(const ScalarGrid& g, double x, double y);

/// Bilinear lookup over a multi-channel image; derivative of channel c is
/// written to out[c]. out must have im.size() entries.
void sample_bilinear_image(const Image& im, double x, double y, Sample* out);

}  // namespace depthlab
