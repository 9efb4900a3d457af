#include "depthlab/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace depthlab {
namespace {

struct AxisCell {
  int i0;        // lower node
  double w;      // weight of upper node, in [0, 1]
  double mask;   // 1 inside the sloped region, 0 where the surface is flat
};

// ceil(xc) - 1 picks the cell *left of* the lattice line at integer
// coordinates, so the derivative there is the left-sided slope while the
// interpolated value (weight exactly 1.0 on the upper node) stays bit-exact.
AxisCell axis_cell(double x, int n) {
  if (n == 1) return {0, 0.0, 0.0};
  double xc = std::clamp(x, 0.0, static_cast<double>(n - 1));
  int i0 = std::clamp(static_cast<int>(std::ceil(xc)) - 1, 0, n - 2);
  double w = xc - i0;
  double mask = (x > 0.0 && x <= static_cast<double>(n - 1)) ? 1.0 : 0.0;
  return {i0, w, mask};
}

}  // namespace

Sample sample_bilinear(const ScalarGrid& g, double x, double y) {
  require(!g.empty(), "sample_bilinear: empty grid");
  const AxisCell cx = axis_cell(x, g.width);
  const AxisCell cy = axis_cell(y, g.height);

  const double v00 = g.at(cx.i0, cy.i0);
  const double v10 = (g.width > 1) ? g.at(cx.i0 + 1, cy.i0) : v00;
  const double v01 = (g.height > 1) ? g.at(cx.i0, cy.i0 + 1) : v00;
  const double v11 = (g.width > 1 && g.height > 1) ? g.at(cx.i0 + 1, cy.i0 + 1) : v10;

  const double top = (1.0 - cx.w) * v00 + cx.w * v10;
  const double bot = (1.0 - cx.w) * v01 + cx.w * v11;

  Sample s;
  s.value = (1.0 - cy.w) * top + cy.w * bot;
  s.dvalue_dx = cx.mask * ((1.0 - cy.w) * (v10 - v00) + cy.w * (v11 - v01));
  s.dvalue_dy = cy.mask * (bot - top);
  return s;
}

void sample_bilinear_image(const Image& im, double x, double y, Sample* out) {
  require_image(im, "sample_bilinear_image");
  for (size_t c = 0; c < im.size(); ++c) out[c] = sample_bilinear(im[c], x, y);
}

}  // namespace depthlab
