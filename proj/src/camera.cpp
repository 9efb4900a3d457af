#include "depthlab/camera.hpp"

#include "depthlab/sampling.hpp"

namespace depthlab {

Vec3 backproject(const Intrinsics& K, double x, double y, double depth) {
  require(depth > 0, "backproject: depth must be positive");
  return {(x - K.cx) / K.fx * depth, (y - K.cy) / K.fy * depth, depth};
}

Vec2 project(const Intrinsics& K, const Vec3& p) {
  require(p.z > 0, "project: point behind camera");
  return {K.fx * p.x / p.z + K.cx, K.fy * p.y / p.z + K.cy};
}

double depth_from_disparity(const StereoRig& rig, double d) {
  require(rig.intr.fx > 0 && rig.baseline > 0, "depth_from_disparity: rig needs fx, baseline > 0");
  require(d > 0, "depth_from_disparity: disparity must be positive");
  return rig.intr.fx * rig.baseline / d;
}

double disparity_from_depth(const StereoRig& rig, double z) {
  require(rig.intr.fx > 0 && rig.baseline > 0, "disparity_from_depth: rig needs fx, baseline > 0");
  require(z > 0, "disparity_from_depth: depth must be positive");
  return rig.intr.fx * rig.baseline / z;
}

Image reconstruct_left_from_right(const Image& right, const ScalarGrid& disparity,
                                  Image* drecon_ddisp) {
  require_image(right, "reconstruct_left_from_right");
  require_same_shape(right[0], disparity, "reconstruct_left_from_right");

  Image recon(right.size(), ScalarGrid(disparity.width, disparity.height));
  if (drecon_ddisp) *drecon_ddisp = Image(right.size(), ScalarGrid(disparity.width, disparity.height));

  for (int y = 0; y < disparity.height; ++y)
    for (int x = 0; x < disparity.width; ++x) {
      const double sx = x - disparity.at(x, y);
      for (size_t c = 0; c < right.size(); ++c) {
        Sample s = sample_bilinear(right[c], sx, static_cast<double>(y));
        recon[c].at(x, y) = s.value;
        // d enters the sample coordinate as -d, so chain with -1.
        if (drecon_ddisp) (*drecon_ddisp)[c].at(x, y) = -s.dvalue_dx;
      }
    }
  return recon;
}

}  // namespace depthlab
