#pragma once

#include "depthlab/grid.hpp"

namespace depthlab {

struct Vec2 {
  double x = 0, y = 0;
};
struct Vec3 {
  double x = 0, y = 0, z = 0;
};

struct Intrinsics {
  double fx = 1, fy = 1, cx = 0, cy = 0;
};

/// Rectified stereo pair sharing intrinsics; the right camera sits at
/// +baseline along the x axis of the left camera.
struct StereoRig {
  Intrinsics intr;
  double baseline = 0.1;
};

/// Pixel + depth -> point in camera coordinates.
Vec3 backproject(const Intrinsics& K, double x, double y, double depth);

/// Camera-coordinate point -> pixel. Requires z > 0.
Vec2 project(const Intrinsics& K, const Vec3& p);

/// disparity d <-> depth z via z = fx * baseline / d. Both require positive
/// input; the rig must have positive fx and baseline.
double depth_from_disparity(const StereoRig& rig, double d);
double disparity_from_depth(const StereoRig& rig, double z);

/// For a rectified rig, the pixel in the right view corresponding to left
/// pixel (x, y) at disparity d is (x - d, y). This is the specialization of
/// backproject -> translate(-baseline, 0, 0) -> project, and the library's
/// one geometric fact everything else builds on.
inline Vec2 right_pixel(double x, double y, double d) { return {x - d, y}; }

/// Reconstruct the left view by bilinearly sampling the right view at
/// (x - disparity(x,y), y). If drecon_ddisp is non-null it receives, per
/// channel, the derivative of the reconstructed value w.r.t. the disparity
/// at that pixel (the negated horizontal sampling slope).
Image reconstruct_left_from_right(const Image& right, const ScalarGrid& disparity,
                                  Image* drecon_ddisp = nullptr);

}  // namespace depthlab
