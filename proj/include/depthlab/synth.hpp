#pragma once

#include <cstdint>

#include "depthlab/grid.hpp"

namespace depthlab {

/// Procedural rectified stereo pair: a textured background plane at
/// disparity d_bg with a textured foreground rectangle at d_fg pasted on
/// top, plus exact ground truth and occlusion geometry.
///
/// Textures are seeded value noise evaluated as pure functions of world
/// pixel coordinates on an unbounded domain, so the right view can sample
/// texture that lies outside the left frame. The background occupies
/// [0.1, 0.45]; the foreground is strictly brighter ([0.55, 0.9]) and rides
/// a left-to-right rising ramp, which keeps the photometric error of an
/// occluded pixel monotone between the two planes' disparities (no spurious
/// minima for descent to stall in).
///
/// The background band of width d_fg - d_bg just left of the rectangle is
/// invisible in the right view (the rectangle covers it). With repeat_band
/// on, the background texture in those columns (plus one guard column for
/// the 3x3 photometric window) repeats the stripe immediately to their
/// left, one band-width away: every occluded pixel then reprojects
/// *bit-exactly* at the foreground disparity, which is the fake optimum
/// that produces edge fattening. The echoed stripe is itself hidden behind
/// the rectangle in the right view, so the right image never exposes the
/// duplication where it could create matches elsewhere.
struct SceneConfig {
  int width = 128;
  int height = 96;
  double d_bg = 5.0;
  double d_fg = 10.0;
  // A thin horizontal slab: the classic fattening victim, and thin enough
  // that every near-boundary patch also sees background rows at their true
  // disparity (matters for how hinge losses saturate around it).
  int fg_x = 64, fg_y = 46, fg_w = 40, fg_h = 4;
  // Optional "window" cut into the rectangle: same label and disparity as
  // the rest of the foreground, but textured like the background — the
  // glass-on-a-car case where appearance and geometry disagree. Disabled
  // while either dimension is zero.
  int win_x = 0, win_y = 0, win_w = 0, win_h = 0;
  double texture_scale = 8.0;     // bg noise lattice spacing, pixels
  double fg_texture_scale = 8.0;  // fg noise lattice spacing, pixels
  uint64_t seed = 42;
  bool repeat_band = true;
};

struct StereoScene {
  Image left, right;         // single-channel, values in [0.1, 0.9]
  ScalarGrid gt_disparity;   // left-view ground truth
  ScalarGrid fg_mask;        // 1 inside the foreground rectangle
  ScalarGrid band_mask;      // 1 on the background band the rectangle covers
  ScalarGrid occluded_mask;  // 1 wherever the pixel is invisible in the right
                             // view: the covered band plus pixels whose true
                             // correspondence falls left of the right frame
  SceneConfig config;
};

/// Smooth seeded lattice noise in [0.1, 0.9]; defined for all integer (x, y),
/// including negatives.
double value_noise(uint64_t seed, double x, double y, double scale);

/// Render the scene. With repeat_band set, d_bg and d_fg must be positive
/// integers (the exact-copy geometry is only meaningful on the pixel grid);
/// d_fg - d_bg must be positive and the rectangle plus its occlusion band
/// must fit inside the frame.
StereoScene synthesize_scene(const SceneConfig& cfg);

}  // namespace depthlab
