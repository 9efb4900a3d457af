#include "depthlab/synth.hpp"

#include <cmath>

#include "depthlab/rng.hpp"

namespace depthlab {
namespace {

double lattice_value(uint64_t seed, int64_t u, int64_t v) {
  const uint64_t h = hash_mix(hash_mix(seed, static_cast<uint64_t>(u)), static_cast<uint64_t>(v));
  return hash_to_unit(h);
}

// Smooth seeded lattice noise in [0, 1] on an unbounded integer domain.
double noise01(uint64_t seed, double x, double y, double scale) {
  require(scale > 0, "value_noise: scale must be positive");
  const double sx = x / scale, sy = y / scale;
  const double fx = std::floor(sx), fy = std::floor(sy);
  const int64_t u = static_cast<int64_t>(fx), v = static_cast<int64_t>(fy);
  const double tx = sx - fx, ty = sy - fy;
  const double v00 = lattice_value(seed, u, v);
  const double v10 = lattice_value(seed, u + 1, v);
  const double v01 = lattice_value(seed, u, v + 1);
  const double v11 = lattice_value(seed, u + 1, v + 1);
  const double top = v00 + (v10 - v00) * tx;
  const double bot = v01 + (v11 - v01) * tx;
  return top + (bot - top) * ty;
}

// Intensity bands of the two planes. Keeping them disjoint (foreground
// strictly brighter) means a band pixel sliding its match across the
// foreground never crosses its own value, so the error there cannot dip
// into a spurious local minimum.
constexpr double kBgLo = 0.1, kBgHi = 0.45;
constexpr double kFgLo = 0.55, kFgHi = 0.9;
constexpr double kFgNoiseAmp = 0.02;

}  // namespace

double value_noise(uint64_t seed, double x, double y, double scale) {
  return 0.1 + 0.8 * noise01(seed, x, y, scale);
}

StereoScene synthesize_scene(const SceneConfig& cfg) {
  require(cfg.width >= 8 && cfg.height >= 8, "scene: frame too small");
  require(cfg.d_fg > cfg.d_bg && cfg.d_bg > 0, "scene: need d_fg > d_bg > 0");
  if (cfg.repeat_band)
    require(cfg.d_bg == std::floor(cfg.d_bg) && cfg.d_fg == std::floor(cfg.d_fg),
            "scene: repeat_band needs integer disparities");
  const int band = static_cast<int>(std::lround(cfg.d_fg - cfg.d_bg));
  require(cfg.fg_w > band, "scene: rectangle must be wider than the occlusion band");
  require(cfg.fg_x - band - 1 >= 0 && cfg.fg_x + cfg.fg_w <= cfg.width && cfg.fg_y >= 0 &&
              cfg.fg_y + cfg.fg_h <= cfg.height && cfg.fg_w > 0 && cfg.fg_h > 0,
          "scene: rectangle plus occlusion band must fit in the frame");
  const bool has_window = cfg.win_w > 0 && cfg.win_h > 0;
  if (has_window)
    require(cfg.win_x >= cfg.fg_x && cfg.win_x + cfg.win_w <= cfg.fg_x + cfg.fg_w &&
                cfg.win_y >= cfg.fg_y && cfg.win_y + cfg.win_h <= cfg.fg_y + cfg.fg_h,
            "scene: window must lie inside the foreground rectangle");

  const uint64_t bg_seed = substream(cfg.seed, "texture-bg");
  const uint64_t fg_seed = substream(cfg.seed, "texture-fg");
  const uint64_t win_seed = substream(cfg.seed, "texture-window");

  // Echo region: the occluded band plus one guard column on its left, every
  // row. Columns there repeat the stripe starting one band-width earlier,
  // so bg(x) == bg(x - band) holds across the whole region.
  const int echo_begin = cfg.fg_x - band - 1;
  const int echo_end = cfg.fg_x;
  auto bg_column = [&](int x) {
    if (cfg.repeat_band && x >= echo_begin && x < echo_end)
      return echo_begin - band + (x - echo_begin) % band;
    return x;
  };
  auto bg_at = [&](int x, int y) {
    return kBgLo + (kBgHi - kBgLo) * noise01(bg_seed, static_cast<double>(bg_column(x)),
                                             static_cast<double>(y), cfg.texture_scale);
  };
  // Foreground: a left-to-right rising ramp carrying low-amplitude noise.
  // The ramp slope strictly exceeds the noise's worst-case slope
  // (2*amp/scale), so intensity increases monotonically along every row —
  // which hands gradient descent an unbroken downhill path from the fake
  // match back at d_bg all the way into the d_fg basin.
  const double ramp_lo = kFgLo + kFgNoiseAmp, ramp_hi = kFgHi - kFgNoiseAmp;
  const double ramp_slope = (ramp_hi - ramp_lo) / (cfg.fg_w - 1);
  require(ramp_slope > 2.0 * kFgNoiseAmp / cfg.fg_texture_scale,
          "scene: foreground too wide for its noise scale (ramp would lose monotonicity)");
  auto in_window = [&](int x, int y) {
    return has_window && x >= cfg.win_x && x < cfg.win_x + cfg.win_w && y >= cfg.win_y &&
           y < cfg.win_y + cfg.win_h;
  };
  auto fg_at = [&](int x, int y) {
    if (in_window(x, y))  // background-coloured glass on the foreground plane
      return kBgLo + (kBgHi - kBgLo) *
                         noise01(win_seed, static_cast<double>(x), static_cast<double>(y),
                                 cfg.fg_texture_scale);
    const double noise =
        2.0 * noise01(fg_seed, static_cast<double>(x), static_cast<double>(y),
                      cfg.fg_texture_scale) -
        1.0;
    return ramp_lo + ramp_slope * (x - cfg.fg_x) + kFgNoiseAmp * noise;
  };
  auto in_fg_rows = [&](int y) { return y >= cfg.fg_y && y < cfg.fg_y + cfg.fg_h; };
  auto in_fg_rect = [&](int x, int y) {
    return in_fg_rows(y) && x >= cfg.fg_x && x < cfg.fg_x + cfg.fg_w;
  };

  const int d_bg_i = static_cast<int>(std::lround(cfg.d_bg));
  const int d_fg_i = static_cast<int>(std::lround(cfg.d_fg));

  StereoScene sc;
  sc.config = cfg;
  sc.left = Image(1, ScalarGrid(cfg.width, cfg.height));
  sc.right = Image(1, ScalarGrid(cfg.width, cfg.height));
  sc.gt_disparity = ScalarGrid(cfg.width, cfg.height, cfg.d_bg);
  sc.fg_mask = ScalarGrid(cfg.width, cfg.height, 0.0);
  sc.band_mask = ScalarGrid(cfg.width, cfg.height, 0.0);
  sc.occluded_mask = ScalarGrid(cfg.width, cfg.height, 0.0);

  for (int y = 0; y < cfg.height; ++y)
    for (int x = 0; x < cfg.width; ++x) {
      sc.left[0].at(x, y) = in_fg_rect(x, y) ? fg_at(x, y) : bg_at(x, y);

      // In the right view the rectangle sits d_fg further left.
      const bool fg_covers = in_fg_rows(y) && x >= cfg.fg_x - d_fg_i && x < cfg.fg_x + cfg.fg_w - d_fg_i;
      sc.right[0].at(x, y) = fg_covers ? fg_at(x + d_fg_i, y) : bg_at(x + d_bg_i, y);

      if (in_fg_rect(x, y)) {
        sc.gt_disparity.at(x, y) = cfg.d_fg;
        sc.fg_mask.at(x, y) = 1.0;
        if (x - d_fg_i < 0) sc.occluded_mask.at(x, y) = 1.0;
      } else {
        if (in_fg_rows(y) && x >= cfg.fg_x - band && x < cfg.fg_x) {
          // Background the rectangle slides over in the right view.
          sc.band_mask.at(x, y) = 1.0;
          sc.occluded_mask.at(x, y) = 1.0;
        }
        if (x - d_bg_i < 0) sc.occluded_mask.at(x, y) = 1.0;
      }
    }
  return sc;
}

}  // namespace depthlab
