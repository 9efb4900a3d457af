#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "depthlab/synth.hpp"

using namespace depthlab;

namespace {
SceneConfig reference() { return SceneConfig{}; }  // 128x96, d 5/10, rect 40x4 at (64,46), seed 42
}

TEST_CASE("masks and ground truth cover exactly the configured geometry") {
  auto sc = synthesize_scene(reference());
  double fg_sum = 0, band_sum = 0, occ_sum = 0;
  for (double v : sc.fg_mask.data) fg_sum += v;
  for (double v : sc.band_mask.data) band_sum += v;
  for (double v : sc.occluded_mask.data) occ_sum += v;
  CHECK(fg_sum == 40.0 * 4.0);
  CHECK(band_sum == 5.0 * 4.0);          // band width = d_fg - d_bg
  CHECK(occ_sum == 5.0 * 4.0 + 5.0 * 96.0);  // band + columns x < d_bg
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 128; ++x) {
      const bool fg = x >= 64 && x < 104 && y >= 46 && y < 50;
      CHECK(sc.fg_mask.at(x, y) == (fg ? 1.0 : 0.0));
      CHECK(sc.gt_disparity.at(x, y) == (fg ? 10.0 : 5.0));
      const bool band = x >= 59 && x < 64 && y >= 46 && y < 50;
      CHECK(sc.band_mask.at(x, y) == (band ? 1.0 : 0.0));
      // Invisible in the right view: covered by the rectangle, or the true
      // correspondence x - d falls left of the frame.
      const bool occ = band || x < 5;
      CHECK(sc.occluded_mask.at(x, y) == (occ ? 1.0 : 0.0));
    }
}

TEST_CASE("visible pixels correspond bit-exactly at their true disparity") {
  auto sc = synthesize_scene(reference());
  int checked_bg = 0, checked_fg = 0;
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 128; ++x) {
      if (sc.occluded_mask.at(x, y) == 1.0) continue;
      if (sc.fg_mask.at(x, y) == 1.0) {
        CHECK(sc.left[0].at(x, y) == sc.right[0].at(x - 10, y));
        ++checked_fg;
      } else {
        CHECK(sc.left[0].at(x, y) == sc.right[0].at(x - 5, y));
        ++checked_bg;
      }
    }
  CHECK(checked_fg == 160);
  CHECK(checked_bg == 96 * 128 - 160 - 20 - 5 * 96);
}

TEST_CASE("occluded band pixels see foreground texture at their true match") {
  auto sc = synthesize_scene(reference());
  int mismatches = 0, total = 0;
  for (int y = 46; y < 50; ++y)
    for (int x = 59; x < 64; ++x) {
      ++total;
      if (sc.left[0].at(x, y) != sc.right[0].at(x - 5, y)) ++mismatches;
    }
  CHECK(total == 20);
  CHECK(mismatches == total);  // independent noise fields never coincide
}

TEST_CASE("echoed stripe: band columns duplicate the stripe one band-width left") {
  auto sc = synthesize_scene(reference());
  for (int y = 0; y < 96; ++y)
    for (int x = 59; x < 64; ++x) CHECK(sc.left[0].at(x, y) == sc.left[0].at(x - 5, y));
  // ...which is exactly what makes the occluded band match at d_fg:
  for (int y = 46; y < 50; ++y)
    for (int x = 59; x < 64; ++x) CHECK(sc.left[0].at(x, y) == sc.right[0].at(x - 10, y));
}

TEST_CASE("without repeat_band the stripe is plain noise") {
  auto cfg = reference();
  cfg.repeat_band = false;
  auto sc = synthesize_scene(cfg);
  int equal = 0;
  for (int y = 0; y < 96; ++y)
    for (int x = 59; x < 64; ++x)
      if (sc.left[0].at(x, y) == sc.left[0].at(x - 5, y)) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("same seed reproduces the scene bit-exactly, another seed does not") {
  auto a = synthesize_scene(reference());
  auto b = synthesize_scene(reference());
  CHECK(a.left[0].data == b.left[0].data);
  CHECK(a.right[0].data == b.right[0].data);
  auto cfg = reference();
  cfg.seed = 43;
  auto c = synthesize_scene(cfg);
  CHECK(a.left[0].data != c.left[0].data);
}

TEST_CASE("texture values stay inside [0.1, 0.9]") {
  auto sc = synthesize_scene(reference());
  for (double v : sc.left[0].data) {
    CHECK(v >= 0.1);
    CHECK(v <= 0.9);
  }
  for (double v : sc.right[0].data) {
    CHECK(v >= 0.1);
    CHECK(v <= 0.9);
  }
}

TEST_CASE("value noise is defined on negative coordinates and deterministic") {
  double a = value_noise(7, -123.4, -56.7, 8.0);
  double b = value_noise(7, -123.4, -56.7, 8.0);
  CHECK(a == b);
  CHECK(a >= 0.1);
  CHECK(a <= 0.9);
  CHECK(value_noise(8, -123.4, -56.7, 8.0) != a);
}

TEST_CASE("minimum disparity gap gives a one-pixel band") {
  auto cfg = reference();
  cfg.d_fg = 6.0;  // d_bg + 1
  auto sc = synthesize_scene(cfg);
  double band_sum = 0;
  for (double v : sc.band_mask.data) band_sum += v;
  CHECK(band_sum == 1.0 * cfg.fg_h);
}

TEST_CASE("window sub-rectangle: foreground label, background looks") {
  auto cfg = reference();
  cfg.win_x = 80;
  cfg.win_y = 47;
  cfg.win_w = 10;
  cfg.win_h = 2;
  auto sc = synthesize_scene(cfg);
  auto plain = synthesize_scene(reference());
  int in_win = 0;
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 128; ++x) {
      const bool win = x >= 80 && x < 90 && y >= 47 && y < 49;
      if (win) {
        ++in_win;
        CHECK(sc.left[0].at(x, y) <= 0.45);  // background's value range
        CHECK(sc.fg_mask.at(x, y) == 1.0);   // still labelled foreground
        CHECK(sc.gt_disparity.at(x, y) == 10.0);
        CHECK(sc.left[0].at(x, y) == sc.right[0].at(x - 10, y));  // rides the plane
      } else {
        CHECK(sc.left[0].at(x, y) == plain.left[0].at(x, y));  // rest untouched
      }
    }
  CHECK(in_win == 20);
}

TEST_CASE("configuration contracts") {
  auto cfg = reference();
  cfg.d_fg = 9.5;
  CHECK_THROWS_AS(synthesize_scene(cfg), contract_error);  // non-integer with repeat_band
  cfg = reference();
  cfg.fg_x = 5;  // echo region would start left of the frame
  CHECK_THROWS_AS(synthesize_scene(cfg), contract_error);
  cfg = reference();
  cfg.fg_w = 4;  // narrower than the occlusion band
  CHECK_THROWS_AS(synthesize_scene(cfg), contract_error);
  cfg = reference();
  cfg.d_bg = 12.0;  // d_bg >= d_fg
  CHECK_THROWS_AS(synthesize_scene(cfg), contract_error);
  cfg = reference();
  cfg.win_x = 60;  // window sticking out of the rectangle
  cfg.win_y = 47;
  cfg.win_w = 10;
  cfg.win_h = 2;
  CHECK_THROWS_AS(synthesize_scene(cfg), contract_error);
}
