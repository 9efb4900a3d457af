#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "depthlab/optimizer.hpp"
#include "depthlab/rng.hpp"

using namespace depthlab;

namespace {

// Random 8x8 state: textured "images" (they need not be a real stereo pair
// for gradient checks), a vertical two-label split that yields 24 anchors,
// and a disparity map comfortably inside the warp's interior.
struct RandomState {
  Image left, right;
  ScalarGrid labels, disp;
};

RandomState make_state(uint64_t seed, int channels, int size = 12) {
  Rng rng(seed);
  RandomState st;
  st.left.assign(channels, ScalarGrid(size, size));
  st.right.assign(channels, ScalarGrid(size, size));
  for (int c = 0; c < channels; ++c)
    for (size_t i = 0; i < st.left[c].size(); ++i) {
      st.left[c].data[i] = rng.uniform(0.1, 0.9);
      st.right[c].data[i] = rng.uniform(0.1, 0.9);
    }
  st.labels = ScalarGrid(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) st.labels.at(x, y) = x < size / 2 ? 0.0 : 1.0;
  st.disp = ScalarGrid(size, size);
  for (size_t i = 0; i < st.disp.size(); ++i) st.disp.data[i] = rng.uniform(2.0, 6.0);
  return st;
}

// A finite-difference probe is meaningful only away from the objective's
// kinks: bilinear cell boundaries, the L1 zero, smoothness sign flips, and
// triplet hinge/min switches. Perturbations are 1e-4, thresholds 1e-3.
// Triplet kinks only matter for probes inside the offending anchor's patch,
// so they are precomputed as a blocked-pixel grid.
ScalarGrid triplet_kink_blocked(const RandomState& st, const LossConfig& cfg) {
  ScalarGrid blocked(st.disp.width, st.disp.height, 0.0);
  if (cfg.lambda_triplet == 0.0) return blocked;
  Image feats = lift_disparity(st.disp, cfg.lift);
  TripletResult tr = triplet_loss(feats, st.labels, cfg.triplet);
  const int r = cfg.triplet.patch_size / 2;
  for (const AnchorStats& a : tr.anchors) {
    const double slack = cfg.triplet.loss_mode == TripletConfig::LossMode::isolated
                             ? cfg.triplet.margin_isolated - a.d_neg
                             : a.d_pos - a.d_neg + cfg.triplet.margin;
    bool kinky = std::abs(slack) < 1e-3;
    if (cfg.triplet.negative_mode == TripletConfig::NegativeMode::min && a.neg_gap < 1e-3)
      kinky = true;
    if (!kinky) continue;
    for (int y = a.y - r; y <= a.y + r; ++y)
      for (int x = a.x - r; x <= a.x + r; ++x)
        if (blocked.in_bounds(x, y)) blocked.at(x, y) = 1.0;
  }
  return blocked;
}

bool near_kink(const RandomState& st, const Image& recon, const ScalarGrid& blocked,
               int x, int y) {
  if (blocked.at(x, y) == 1.0) return true;
  const double d = st.disp.at(x, y);
  const double xc = x - d;
  const double frac = xc - std::floor(xc);
  if (std::min(frac, 1.0 - frac) < 1e-3) return true;
  if (std::abs(xc) < 1e-3 || std::abs(xc - (st.disp.width - 1)) < 1e-3) return true;

  if (xc > 0 && xc <= st.disp.width - 1)  // L1 kink only where recon moves
    for (size_t c = 0; c < st.left.size(); ++c)
      if (std::abs(st.left[c].at(x, y) - recon[c].at(x, y)) < 1e-3) return true;

  for (auto [nx, ny] : {std::pair{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}})
    if (st.disp.in_bounds(nx, ny) && std::abs(d - st.disp.at(nx, ny)) < 1e-3) return true;

  return false;
}

void check_gradient(const RandomState& st, const LossConfig& cfg) {
  ScalarGrid grad;
  total_loss_and_grad(st.left, st.right, st.labels, st.disp, cfg, grad);
  Image recon = reconstruct_left_from_right(st.right, st.disp);
  ScalarGrid blocked = triplet_kink_blocked(st, cfg);

  const double h = 1e-4;
  int probed = 0;
  for (int y = 0; y < st.disp.height; ++y)
    for (int x = 0; x < st.disp.width; ++x) {
      if (near_kink(st, recon, blocked, x, y)) continue;
      RandomState plus = st, minus = st;
      plus.disp.at(x, y) += h;
      minus.disp.at(x, y) -= h;
      ScalarGrid unused;
      const double fp = total_loss_and_grad(plus.left, plus.right, plus.labels, plus.disp, cfg, unused).total;
      const double fm = total_loss_and_grad(minus.left, minus.right, minus.labels, minus.disp, cfg, unused).total;
      const double fd = (fp - fm) / (2 * h);
      const double an = grad.at(x, y);
      const double mag = std::max(std::abs(fd), std::abs(an));
      if (mag < 1e-12) continue;  // both sides agree the slope vanishes
      CHECK(std::abs(fd - an) / mag <= 1e-3);
      ++probed;
    }
  CHECK(probed >= 30);  // the kink filter must not eat the whole grid
}

}  // namespace

TEST_CASE("gradient matches finite differences in every term combination") {
  LossConfig cfg;
  cfg.lambda_smooth = 1e-3;

  SUBCASE("photometric + smoothness only") {
    cfg.lambda_triplet = 0.0;
    check_gradient(make_state(101, 1), cfg);
    check_gradient(make_state(102, 2), cfg);
  }
  SUBCASE("with triplet, mean/standard") {
    cfg.lambda_triplet = 0.1;
    check_gradient(make_state(103, 1), cfg);
  }
  SUBCASE("with triplet, min/isolated") {
    cfg.lambda_triplet = 0.1;
    cfg.triplet.negative_mode = TripletConfig::NegativeMode::min;
    cfg.triplet.loss_mode = TripletConfig::LossMode::isolated;
    check_gradient(make_state(104, 1), cfg);
  }
  SUBCASE("with triplet, min/standard and mean/isolated") {
    cfg.lambda_triplet = 0.1;
    cfg.triplet.negative_mode = TripletConfig::NegativeMode::min;
    check_gradient(make_state(105, 1), cfg);
    cfg.triplet.negative_mode = TripletConfig::NegativeMode::mean;
    cfg.triplet.loss_mode = TripletConfig::LossMode::isolated;
    check_gradient(make_state(106, 1), cfg);
  }
}

TEST_CASE("loss breakdown: total is the lambda-weighted sum of the terms") {
  auto st = make_state(7, 1);
  LossConfig cfg;
  cfg.lambda_smooth = 0.02;
  cfg.lambda_triplet = 0.3;
  ScalarGrid grad;
  LossBreakdown lb = total_loss_and_grad(st.left, st.right, st.labels, st.disp, cfg, grad);
  CHECK(lb.total == lb.photometric + 0.02 * lb.smoothness + 0.3 * lb.triplet);
  CHECK(lb.triplet_anchors > 0);
  CHECK(lb.photometric > 0);
  CHECK(lb.smoothness > 0);
}

TEST_CASE("lambda_triplet = 0 skips the triplet term") {
  auto st = make_state(8, 1);
  LossConfig cfg;
  cfg.lambda_triplet = 0.0;
  ScalarGrid grad;
  LossBreakdown lb = total_loss_and_grad(st.left, st.right, st.labels, st.disp, cfg, grad);
  CHECK(lb.triplet == 0.0);
  CHECK(lb.triplet_anchors == 0);
}

TEST_CASE("descent history covers step 0 through the final state") {
  auto st = make_state(9, 1);
  OptConfig cfg;
  cfg.steps = 10;
  auto res = run_descent(st.left, st.right, st.labels, st.disp, cfg);
  REQUIRE(res.history.size() == 11u);
  CHECK(res.history.front().step == 0);
  CHECK(res.history.back().step == 10);
  for (const auto& row : res.history) CHECK(std::isfinite(row.total));
  CHECK_FALSE(res.diverged);

  SUBCASE("zero steps leaves the initial map untouched") {
    cfg.steps = 0;
    auto r0 = run_descent(st.left, st.right, st.labels, st.disp, cfg);
    CHECK(r0.history.size() == 1u);
    CHECK(r0.disparity.data == st.disp.data);
  }
}

TEST_CASE("updates stay clamped to [d_min, d_max] under an absurd step size") {
  auto st = make_state(10, 1);
  OptConfig cfg;
  cfg.steps = 5;
  cfg.lr = 1e6;
  auto res = run_descent(st.left, st.right, st.labels, st.disp, cfg);
  CHECK_FALSE(res.diverged);
  for (double v : res.disparity.data) {
    CHECK(v >= cfg.d_min);
    CHECK(v <= cfg.d_max);
  }
}

TEST_CASE("non-finite disparity raises the divergence flag before any warp") {
  auto st = make_state(11, 1);
  st.disp.at(3, 3) = std::numeric_limits<double>::quiet_NaN();
  OptConfig cfg;
  cfg.steps = 5;
  auto res = run_descent(st.left, st.right, st.labels, st.disp, cfg);
  CHECK(res.diverged);
  CHECK(res.history.empty());
}

TEST_CASE("snapshot fires on multiples of the interval plus the final step") {
  auto st = make_state(12, 1);
  OptConfig cfg;
  cfg.steps = 5;
  cfg.snapshot_every = 2;
  std::vector<int> fired;
  auto res = run_descent(st.left, st.right, st.labels, st.disp, cfg,
                         [&](int t, const ScalarGrid&) { fired.push_back(t); });
  CHECK(fired == std::vector<int>{0, 2, 4, 5});
  CHECK_FALSE(res.diverged);
}

TEST_CASE("rerunning the same descent reproduces results bit-exactly") {
  auto st = make_state(13, 1);
  OptConfig cfg;
  cfg.steps = 8;
  cfg.loss.lambda_triplet = 0.1;
  auto a = run_descent(st.left, st.right, st.labels, st.disp, cfg);
  auto b = run_descent(st.left, st.right, st.labels, st.disp, cfg);
  CHECK(a.disparity.data == b.disparity.data);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].total == b.history[i].total);
    CHECK(a.history[i].photometric == b.history[i].photometric);
    CHECK(a.history[i].smoothness == b.history[i].smoothness);
    CHECK(a.history[i].triplet == b.history[i].triplet);
  }
}

TEST_CASE("candidate ladder is inclusive of both endpoints") {
  auto c = make_candidates(1.0, 15.0, 0.25);
  REQUIRE(c.size() == 57u);
  CHECK(c.front() == 1.0);
  CHECK(c.back() == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(make_candidates(5.0, 5.0, 1.0) == std::vector<double>{5.0});
  CHECK_THROWS_AS(make_candidates(1.0, 15.0, 0.0), contract_error);
  CHECK_THROWS_AS(make_candidates(15.0, 1.0, 0.25), contract_error);
}

TEST_CASE("profile argmin resolves exact ties to the smallest candidate") {
  // A constant pair is photometrically perfect at every disparity.
  Image left(1, ScalarGrid(10, 6, 0.4)), right(1, ScalarGrid(10, 6, 0.4));
  auto am = profile_argmin(left, right, make_candidates(1.0, 4.0, 0.5));
  for (double v : am.data) CHECK(v == 1.0);
}

TEST_CASE("per-pixel error curves land their minima on the plane disparities") {
  auto sc = synthesize_scene(SceneConfig{});
  auto cand = make_candidates(1.0, 15.0, 0.25);
  auto curve_min = [&](int x, int y, double* err_at = nullptr, double want = 0.0) {
    auto prof = photometric_profile(sc.left, sc.right, x, y, cand);
    REQUIRE(prof.size() == cand.size());
    double best_d = prof.front().disparity, best_e = prof.front().error;
    for (const auto& p : prof)
      if (p.error < best_e) {
        best_e = p.error;
        best_d = p.disparity;
      }
    if (err_at)
      for (const auto& p : prof)
        if (p.disparity == want) *err_at = p.error;
    return best_d;
  };
  CHECK(curve_min(30, 20) == 5.0);  // plain background
  CHECK(curve_min(84, 48) == 10.0);  // foreground interior
  // Occluded band: the true disparity scores worse than the fake optimum.
  double at_bg = -1.0, at_fg = -1.0;
  CHECK(curve_min(61, 47, &at_bg, 5.0) == 10.0);
  curve_min(61, 47, &at_fg, 10.0);
  CHECK(at_bg > at_fg);
  CHECK(at_fg == 0.0);  // the echoed stripe reprojects bit-exactly

  CHECK_THROWS_AS(photometric_profile(sc.left, sc.right, -1, 0, cand), contract_error);
}

TEST_CASE("fattening report arithmetic on hand-built disparity maps") {
  auto sc = synthesize_scene(SceneConfig{});

  SUBCASE("ground truth: band sits at the background plane") {
    auto rep = fattening_report(sc.gt_disparity, sc);
    CHECK(rep.band_at_fg == 0.0);
    CHECK(rep.band_fattened == 0.0);
    CHECK(rep.bg_at_bg == 1.0);
    CHECK(rep.mean_band == 5.0);
    REQUIRE(rep.leak_width.size() == 4u);
    for (int wdt : rep.leak_width) CHECK(wdt == 0);
  }

  SUBCASE("fully fattened band") {
    ScalarGrid d = sc.gt_disparity;
    for (int y = 0; y < 96; ++y)
      for (int x = 0; x < 128; ++x)
        if (sc.band_mask.at(x, y) == 1.0) d.at(x, y) = 10.0;
    auto rep = fattening_report(d, sc);
    CHECK(rep.band_at_fg == 1.0);
    CHECK(rep.band_fattened == 1.0);
    CHECK(rep.bg_at_bg == 1.0);
    CHECK(rep.mean_band == 10.0);
    for (int wdt : rep.leak_width) CHECK(wdt == 5);
  }

  SUBCASE("half the band rows fattened, one bg pixel off-plane") {
    ScalarGrid d = sc.gt_disparity;
    for (int y = 0; y < 96; ++y)
      for (int x = 0; x < 128; ++x)
        if (sc.band_mask.at(x, y) == 1.0 && y % 2 == 0) d.at(x, y) = 9.0;
    d.at(10, 10) = 14.0;  // non-occluded background outlier
    auto rep = fattening_report(d, sc);
    CHECK(rep.band_at_fg == 0.0);  // 9.0 is not within 0.5 of 10
    CHECK(rep.band_fattened == 0.5);
    CHECK(rep.mean_band == 7.0);
    CHECK(rep.bg_at_bg == doctest::Approx(1.0 - 1.0 / 11628.0).epsilon(1e-12));
  }
}

TEST_CASE("contracts: mismatched shapes are rejected") {
  auto st = make_state(14, 1);
  ScalarGrid grad;
  ScalarGrid bad(7, 8, 3.0);
  LossConfig cfg;
  CHECK_THROWS_AS(total_loss_and_grad(st.left, st.right, st.labels, bad, cfg, grad),
                  contract_error);
  auto sc = synthesize_scene(SceneConfig{});
  CHECK_THROWS_AS(fattening_report(bad, sc), contract_error);
}
