#pragma once

#include <array>
#include <functional>
#include <vector>

#include "depthlab/camera.hpp"
#include "depthlab/photometric.hpp"
#include "depthlab/synth.hpp"
#include "depthlab/triplet.hpp"

namespace depthlab {

/// Assembled objective over a per-pixel disparity map d:
///   total = mean(pe(left, warp(right, d)))
///         + lambda_smooth * smoothness(d, left)
///         + lambda_triplet * sum_anchors(triplet(lift(d), labels)) / N
/// The triplet term is averaged over pixels (not anchors) so both data
/// terms put their per-pixel gradients on the same 1/N scale.
struct LossConfig {
  PhotometricConfig photometric;
  TripletConfig triplet;
  DisparityFeatureConfig lift;
  double lambda_smooth = 1e-3;
  double lambda_triplet = 0.1;  // 0 skips the triplet term entirely
};

struct LossBreakdown {
  double total = 0;
  double photometric = 0;  // mean of the per-pixel error map
  double smoothness = 0;   // unweighted term values; total applies lambdas
  double triplet = 0;      // per-pixel form: sum of anchor terms / N
  int triplet_anchors = 0;
};

/// Loss value and its exact gradient w.r.t. the disparity map. The pair is
/// mutually consistent (finite differences of the value reproduce the
/// gradient away from kinks); any step-size policy lives in run_descent.
LossBreakdown total_loss_and_grad(const Image& left, const Image& right,
                                  const ScalarGrid& labels, const ScalarGrid& disp,
                                  const LossConfig& cfg, ScalarGrid& grad);

struct OptConfig {
  LossConfig loss;
  double lr = 1e-2;
  int steps = 500;
  /// The published objective averages over pixels, which makes the raw
  /// gradient O(1/N) per pixel. The update rescales it by N * step_scale so
  /// lr keeps a per-pixel meaning; the reported loss/gradient pair is not
  /// affected. 250 is calibrated on the reference scene: fast enough that
  /// plateau drift fattens the band within 500 steps, gentle enough that
  /// hinge forces settle instead of oscillating across the band midpoint.
  double step_scale = 250.0;
  double d_min = 1.0;
  double d_max = 15.0;
  int snapshot_every = 0;  // 0 = no snapshots
};

struct HistoryRow {
  int step;
  double total, photometric, smoothness, triplet;
};

struct OptResult {
  ScalarGrid disparity;
  std::vector<HistoryRow> history;  // one row per step plus the final state
  bool diverged = false;
};

/// Plain gradient descent with per-step clamping to [d_min, d_max].
/// The snapshot callback (if any) fires at every multiple of snapshot_every
/// and once more on the final state.
OptResult run_descent(const Image& left, const Image& right, const ScalarGrid& labels,
                      const ScalarGrid& init, const OptConfig& cfg,
                      const std::function<void(int, const ScalarGrid&)>& snapshot = {});

/// Inclusive arithmetic ladder lo, lo+step, ..., hi.
std::vector<double> make_candidates(double lo, double hi, double step);

/// Per-pixel argmin of the photometric error over constant-disparity warps.
/// Candidates are scanned in ascending order and only a strictly smaller
/// error replaces the incumbent, so exact ties resolve to the smallest
/// disparity.
ScalarGrid profile_argmin(const Image& left, const Image& right,
                          const std::vector<double>& candidates,
                          const PhotometricConfig& cfg = {});

struct ProfilePoint {
  double disparity;
  double error;
};

/// The full error curve at one pixel: for each candidate d, the photometric
/// error that pixel would see if the whole image warped at constant d. The
/// per-pixel SSIM window makes this depend on a neighbourhood, not just the
/// pixel itself — exactly what the per-pixel argmin above integrates.
std::vector<ProfilePoint> photometric_profile(const Image& left, const Image& right, int x, int y,
                                              const std::vector<double>& candidates,
                                              const PhotometricConfig& cfg = {});

/// How far a disparity map strays from the scene's plane geometry.
struct FatteningReport {
  double band_at_fg = 0;       // occluded-band fraction within 0.5 of d_fg
  double band_fattened = 0;    // occluded-band fraction strictly closer to d_fg than d_bg
  double bg_at_bg = 0;         // non-occluded background fraction within 0.5 of d_bg
  double mean_band = 0;        // mean disparity over the occluded band
  std::vector<int> leak_width; // per foreground row: fattened band pixels
};

FatteningReport fattening_report(const ScalarGrid& disp, const StereoScene& scene);

}  // namespace depthlab
