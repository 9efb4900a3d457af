#include "depthlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace depthlab {

LossBreakdown total_loss_and_grad(const Image& left, const Image& right,
                                  const ScalarGrid& labels, const ScalarGrid& disp,
                                  const LossConfig& cfg, ScalarGrid& grad) {
  require_image(left, "total_loss_and_grad");
  require_image(right, "total_loss_and_grad");
  require(left.size() == right.size(), "total_loss_and_grad: channel mismatch");
  require_same_shape(left[0], disp, "total_loss_and_grad");
  require_same_shape(left[0], labels, "total_loss_and_grad");

  const int w = disp.width, h = disp.height;
  const size_t n = disp.size();
  grad = ScalarGrid(w, h, 0.0);
  LossBreakdown out;

  // Photometric: mean over pixels of pe(left, warp(right, disp)).
  Image drecon_ddisp;
  Image recon = reconstruct_left_from_right(right, disp, &drecon_ddisp);
  ScalarGrid pe = photometric_error_map(left, recon, cfg.photometric);
  double pe_sum = 0;
  for (double v : pe.data) pe_sum += v;
  out.photometric = pe_sum / static_cast<double>(n);

  ScalarGrid weight(w, h, 1.0 / static_cast<double>(n));
  Image grad_recon;
  photometric_error_backward(left, recon, weight, cfg.photometric, grad_recon);
  // recon(p) depends on disp only at p: contract channels on the spot.
  for (size_t c = 0; c < grad_recon.size(); ++c)
    for (size_t i = 0; i < n; ++i) grad.data[i] += grad_recon[c].data[i] * drecon_ddisp[c].data[i];

  // Edge-aware smoothness on the left image.
  ScalarGrid grad_smooth;
  out.smoothness = smoothness_loss_and_grad(disp, left, grad_smooth);
  for (size_t i = 0; i < n; ++i) grad.data[i] += cfg.lambda_smooth * grad_smooth.data[i];

  // Patch triplet on lifted disparity features. The module reports a
  // per-anchor mean; here it is folded in as (sum of anchor terms) / N so
  // its per-pixel gradient lives on the same 1/N scale as the photometric
  // mean — otherwise lambda_triplet would have to absorb a factor of
  // N / |anchors| that changes with the scene.
  if (cfg.lambda_triplet != 0.0) {
    Image feats = lift_disparity(disp, cfg.lift);
    Image grad_feats;
    TripletResult tr = triplet_loss_and_grad(feats, labels, cfg.triplet, grad_feats);
    const double to_pixel_mean = static_cast<double>(tr.anchor_count) / static_cast<double>(n);
    out.triplet = tr.loss * to_pixel_mean;
    out.triplet_anchors = tr.anchor_count;
    ScalarGrid grad_tri = lift_backward(disp, grad_feats, cfg.lift);
    for (size_t i = 0; i < n; ++i)
      grad.data[i] += cfg.lambda_triplet * to_pixel_mean * grad_tri.data[i];
  }

  out.total = out.photometric + cfg.lambda_smooth * out.smoothness +
              cfg.lambda_triplet * out.triplet;
  return out;
}

OptResult run_descent(const Image& left, const Image& right, const ScalarGrid& labels,
                      const ScalarGrid& init, const OptConfig& cfg,
                      const std::function<void(int, const ScalarGrid&)>& snapshot) {
  require(cfg.steps >= 0, "run_descent: steps must be >= 0");
  require(cfg.d_min < cfg.d_max, "run_descent: need d_min < d_max");

  OptResult res;
  res.disparity = init;
  const double step_gain =
      cfg.lr * cfg.step_scale * static_cast<double>(init.size());

  ScalarGrid grad;
  for (int t = 0; t <= cfg.steps; ++t) {
    // Guard before evaluating: warping a non-finite disparity is undefined.
    for (double v : res.disparity.data)
      if (!std::isfinite(v)) {
        res.diverged = true;
        return res;
      }
    LossBreakdown lb = total_loss_and_grad(left, right, labels, res.disparity, cfg.loss, grad);
    res.history.push_back({t, lb.total, lb.photometric, lb.smoothness, lb.triplet});
    if (!std::isfinite(lb.total)) {
      res.diverged = true;
      return res;
    }
    if (snapshot && cfg.snapshot_every > 0 && (t % cfg.snapshot_every == 0 || t == cfg.steps))
      snapshot(t, res.disparity);
    if (t == cfg.steps) break;

    for (size_t i = 0; i < grad.size(); ++i) {
      double d = res.disparity.data[i] - step_gain * grad.data[i];
      res.disparity.data[i] = std::clamp(d, cfg.d_min, cfg.d_max);
    }
  }
  return res;
}

std::vector<double> make_candidates(double lo, double hi, double step) {
  require(step > 0 && hi >= lo, "make_candidates: need step > 0 and hi >= lo");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + step * 0.5) break;
    out.push_back(v);
  }
  return out;
}

ScalarGrid profile_argmin(const Image& left, const Image& right,
                          const std::vector<double>& candidates,
                          const PhotometricConfig& cfg) {
  require_image(left, "profile_argmin");
  require(!candidates.empty(), "profile_argmin: no candidates");
  const int w = left[0].width, h = left[0].height;
  ScalarGrid best_err(w, h, std::numeric_limits<double>::infinity());
  ScalarGrid best_d(w, h, candidates.front());
  ScalarGrid flat(w, h, 0.0);
  for (double d : candidates) {
    flat.fill(d);
    Image recon = reconstruct_left_from_right(right, flat);
    ScalarGrid pe = photometric_error_map(left, recon, cfg);
    for (size_t i = 0; i < pe.size(); ++i)
      if (pe.data[i] < best_err.data[i]) {
        best_err.data[i] = pe.data[i];
        best_d.data[i] = d;
      }
  }
  return best_d;
}

std::vector<ProfilePoint> photometric_profile(const Image& left, const Image& right, int x, int y,
                                              const std::vector<double>& candidates,
                                              const PhotometricConfig& cfg) {
  require_image(left, "photometric_profile");
  require(!candidates.empty(), "photometric_profile: no candidates");
  require(x >= 0 && x < left[0].width && y >= 0 && y < left[0].height,
          "photometric_profile: pixel outside the image");
  std::vector<ProfilePoint> out;
  out.reserve(candidates.size());
  ScalarGrid flat(left[0].width, left[0].height, 0.0);
  for (double d : candidates) {
    flat.fill(d);
    Image recon = reconstruct_left_from_right(right, flat);
    ScalarGrid pe = photometric_error_map(left, recon, cfg);
    out.push_back({d, pe.at(x, y)});
  }
  return out;
}

FatteningReport fattening_report(const ScalarGrid& disp, const StereoScene& scene) {
  require_same_shape(disp, scene.gt_disparity, "fattening_report");
  const double d_bg = scene.config.d_bg, d_fg = scene.config.d_fg;
  const double mid = 0.5 * (d_bg + d_fg);

  FatteningReport rep;
  rep.leak_width.assign(scene.config.fg_h, 0);
  int band_n = 0, band_at_fg = 0, band_fat = 0, bg_n = 0, bg_ok = 0;
  double band_sum = 0;
  for (int y = 0; y < disp.height; ++y)
    for (int x = 0; x < disp.width; ++x) {
      const double d = disp.at(x, y);
      if (scene.band_mask.at(x, y) == 1.0) {
        ++band_n;
        band_sum += d;
        if (std::abs(d - d_fg) <= 0.5) ++band_at_fg;
        if (d > mid) {
          ++band_fat;
          ++rep.leak_width[y - scene.config.fg_y];
        }
      } else if (scene.fg_mask.at(x, y) == 0.0 && scene.occluded_mask.at(x, y) == 0.0) {
        ++bg_n;
        if (std::abs(d - d_bg) <= 0.5) ++bg_ok;
      }
    }
  require(band_n > 0 && bg_n > 0, "fattening_report: scene has no band/background");
  rep.band_at_fg = static_cast<double>(band_at_fg) / band_n;
  rep.band_fattened = static_cast<double>(band_fat) / band_n;
  rep.bg_at_bg = static_cast<double>(bg_ok) / bg_n;
  rep.mean_band = band_sum / band_n;
  return rep;
}

}  // namespace depthlab
