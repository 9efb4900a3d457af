#pragma once

#include <vector>

#include "depthlab/grid.hpp"

namespace depthlab {

/// Patch-based triplet loss over per-pixel feature vectors and a label map.
///
/// For each pixel p, the positives are the same-label pixels and the
/// negatives the different-label pixels inside a patch_size x patch_size
/// window centered on p (clipped at image borders, anchor excluded). p is an
/// anchor iff both counts strictly exceed min_count. Distances are squared
/// Euclidean between l2-normalized features.
struct TripletConfig {
  int patch_size = 5;
  int min_count = 4;
  double margin = 0.3;           // standard-mode hinge margin
  double margin_isolated = 0.65; // isolated-mode margin on the negative term

  /// How the negative distance summary D- is formed over the patch:
  /// mean over all negatives, or the single hardest (smallest) one.
  enum class NegativeMode { mean, min } negative_mode = NegativeMode::mean;

  /// standard: per-anchor [D+ - D- + margin]_+
  /// isolated: per-anchor D+ + [margin_isolated - D-]_+, decoupling the
  /// positive pull from the negative push.
  enum class LossMode { standard, isolated } loss_mode = LossMode::standard;
};

struct AnchorStats {
  int x = 0, y = 0;
  double d_pos = 0;     // positive summary (mean of squared distances)
  double d_neg = 0;     // negative summary per negative_mode
  double neg_gap = 0;   // min mode: runner-up minus min (kink diagnostics)
  int pos_count = 0;
  int neg_count = 0;
};

struct TripletResult {
  double loss = 0;
  int anchor_count = 0;
  std::vector<AnchorStats> anchors;  // in row-major anchor order
};

/// features: C-channel image, one C-vector per pixel (pre-normalization).
/// labels: grid of integer-valued doubles, compared for exact equality.
TripletResult triplet_loss(const Image& features, const ScalarGrid& labels,
                           const TripletConfig& cfg);

/// Same, plus d(loss)/d(features) — the gradient w.r.t. the *raw* features,
/// chained through the l2 normalization. Subgradient conventions: hinges at
/// exactly 0 pass nothing; in min mode ties send gradient to the first
/// minimal negative in scan order.
TripletResult triplet_loss_and_grad(const Image& features, const ScalarGrid& labels,
                                    const TripletConfig& cfg, Image& grad_features);

/// Per-pixel v / max(||v||, eps) with eps = 1e-8: exact on unit vectors,
/// smoothly rescaled near zero.
Image l2_normalize(const Image& raw);

/// Pull a gradient w.r.t. the normalized features back to the raw ones.
Image l2_normalize_backward(const Image& raw, const Image& grad_normalized);

/// Embedding of scalar disparity onto the unit circle:
/// f(d) = (cos t, sin t), t = pi * (d - d_lo) / (d_hi - d_lo).
/// Squared feature distance is strictly increasing in |d1 - d2| up to a
/// separation of d_hi - d_lo and spans [0, 4] — wide enough that margin
/// hinges genuinely activate and deactivate. With the default span of 10,
/// the reference scene's planes (5 and 10 px) land 2.0 apart: far enough
/// that ground-truth-separated pixels read as easy negatives, while a pixel
/// drifting toward the other plane becomes a hard one.
struct DisparityFeatureConfig {
  double d_lo = 1.0;
  double d_hi = 11.0;
};

Image lift_disparity(const ScalarGrid& disp, const DisparityFeatureConfig& cfg);

/// Chain per-pixel feature gradients back to the disparity.
ScalarGrid lift_backward(const ScalarGrid& disp, const Image& grad_features,
                         const DisparityFeatureConfig& cfg);

}  // namespace depthlab
