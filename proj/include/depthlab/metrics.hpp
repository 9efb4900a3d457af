#pragma once

#include <vector>

#include "depthlab/grid.hpp"

namespace depthlab {

/// The seven standard depth-evaluation numbers. Errors first, accuracies
/// last; delta1 <= delta2 <= delta3 always (nested thresholds).
struct MetricSet {
  double abs_rel = 0;   // mean |p - g| / g
  double sq_rel = 0;    // mean (p - g)^2 / g
  double rmse = 0;      // sqrt(mean (p - g)^2)
  double rmse_log = 0;  // sqrt(mean (ln p - ln g)^2)
  double delta1 = 0;    // fraction with max(p/g, g/p) < 1.25
  double delta2 = 0;    // ... < 1.25^2
  double delta3 = 0;    // ... < 1.25^3
};

struct MetricsConfig {
  double cap = 80.0;         // pixels with deeper ground truth are ignored
  double pred_floor = 1e-3;  // predictions clamp into [pred_floor, cap]
  /// Rescale predictions by median(gt)/median(pred) over the evaluated
  /// pixels before clamping — the usual fix when predictions carry an
  /// arbitrary global scale. Median of an even count is the average of the
  /// two middle order statistics.
  bool median_scale = false;
};

/// Evaluate pred against gt over pixels where valid != 0 and gt <= cap.
/// gt must be strictly positive on valid pixels, and at least one valid
/// pixel must survive the cap.
MetricSet compute_metrics(const ScalarGrid& pred, const ScalarGrid& gt, const ScalarGrid& valid,
                          const MetricsConfig& cfg = {});

/// Arithmetic per-field mean — the batch convention: metrics per image
/// first, then averaged.
MetricSet mean_metrics(const std::vector<MetricSet>& sets);

}  // namespace depthlab
