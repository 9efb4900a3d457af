#include "depthlab/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace depthlab {
namespace {

double median(std::vector<double> v) {
  const size_t n = v.size();
  auto mid = v.begin() + n / 2;
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

MetricSet compute_metrics(const ScalarGrid& pred, const ScalarGrid& gt, const ScalarGrid& valid,
                          const MetricsConfig& cfg) {
  require_same_shape(pred, gt, "compute_metrics");
  require_same_shape(pred, valid, "compute_metrics");
  require(cfg.cap > 0 && cfg.pred_floor > 0 && cfg.pred_floor < cfg.cap,
          "compute_metrics: need 0 < pred_floor < cap");

  std::vector<double> p, g;
  for (size_t i = 0; i < gt.size(); ++i) {
    if (valid.data[i] == 0.0) continue;
    require(gt.data[i] > 0, "compute_metrics: ground truth must be positive on valid pixels");
    if (gt.data[i] > cfg.cap) continue;
    p.push_back(pred.data[i]);
    g.push_back(gt.data[i]);
  }
  require(!p.empty(), "compute_metrics: no valid pixels under the cap");

  if (cfg.median_scale) {
    const double s = median(g) / median(p);
    for (double& v : p) v *= s;
  }
  for (double& v : p) v = std::clamp(v, cfg.pred_floor, cfg.cap);

  MetricSet m;
  const double thr1 = 1.25, thr2 = 1.25 * 1.25, thr3 = 1.25 * 1.25 * 1.25;
  size_t n1 = 0, n2 = 0, n3 = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double diff = p[i] - g[i];
    m.abs_rel += std::abs(diff) / g[i];
    m.sq_rel += diff * diff / g[i];
    m.rmse += diff * diff;
    const double dl = std::log(p[i]) - std::log(g[i]);
    m.rmse_log += dl * dl;
    const double ratio = std::max(p[i] / g[i], g[i] / p[i]);
    n1 += ratio < thr1;
    n2 += ratio < thr2;
    n3 += ratio < thr3;
  }
  const double n = static_cast<double>(p.size());
  m.abs_rel /= n;
  m.sq_rel /= n;
  m.rmse = std::sqrt(m.rmse / n);
  m.rmse_log = std::sqrt(m.rmse_log / n);
  m.delta1 = static_cast<double>(n1) / n;
  m.delta2 = static_cast<double>(n2) / n;
  m.delta3 = static_cast<double>(n3) / n;
  return m;
}

MetricSet mean_metrics(const std::vector<MetricSet>& sets) {
  require(!sets.empty(), "mean_metrics: empty batch");
  MetricSet m;
  for (const auto& s : sets) {
    m.abs_rel += s.abs_rel;
    m.sq_rel += s.sq_rel;
    m.rmse += s.rmse;
    m.rmse_log += s.rmse_log;
    m.delta1 += s.delta1;
    m.delta2 += s.delta2;
    m.delta3 += s.delta3;
  }
  const double n = static_cast<double>(sets.size());
  m.abs_rel /= n;
  m.sq_rel /= n;
  m.rmse /= n;
  m.rmse_log /= n;
  m.delta1 /= n;
  m.delta2 /= n;
  m.delta3 /= n;
  return m;
}

}  // namespace depthlab
