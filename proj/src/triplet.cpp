#include "depthlab/triplet.hpp"

#include <cmath>
#include <limits>

namespace depthlab {
namespace {

constexpr double kNormEps = 1e-8;
constexpr double kPi = 3.14159265358979323846;

double sq_dist(const Image& f, size_t i, size_t j) {
  double s = 0;
  for (const auto& ch : f) {
    const double d = ch.data[i] - ch.data[j];
    s += d * d;
  }
  return s;
}

void check_triplet_inputs(const Image& features, const ScalarGrid& labels,
                          const TripletConfig& cfg, const char* who) {
  require_image(features, who);
  require_same_shape(features[0], labels, who);
  require(cfg.patch_size >= 3 && cfg.patch_size % 2 == 1,
          std::string(who) + ": patch_size must be odd and >= 3");
  require(cfg.min_count >= 0, std::string(who) + ": min_count must be >= 0");
}

struct Patch {
  // indices into the flat grid, split by label agreement with the anchor
  std::vector<size_t> pos, neg;
};

void gather_patch(const ScalarGrid& labels, int x, int y, int r, Patch& out) {
  out.pos.clear();
  out.neg.clear();
  const double lab = labels.at(x, y);
  const int y0 = std::max(0, y - r), y1 = std::min(labels.height - 1, y + r);
  const int x0 = std::max(0, x - r), x1 = std::min(labels.width - 1, x + r);
  for (int yy = y0; yy <= y1; ++yy)
    for (int xx = x0; xx <= x1; ++xx) {
      if (xx == x && yy == y) continue;
      const size_t i = labels.idx(xx, yy);
      (labels.data[i] == lab ? out.pos : out.neg).push_back(i);
    }
}

}  // namespace

Image l2_normalize(const Image& raw) {
  require_image(raw, "l2_normalize");
  Image out = raw;
  const size_t n = raw[0].size();
  for (size_t i = 0; i < n; ++i) {
    double nn = 0;
    for (const auto& ch : raw) nn += ch.data[i] * ch.data[i];
    const double s = std::max(std::sqrt(nn), kNormEps);
    for (size_t c = 0; c < raw.size(); ++c) out[c].data[i] = raw[c].data[i] / s;
  }
  return out;
}

Image l2_normalize_backward(const Image& raw, const Image& grad_normalized) {
  require_image(raw, "l2_normalize_backward");
  require_image(grad_normalized, "l2_normalize_backward");
  require(raw.size() == grad_normalized.size(), "l2_normalize_backward: channel mismatch");
  require_same_shape(raw[0], grad_normalized[0], "l2_normalize_backward");

  Image out(raw.size(), ScalarGrid(raw[0].width, raw[0].height, 0.0));
  const size_t n = raw[0].size();
  for (size_t i = 0; i < n; ++i) {
    double nn = 0, dot = 0;
    for (size_t c = 0; c < raw.size(); ++c) nn += raw[c].data[i] * raw[c].data[i];
    const double norm = std::sqrt(nn);
    if (norm <= kNormEps) {
      // flat scaling region: d(v/eps)/dv = I/eps
      for (size_t c = 0; c < raw.size(); ++c) out[c].data[i] = grad_normalized[c].data[i] / kNormEps;
      continue;
    }
    for (size_t c = 0; c < raw.size(); ++c) dot += grad_normalized[c].data[i] * raw[c].data[i];
    const double inv = 1.0 / norm;
    // J^T g = g/||v|| - (g.v) v / ||v||^3
    for (size_t c = 0; c < raw.size(); ++c)
      out[c].data[i] = grad_normalized[c].data[i] * inv - dot * raw[c].data[i] * inv * inv * inv;
  }
  return out;
}

namespace {

TripletResult triplet_impl(const Image& features, const ScalarGrid& labels,
                           const TripletConfig& cfg, Image* grad_out) {
  check_triplet_inputs(features, labels, cfg, "triplet_loss");
  const Image nf = l2_normalize(features);
  const int w = labels.width, h = labels.height, r = cfg.patch_size / 2;
  const size_t nch = features.size();

  Image gn;  // gradient w.r.t. normalized features, unscaled
  if (grad_out) gn = Image(nch, ScalarGrid(w, h, 0.0));

  TripletResult res;
  double loss_sum = 0;
  Patch patch;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      gather_patch(labels, x, y, r, patch);
      if (static_cast<int>(patch.pos.size()) <= cfg.min_count ||
          static_cast<int>(patch.neg.size()) <= cfg.min_count)
        continue;

      const size_t p = labels.idx(x, y);
      double d_pos = 0;
      for (size_t q : patch.pos) d_pos += sq_dist(nf, p, q);
      d_pos /= static_cast<double>(patch.pos.size());

      double d_neg;
      size_t min_q = patch.neg.front();
      double min_d = std::numeric_limits<double>::infinity();
      double second = std::numeric_limits<double>::infinity();
      if (cfg.negative_mode == TripletConfig::NegativeMode::min) {
        for (size_t q : patch.neg) {
          const double d = sq_dist(nf, p, q);
          if (d < min_d) {
            second = min_d;
            min_d = d;
            min_q = q;
          } else if (d < second) {
            second = d;
          }
        }
        d_neg = min_d;
      } else {
        double s = 0;
        for (size_t q : patch.neg) s += sq_dist(nf, p, q);
        d_neg = s / static_cast<double>(patch.neg.size());
      }

      double anchor_loss;
      double w_pos, w_neg;  // dL/dD+ and dL/dD- for this anchor
      if (cfg.loss_mode == TripletConfig::LossMode::standard) {
        const double hinge = d_pos - d_neg + cfg.margin;
        anchor_loss = std::max(hinge, 0.0);
        w_pos = hinge > 0 ? 1.0 : 0.0;
        w_neg = hinge > 0 ? -1.0 : 0.0;
      } else {
        const double hinge = cfg.margin_isolated - d_neg;
        anchor_loss = d_pos + std::max(hinge, 0.0);
        w_pos = 1.0;
        w_neg = hinge > 0 ? -1.0 : 0.0;
      }
      loss_sum += anchor_loss;

      AnchorStats st;
      st.x = x;
      st.y = y;
      st.d_pos = d_pos;
      st.d_neg = d_neg;
      st.neg_gap = (cfg.negative_mode == TripletConfig::NegativeMode::min)
                       ? second - min_d
                       : std::numeric_limits<double>::infinity();
      st.pos_count = static_cast<int>(patch.pos.size());
      st.neg_count = static_cast<int>(patch.neg.size());
      res.anchors.push_back(st);

      if (!grad_out) continue;

      // d(sq_dist(p,q))/d nf_p = 2 (nf_p - nf_q); opposite sign for q.
      if (w_pos != 0.0) {
        const double scale = 2.0 * w_pos / static_cast<double>(patch.pos.size());
        for (size_t q : patch.pos)
          for (size_t c = 0; c < nch; ++c) {
            const double diff = nf[c].data[p] - nf[c].data[q];
            gn[c].data[p] += scale * diff;
            gn[c].data[q] -= scale * diff;
          }
      }
      if (w_neg != 0.0) {
        if (cfg.negative_mode == TripletConfig::NegativeMode::min) {
          for (size_t c = 0; c < nch; ++c) {
            const double diff = nf[c].data[p] - nf[c].data[min_q];
            gn[c].data[p] += 2.0 * w_neg * diff;
            gn[c].data[min_q] -= 2.0 * w_neg * diff;
          }
        } else {
          const double scale = 2.0 * w_neg / static_cast<double>(patch.neg.size());
          for (size_t q : patch.neg)
            for (size_t c = 0; c < nch; ++c) {
              const double diff = nf[c].data[p] - nf[c].data[q];
              gn[c].data[p] += scale * diff;
              gn[c].data[q] -= scale * diff;
            }
        }
      }
    }

  res.anchor_count = static_cast<int>(res.anchors.size());
  res.loss = res.anchor_count ? loss_sum / res.anchor_count : 0.0;
  if (grad_out) {
    if (res.anchor_count) {
      const double inv = 1.0 / res.anchor_count;
      for (auto& ch : gn)
        for (auto& v : ch.data) v *= inv;
      *grad_out = l2_normalize_backward(features, gn);
    } else {
      *grad_out = Image(nch, ScalarGrid(w, h, 0.0));
    }
  }
  return res;
}

}  // namespace

TripletResult triplet_loss(const Image& features, const ScalarGrid& labels,
                           const TripletConfig& cfg) {
  return triplet_impl(features, labels, cfg, nullptr);
}

TripletResult triplet_loss_and_grad(const Image& features, const ScalarGrid& labels,
                                    const TripletConfig& cfg, Image& grad_features) {
  return triplet_impl(features, labels, cfg, &grad_features);
}

Image lift_disparity(const ScalarGrid& disp, const DisparityFeatureConfig& cfg) {
  require(cfg.d_hi > cfg.d_lo, "lift_disparity: need d_hi > d_lo");
  Image out(2, ScalarGrid(disp.width, disp.height));
  const double k = kPi / (cfg.d_hi - cfg.d_lo);
  for (size_t i = 0; i < disp.size(); ++i) {
    const double t = k * (disp.data[i] - cfg.d_lo);
    out[0].data[i] = std::cos(t);
    out[1].data[i] = std::sin(t);
  }
  return out;
}

ScalarGrid lift_backward(const ScalarGrid& disp, const Image& grad_features,
                         const DisparityFeatureConfig& cfg) {
  require(cfg.d_hi > cfg.d_lo, "lift_backward: need d_hi > d_lo");
  require(grad_features.size() == 2, "lift_backward: expected 2 feature channels");
  require_same_shape(disp, grad_features[0], "lift_backward");
  ScalarGrid out(disp.width, disp.height);
  const double k = kPi / (cfg.d_hi - cfg.d_lo);
  for (size_t i = 0; i < disp.size(); ++i) {
    const double t = k * (disp.data[i] - cfg.d_lo);
    out.data[i] = k * (-std::sin(t) * grad_features[0].data[i] +
                       std::cos(t) * grad_features[1].data[i]);
  }
  return out;
}

}  // namespace depthlab
