#include "depthlab/photometric.hpp"

#include <cmath>

namespace depthlab {
namespace {

constexpr double kInv9 = 1.0 / 9.0;

double sign0(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

struct WindowMoments {
  double mu_a, mu_b, var_a, var_b, cov;
};

WindowMoments window_moments(const ScalarGrid& a, const ScalarGrid& b, int x, int y) {
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    const int yy = reflect101(y + dy, a.height);
    for (int dx = -1; dx <= 1; ++dx) {
      const int xx = reflect101(x + dx, a.width);
      const double va = a.at(xx, yy), vb = b.at(xx, yy);
      sa += va;
      sb += vb;
      saa += va * va;
      sbb += vb * vb;
      sab += va * vb;
    }
  }
  WindowMoments m;
  m.mu_a = sa * kInv9;
  m.mu_b = sb * kInv9;
  m.var_a = saa * kInv9 - m.mu_a * m.mu_a;
  m.var_b = sbb * kInv9 - m.mu_b * m.mu_b;
  m.cov = sab * kInv9 - m.mu_a * m.mu_b;
  return m;
}

}  // namespace

int reflect101(int i, int n) {
  require(n >= 2, "reflect101: need n >= 2");
  const int period = 2 * n - 2;
  i = ((i % period) + period) % period;
  return i < n ? i : period - i;
}

ScalarGrid ssim_map(const ScalarGrid& a, const ScalarGrid& b, double c1, double c2) {
  require_same_shape(a, b, "ssim_map");
  require(a.width >= 2 && a.height >= 2, "ssim_map: need at least 2x2");
  ScalarGrid out(a.width, a.height);
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      const WindowMoments m = window_moments(a, b, x, y);
      const double n1 = 2 * m.mu_a * m.mu_b + c1;
      const double d1 = m.mu_a * m.mu_a + m.mu_b * m.mu_b + c1;
      const double n2 = 2 * m.cov + c2;
      const double d2 = m.var_a + m.var_b + c2;
      out.at(x, y) = (n1 * n2) / (d1 * d2);
    }
  return out;
}

ScalarGrid photometric_error_map(const Image& a, const Image& b, const PhotometricConfig& cfg) {
  require_image(a, "photometric_error_map");
  require_image(b, "photometric_error_map");
  require(a.size() == b.size(), "photometric_error_map: channel count mismatch");
  require_same_shape(a[0], b[0], "photometric_error_map");

  const size_t n = a[0].size();
  const double inv_c = 1.0 / static_cast<double>(a.size());
  ScalarGrid ssim_acc(a[0].width, a[0].height, 0.0);
  for (size_t c = 0; c < a.size(); ++c) {
    ScalarGrid s = ssim_map(a[c], b[c], cfg.c1, cfg.c2);
    for (size_t i = 0; i < n; ++i) ssim_acc.data[i] += s.data[i];
  }
  ScalarGrid pe(a[0].width, a[0].height);
  for (size_t i = 0; i < n; ++i) {
    const double ssim = ssim_acc.data[i] * inv_c;
    double l1sum = 0;
    for (size_t c = 0; c < a.size(); ++c) l1sum += std::abs(a[c].data[i] - b[c].data[i]);
    pe.data[i] = cfg.alpha * 0.5 * (1.0 - ssim) + (1.0 - cfg.alpha) * l1sum * inv_c;
  }
  return pe;
}

void photometric_error_backward(const Image& a, const Image& b, const ScalarGrid& weight,
                                const PhotometricConfig& cfg, Image& grad_b) {
  require_image(a, "photometric_error_backward");
  require_image(b, "photometric_error_backward");
  require(a.size() == b.size(), "photometric_error_backward: channel count mismatch");
  require_same_shape(a[0], b[0], "photometric_error_backward");
  require_same_shape(a[0], weight, "photometric_error_backward");

  const int w = a[0].width, h = a[0].height;
  const double inv_c = 1.0 / static_cast<double>(a.size());
  grad_b = Image(a.size(), ScalarGrid(w, h, 0.0));

  for (size_t c = 0; c < a.size(); ++c) {
    const ScalarGrid& ac = a[c];
    const ScalarGrid& bc = b[c];
    ScalarGrid& gc = grad_b[c];

    // L1 term: local, sign convention sign(0) = 0.
    for (size_t i = 0; i < ac.size(); ++i)
      gc.data[i] += weight.data[i] * (1.0 - cfg.alpha) * inv_c * sign0(bc.data[i] - ac.data[i]);

    // SSIM term: each window centered at q spreads gradient to its 9
    // (possibly reflected, possibly repeated) taps.
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const WindowMoments m = window_moments(ac, bc, x, y);
        const double n1 = 2 * m.mu_a * m.mu_b + cfg.c1;
        const double d1 = m.mu_a * m.mu_a + m.mu_b * m.mu_b + cfg.c1;
        const double n2 = 2 * m.cov + cfg.c2;
        const double d2 = m.var_a + m.var_b + cfg.c2;
        const double coef_mu = 2 * n2 * (m.mu_a * d1 - m.mu_b * n1) / (d1 * d1 * d2);
        const double coef_b = -2 * n1 * n2 / (d1 * d2 * d2);
        const double coef_a = 2 * n1 / (d1 * d2);
        // d(sum w*pe)/dS(q) = -alpha/2 * inv_c * weight(q)
        const double up = -0.5 * cfg.alpha * inv_c * weight.at(x, y) * kInv9;
        for (int dy = -1; dy <= 1; ++dy) {
          const int yy = reflect101(y + dy, h);
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = reflect101(x + dx, w);
            const double br = bc.at(xx, yy), ar = ac.at(xx, yy);
            gc.at(xx, yy) += up * (coef_mu + coef_b * (br - m.mu_b) + coef_a * (ar - m.mu_a));
          }
        }
      }
  }
}

namespace {

// Shared forward pass; optionally fills the gradient w.r.t. normalized
// disparity d* (caller chains through the mean).
double smoothness_impl(const ScalarGrid& disp, const Image& img, ScalarGrid* gstar) {
  require_image(img, "smoothness");
  require_same_shape(disp, img[0], "smoothness");
  double mean = 0;
  for (double v : disp.data) mean += v;
  mean /= static_cast<double>(disp.size());
  require(mean > 0, "smoothness: disparity mean must be positive");

  const int w = disp.width, h = disp.height;
  const double nx = static_cast<double>(h) * (w - 1);
  const double ny = static_cast<double>(h - 1) * w;
  double loss = 0;
  if (gstar) *gstar = ScalarGrid(w, h, 0.0);

  for (int y = 0; y < h; ++y)
    for (int x = 0; x + 1 < w; ++x) {
      const double diff = (disp.at(x + 1, y) - disp.at(x, y)) / mean;
      double gi = 0;
      for (const auto& ch : img) gi += std::abs(ch.at(x + 1, y) - ch.at(x, y));
      const double e = std::exp(-gi / static_cast<double>(img.size()));
      loss += std::abs(diff) * e / nx;
      if (gstar) {
        const double s = sign0(diff) * e / nx;
        gstar->at(x + 1, y) += s;
        gstar->at(x, y) -= s;
      }
    }
  for (int y = 0; y + 1 < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double diff = (disp.at(x, y + 1) - disp.at(x, y)) / mean;
      double gi = 0;
      for (const auto& ch : img) gi += std::abs(ch.at(x, y + 1) - ch.at(x, y));
      const double e = std::exp(-gi / static_cast<double>(img.size()));
      loss += std::abs(diff) * e / ny;
      if (gstar) {
        const double s = sign0(diff) * e / ny;
        gstar->at(x, y + 1) += s;
        gstar->at(x, y) -= s;
      }
    }
  // gstar currently holds d loss / d d*(i); translate to disp below.
  if (gstar) {
    const double n = static_cast<double>(disp.size());
    double dot = 0;
    for (size_t i = 0; i < disp.size(); ++i) dot += gstar->data[i] * disp.data[i];
    for (size_t i = 0; i < disp.size(); ++i)
      gstar->data[i] = gstar->data[i] / mean - dot / (mean * mean * n);
  }
  return loss;
}

}  // namespace

double smoothness_loss(const ScalarGrid& disp, const Image& img) {
  return smoothness_impl(disp, img, nullptr);
}

double smoothness_loss_and_grad(const ScalarGrid& disp, const Image& img, ScalarGrid& grad) {
  return smoothness_impl(disp, img, &grad);
}

}  // namespace depthlab
