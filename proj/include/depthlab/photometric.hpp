#pragma once

#include "depthlab/grid.hpp"

namespace depthlab {

/// Weights of the photometric error: pe = alpha/2 * (1 - SSIM) + (1 - alpha) * L1.
/// SSIM uses a uniform 3x3 window with reflect-101 borders and stabilizers
/// c1, c2 on images in [0, 1].
struct PhotometricConfig {
  double alpha = 0.85;
  double c1 = 1e-4;
  double c2 = 9e-4;
};

/// Mirror index with the border sample not repeated (..2 1 | 0 1 2.. for n=3).
int reflect101(int i, int n);

/// Per-pixel SSIM between two single-channel images (3x3 uniform window,
/// reflect-101). Requires both dimensions >= 2.
ScalarGrid ssim_map(const ScalarGrid& a, const ScalarGrid& b, double c1, double c2);

/// Per-pixel photometric error between target a and reconstruction b; both
/// SSIM and L1 terms are averaged over channels.
ScalarGrid photometric_error_map(const Image& a, const Image& b,
                                 const PhotometricConfig& cfg = {});

/// Gradient of sum_p weight(p) * pe(p) with respect to the reconstruction b.
/// grad_b is resized/zeroed to match b. The SSIM term scatters through every
/// 3x3 window containing the pixel, including reflected border taps.
void photometric_error_backward(const Image& a, const Image& b, const ScalarGrid& weight,
                                const PhotometricConfig& cfg, Image& grad_b);

/// Edge-aware first-order smoothness of mean-normalized disparity:
/// mean over x-edges of |dx d*| exp(-|dx I|) plus the same over y-edges,
/// where |dx I| is averaged over image channels. Scale-invariant in disp.
double smoothness_loss(const ScalarGrid& disp, const Image& img);

/// Same value; also writes the gradient w.r.t. disp (including the coupling
/// through the normalizing mean) into grad (resized/zeroed here).
double smoothness_loss_and_grad(const ScalarGrid& disp, const Image& img, ScalarGrid& grad);

}  // namespace depthlab
