#pragma once

#include "gscodec/render.h"

namespace gsc {

constexpr double kPsnrCap = 99.0;

double meanSquaredError(const ImageBuffer &a, const ImageBuffer &b);

// 10 log10(1 / MSE) for images in [0, 1], capped for (near-)identical images.
double psnr(const ImageBuffer &a, const ImageBuffer &b);

// Mean SSIM over the valid region and the three channels, 11x11 Gaussian
// window (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1.
double ssim(const ImageBuffer &a, const ImageBuffer &b);

}  // namespace gsc
