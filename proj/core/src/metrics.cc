#include "gscodec/metrics.h"

#include <array>
#include <cmath>
#include <string>

#include "gscodec/error.h"
#include "gscodec/parallel.h"

namespace gsc {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 0.01);
constexpr double kC2 = (0.03 * 0.03);

void checkPair(const ImageBuffer &a, const ImageBuffer &b) {
  if (a.width != b.width || a.height != b.height || a.pixels.size() != b.pixels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "images differ in size: " + std::to_string(a.width) + "x" +
                                                   std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                                                   std::to_string(b.height));
  }
  if (a.pixels.empty()) throw Error(ErrorCode::kInvalidArgument, "images are empty");
}

std::array<double, kWindow> gaussianWindow() {
  std::array<double, kWindow> w;
  double sum = 0.0;
  for (int k = 0; k < kWindow; ++k) {
    const double d = k - kWindow / 2;
    w[k] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += w[k];
  }
  for (double &v : w) v /= sum;
  return w;
}

}  // namespace

double meanSquaredError(const ImageBuffer &a, const ImageBuffer &b) {
  checkPair(a, b);
  // Row partial sums reduced in row order keep the result thread-independent.
  std::vector<double> rows(a.height, 0.0);
  const std::size_t stride = std::size_t(a.width) * 3;
  parallelFor(0, a.height, 16, [&](std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y) {
      double s = 0.0;
      for (std::size_t k = y * stride; k < (y + 1) * stride; ++k) {
        const double d = double(a.pixels[k]) - double(b.pixels[k]);
        s += d * d;
      }
      rows[y] = s;
    }
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total / double(a.pixels.size());
}

double psnr(const ImageBuffer &a, const ImageBuffer &b) {
  const double mse = meanSquaredError(a, b);
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImageBuffer &a, const ImageBuffer &b) {
  checkPair(a, b);
  if (a.width < kWindow || a.height < kWindow) {
    throw Error(ErrorCode::kInvalidArgument, "SSIM needs images of at least 11x11 pixels");
  }
  const auto w = gaussianWindow();
  const int W = a.width, H = a.height;
  const int outW = W - kWindow + 1, outH = H - kWindow + 1;
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    // Horizontal pass of x, y, x^2, y^2, xy.
    std::vector<std::array<double, 5>> horiz(std::size_t(outW) * H);
    parallelFor(0, H, 16, [&](std::size_t begin, std::size_t end) {
      for (std::size_t y = begin; y < end; ++y) {
        for (int x = 0; x < outW; ++x) {
          std::array<double, 5> acc = {0, 0, 0, 0, 0};
          for (int k = 0; k < kWindow; ++k) {
            const double u = a.at(x + k, int(y), c), v = b.at(x + k, int(y), c);
            acc[0] += w[k] * u;
            acc[1] += w[k] * v;
            acc[2] += w[k] * u * u;
            acc[3] += w[k] * v * v;
            acc[4] += w[k] * (u * v);  // symmetric in (a, b)
          }
          horiz[y * outW + x] = acc;
        }
      }
    });
    std::vector<double> rows(outH, 0.0);
    parallelFor(0, outH, 16, [&](std::size_t begin, std::size_t end) {
      for (std::size_t y = begin; y < end; ++y) {
        double rowSum = 0.0;
        for (int x = 0; x < outW; ++x) {
          std::array<double, 5> m = {0, 0, 0, 0, 0};
          for (int k = 0; k < kWindow; ++k) {
            const auto &h = horiz[(y + k) * outW + x];
            for (int j = 0; j < 5; ++j) m[j] += w[k] * h[j];
          }
          const double mx = m[0], my = m[1];
          const double vx = m[2] - mx * mx, vy = m[3] - my * my, cxy = m[4] - mx * my;
          rowSum += ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) / ((mx * mx + my * my + kC1) * (vx + vy + kC2));
        }
        rows[y] = rowSum;
      }
    });
    double channel = 0.0;
    for (double r : rows) channel += r;
    total += channel / (double(outW) * outH);
  }
  return total / 3.0;
}

}  // namespace gsc
