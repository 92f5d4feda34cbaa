#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gscodec/config.h"
#include "gscodec/render.h"
#include "gscodec/splat.h"

namespace gsc {

// bytes / 2^20.
double megabytes(uint64_t bytes);
// bytes * 8 / (frames / fps) / 10^6.
double megabitsPerSecond(uint64_t bytes, int frames, double fps);

struct RdRow {
  std::string config;
  uint64_t bytes = 0;
  double rate = 0.0;  // MB for static scenes, Mbps for sequences
  double psnr = 0.0;  // mean over views, decoded vs uncompressed render
  double ssim = 0.0;
};

struct RdSweepOptions {
  std::array<float, 3> background = {0, 0, 0};
  int framesPerGof = 2;  // dynamic: rendered frames per GOF (first and last, then evenly spaced)
};

std::vector<RdRow> rdSweep(const GaussianCloud &cloud, const std::vector<Camera> &cameras,
                           const std::vector<NamedConfig> &configs, const RdSweepOptions &options = {});
std::vector<RdRow> rdSweep(const DynamicSequence &sequence, const std::vector<Camera> &cameras,
                           const std::vector<NamedConfig> &configs, const RdSweepOptions &options = {});

// Header "config,bytes,rate,psnr,ssim" then one line per row.
std::string rdCsv(const std::vector<RdRow> &rows);

}  // namespace gsc
