#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gscodec/splat.h"

namespace gsc {

struct PruneReport {
  std::size_t removedByOpacity = 0;
  std::size_t removedByScale = 0;
  std::size_t removedByOutlier = 0;
  std::size_t kept = 0;
  std::vector<uint32_t> indicesRemoved;  // sorted, relative to the original input
  std::vector<uint32_t> indicesKept;     // sorted, relative to the original input

  std::size_t totalRemoved() const { return removedByOpacity + removedByScale + removedByOutlier; }
};

struct PruneResult {
  GaussianCloud cloud;
  PruneReport report;
};

// Keeps points with sigmoid(logit) >= minOpacity; 0 <= minOpacity < 1.
PruneResult pruneByOpacity(const GaussianCloud &cloud, double minOpacity);

// Keeps points with minScale <= exp(max log-scale axis) <= maxScale.
PruneResult pruneByScale(const GaussianCloud &cloud, double minScale, double maxScale);

// Statistical outlier removal: d_i is the mean distance to the k nearest
// neighbours (KD-tree); points with d_i > mean(d) + stdMultiplier * std(d)
// are removed. Requires N > k.
PruneResult pruneOutliers(const GaussianCloud &cloud, int k, double stdMultiplier);

// Mean distance from each point to its k nearest neighbours (self excluded),
// summed in ascending distance order.
std::vector<double> meanNeighborDistances(std::span<const float> points, int k);

struct PruneConfig {
  bool opacityEnabled = true;
  double minOpacity = 0.005;
  bool scaleEnabled = false;
  double minScale = 1e-7;
  double maxScale = 1e3;
  bool outliersEnabled = false;
  int outlierNeighbors = 10;
  double outlierStdMultiplier = 3.0;
};

// Opacity, then scale, then outlier pruning; report indices refer to the input.
PruneResult applyPruning(const GaussianCloud &cloud, const PruneConfig &config);

struct AttributeMask {
  std::string attribute;  // "shN" or "motion"
  std::vector<uint8_t> bits;  // 1 = active
  double ratio = 0.0;

  std::size_t activeCount() const;
};

// Active iff ||shN_i||^2 >= energyThreshold. Throws when the cloud has no
// higher-order SH.
AttributeMask deriveShMask(const GaussianCloud &cloud, double energyThreshold);

// Active ("dynamic") iff max_t ||p_i(t) - p_i(t_ref)|| >= threshold, t over
// `samples` evenly spaced times in the range plus, for polynomial motion, the
// stationary points of the displacement inside the range. t_ref is the
// point's time center (polynomial) or the range midpoint (basis).
AttributeMask deriveStaticMask(const DynamicGaussianCloud &cloud, double threshold, int samples);

// Zeroes masked-out entries of the target attribute and sets the matching
// flag bit (kFlagDiffuseOnly for shN, kFlagStatic for motion).
GaussianCloud applyMask(const GaussianCloud &cloud, const AttributeMask &mask);
DynamicGaussianCloud applyMask(const DynamicGaussianCloud &cloud, const AttributeMask &mask);

}  // namespace gsc
