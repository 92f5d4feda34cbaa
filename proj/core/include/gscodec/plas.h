#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gscodec/png.h"
#include "gscodec/splat.h"

namespace gsc {

// 2D layout of N points: perm[i] is the cell (y * width + x) holding point i.
struct PlaneGrid {
  int width = 0;
  int height = 0;
  std::vector<uint32_t> perm;     // N
  std::vector<uint8_t> validity;  // width * height, 1 = holds a point

  std::size_t cellCount() const { return std::size_t(width) * height; }
  // cellToPoint()[c] is the point in cell c, or UINT32_MAX for padding.
  std::vector<uint32_t> cellToPoint() const;
  void check(std::size_t pointCount) const;  // throws kDimensionMismatch / kCorrupt
};

// Smallest square grid holding n points; the first n cells in raster order
// are valid and points sit in index order (perm = identity).
PlaneGrid makeSquareGrid(std::size_t n);

// Per-channel min-max normalization of point-major N x C values to [0, 1];
// constant channels map to 0.
std::vector<float> normalizeChannels(std::span<const float> values, int channels);

// Default sorting channels: means, sh0 and opacity logits, each normalized.
// Returns N x 7.
std::vector<float> plasFeatures(const GaussianCloud &cloud);

// Sum over valid 4-neighbour cell pairs of the weighted squared L2 distance
// between the points' feature vectors (N x C). Empty weights = all ones.
double smoothnessCost(const PlaneGrid &grid, std::span<const float> features, int channels,
                      std::span<const float> weights = {});

struct PlasOptions {
  uint64_t seed = 0;
  int proposalsPerPoint = 16;  // per pass
  std::vector<float> weights;  // per channel, empty = all ones
};

struct PlasStats {
  double initialCost = 0.0;  // after the seeded random placement
  double finalCost = 0.0;
  std::size_t acceptedSwaps = 0;
  std::vector<double> passCosts;  // cost after each radius pass
};

// Seeded random placement of the points onto the grid's valid cells, then
// greedy coarse-to-fine swap refinement: for radius r = W/2, W/4, ..., 1 it
// proposes proposalsPerPoint * N random swaps inside (2r+1)^2 windows and
// keeps each one that strictly lowers the cost. Deterministic given the seed.
PlaneGrid sortPlas(std::span<const float> features, int channels, std::size_t pointCount,
                   const PlasOptions &options, PlasStats *stats = nullptr);

// Quantized symbols of one attribute, point-major N x channels.
struct SymbolPlane {
  std::string attribute;
  int channels = 0;
  int bits = 8;
  std::vector<uint32_t> symbols;
};

// One image holding up to four channels of an attribute. Attributes wider than
// 8 bits are split into high and low byte images.
struct AttributePlane {
  std::string name;  // e.g. "means_hi", "rotations", "features_1"
  std::string attribute;
  int firstChannel = 0;
  bool lowByte = false;
  PngImage image;
};

// Scatters symbols to their cells; padding cells are zero.
std::vector<AttributePlane> packPlanes(const SymbolPlane &symbols, const PlaneGrid &grid);

// Gathers symbols back from the planes produced by packPlanes.
SymbolPlane unpackPlanes(std::span<const AttributePlane> planes, const PlaneGrid &grid, const std::string &attribute,
                         int channels, int bits);

// Plane layout packPlanes uses for a given attribute shape (images left empty).
std::vector<AttributePlane> planeLayout(const std::string &attribute, int channels, int bits);

}  // namespace gsc
