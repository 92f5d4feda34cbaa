#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gscodec/splat.h"

namespace gsc {

// Independent random attributes: means in [-1, 1]^3, uniform rotations,
// log-scales in [-5, -2], Gaussian logits and SH coefficients.
GaussianCloud randomCloud(std::size_t n, int shDegree, uint64_t seed, int featureDim = 0);

// Points grouped around `clusters` centers; each cluster shares a color,
// scale and opacity level with small per-point noise.
GaussianCloud clusteredCloud(std::size_t n, int clusters, int shDegree, uint64_t seed);

// Surface-like scene (sphere, ground plane, boxes) with small splats aligned
// to the surfaces and colors varying smoothly over space.
GaussianCloud proceduralScene(std::size_t n, int shDegree, uint64_t seed);

// Dense per-frame positions for a cloud: frames x N x 3.
struct SyntheticMotion {
  GaussianCloud appearance;
  std::vector<double> framePositions;
  std::vector<uint8_t> moving;  // N, 1 for points that move
  int frameCount = 0;
  float fps = 30.0f;
};

// A `staticFraction` share of points stays put; the rest follow smooth
// periodic trajectories spanning the whole sequence.
SyntheticMotion syntheticMotion(std::size_t n, int frameCount, double staticFraction, int shDegree, uint64_t seed,
                                float fps = 30.0f);

// Splits the frames into GOFs of `gofLen` and fits polynomial motion of the
// given degree in each.
DynamicSequence sequenceFromFrames(const GaussianCloud &appearance, const std::vector<double> &framePositions,
                                   int frameCount, float fps, int gofLen, int degree);
DynamicSequence sequenceFromMotion(const SyntheticMotion &motion, int gofLen, int degree = 3);

}  // namespace gsc
