#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gsc {

// Elementwise transform applied before quantization and inverted after.
// kUnitNormalize marks quaternion components: elementwise identity, the group
// is expected to be canonicalized before fitting.
enum class Transform : uint8_t { kIdentity = 0, kLog = 1, kLogit = 2, kUnitNormalize = 3 };

const char *transformName(Transform t);

// Uniform scalar quantizer over [vMin, vMax] in transformed space with
// 2^bits levels. Range endpoints are float so that they serialize exactly.
struct QuantizationScheme {
  std::string attribute;
  Transform transform = Transform::kIdentity;
  int bits = 8;
  float vMin = 0.0f;
  float vMax = 1.0f;

  uint32_t maxSymbol() const { return (1u << bits) - 1u; }
  double step() const { return (double(vMax) - double(vMin)) / double(maxSymbol()); }
  void check() const;  // throws kInvalidArgument if the invariants fail
};

constexpr int kMinBits = 5;
constexpr int kMaxBits = 16;

double applyTransform(Transform t, double v);
double invertTransform(Transform t, double v);

// Range at the clip_pct / 100 - clip_pct percentiles of the transformed
// values (linear interpolation between order statistics). Throws
// kDegenerateRange when the range collapses; such channels should be stored as
// constants.
QuantizationScheme fitScheme(std::span<const float> values, int bits, double clipPct = 0.0,
                             Transform transform = Transform::kIdentity, std::string attribute = {});

// round-half-away-from-zero((clamp(T(v)) - vMin) / step). Throws kNonFinite.
uint32_t quantizeValue(double value, const QuantizationScheme &scheme);
std::vector<uint32_t> quantizeScalar(std::span<const float> values, const QuantizationScheme &scheme);
std::vector<uint32_t> quantizeScalar(std::span<const double> values, const QuantizationScheme &scheme);

// vMin + symbol * step, evaluated so that the top symbol maps to vMax exactly.
// Returned in transformed space. Throws kOutOfRange for symbols >= 2^bits.
double dequantizeValue(uint32_t symbol, const QuantizationScheme &scheme);
std::vector<double> dequantizeScalar(std::span<const uint32_t> symbols, const QuantizationScheme &scheme);

// Uniform-noise stand-in for quantization: v + U[-step/2, step/2]. Draws come
// from std::mt19937_64 mapped through an explicit 53-bit mantissa, so the
// stream is identical on every platform for a given seed.
std::vector<double> simulateNoiseQuant(std::span<const double> values, double step, uint64_t seed);

// Forward pass of the straight-through estimator: dequantize(quantize(v)).
// A differentiable host should treat d(out)/d(v) as 1.
std::vector<double> steForward(std::span<const double> values, const QuantizationScheme &scheme);

struct VQCodebook {
  int size = 0;       // K
  int dimension = 0;  // d
  uint64_t seed = 0;
  std::vector<float> centroids;  // K x d

  const float *centroid(int k) const { return centroids.data() + static_cast<std::size_t>(k) * dimension; }
};

struct VQFitOptions {
  int codebookSize = 4096;
  int iterations = 20;
  uint64_t seed = 0;
};

struct VQFitResult {
  VQCodebook codebook;
  // Mean squared distance to the assigned centroid after each assignment
  // step, one entry per iteration. Non-increasing.
  std::vector<double> distortion;
};

// k-means with k-means++ seeding and a fixed iteration count. Empty clusters
// are re-seeded from the point farthest from its centroid. K > N is clamped to
// N with a warning.
VQFitResult fitVQCodebook(std::span<const float> vectors, int dimension, const VQFitOptions &options);

// Nearest centroid by squared L2, ties to the lowest index.
std::vector<uint32_t> vqEncode(std::span<const float> vectors, const VQCodebook &codebook);
std::vector<float> vqDecode(std::span<const uint32_t> indices, const VQCodebook &codebook);

// Mean squared distance between vectors and their decoded centroids.
double vqDistortion(std::span<const float> vectors, std::span<const uint32_t> indices, const VQCodebook &codebook);

}  // namespace gsc
