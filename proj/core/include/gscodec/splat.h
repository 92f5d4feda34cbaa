#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gsc {

// Number of higher-order SH coefficients per color channel for a degree.
constexpr int shCoeffsForDegree(int degree) { return (degree + 1) * (degree + 1) - 1; }

enum PointFlag : uint8_t {
  kFlagDiffuseOnly = 1 << 0,  // higher-order SH masked out
  kFlagStatic = 1 << 1,       // motion masked out
};

// A static 3D Gaussian splat scene. All arrays are point-major and share the
// leading dimension size(). Rotations are stored (w, x, y, z), scales in
// natural-log space, opacity as pre-sigmoid logits.
struct GaussianCloud {
  int shDegree = 0;
  int featureDim = 0;
  std::vector<float> means;          // N x 3
  std::vector<float> rotations;      // N x 4
  std::vector<float> logScales;      // N x 3
  std::vector<float> opacityLogits;  // N
  std::vector<float> sh0;            // N x 3
  std::vector<float> shN;            // N x M x 3, coefficient-major then channel
  std::vector<float> features;       // N x featureDim, optional
  std::vector<uint8_t> flags;        // N, optional

  std::size_t size() const { return opacityLogits.size(); }
  bool empty() const { return opacityLogits.empty(); }
  int shCoeffs() const { return shCoeffsForDegree(shDegree); }

  // Zero-initialized cloud with identity rotations.
  static GaussianCloud zeros(std::size_t n, int shDegree = 0, int featureDim = 0);

  // Gathers the given points (in the given order) into a new cloud.
  GaussianCloud select(std::span<const uint32_t> indices) const;
};

enum class MotionVariant : uint8_t { kNone = 0, kPolynomial = 1, kBasis = 2 };

// Per-point motion. For the polynomial variant the constant terms are the
// base cloud's mean and rotation, so position(timeCenter) == base mean by
// construction; `positionCoeffs` holds a_1..a_Kp and `rotationCoeffs` r_1..r_Kr.
// For the basis variant, `basisCurves` holds B curves sampled at `controlCount`
// evenly spaced times spanning the owning cloud's time range, and
// `basisCoeffs` one 3-vector per point and basis.
struct MotionModel {
  MotionVariant variant = MotionVariant::kNone;
  int positionDegree = 0;             // Kp
  int rotationDegree = 0;             // Kr
  std::vector<float> timeCenter;      // N
  std::vector<float> positionCoeffs;  // N x Kp x 3
  std::vector<float> rotationCoeffs;  // N x Kr x 4

  int basisCount = 0;
  int controlCount = 0;
  std::vector<float> basisCurves;  // B x controlCount
  std::vector<float> basisCoeffs;  // N x B x 3
};

// Gaussian-in-time opacity modulation. Empty arrays mean time-invariant opacity.
struct TemporalOpacity {
  std::vector<float> center;  // N, normalized time
  std::vector<float> scale;   // N, > 0

  bool empty() const { return center.empty(); }
};

struct DynamicGaussianCloud {
  GaussianCloud base;
  MotionModel motion;
  TemporalOpacity temporalOpacity;
  float timeStart = 0.0f;
  float timeEnd = 1.0f;
  int gofIndex = 0;

  std::size_t size() const { return base.size(); }
  DynamicGaussianCloud select(std::span<const uint32_t> indices) const;
};

// A contiguous run of frames [frameStart, frameEnd).
struct GofSegment {
  int index = 0;
  int frameStart = 0;
  int frameEnd = 0;

  int frameCount() const { return frameEnd - frameStart; }
  // Normalized time of a frame inside the segment: 0 for the first frame, 1 for
  // the last, 0 when the segment holds a single frame.
  double frameTime(int frame) const;
};

// A dynamic sequence: one independently coded cloud per group of frames.
struct DynamicSequence {
  int frameCount = 0;
  float fps = 30.0f;
  std::vector<GofSegment> segments;
  std::vector<DynamicGaussianCloud> gofs;
};

struct ValidationFinding {
  std::string field;
  std::string kind;  // "non-finite", "non-unit quaternion", "dimension mismatch"
  std::size_t count = 0;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;

  bool empty() const { return findings.empty(); }
  std::size_t count(const std::string &field, const std::string &kind) const;
  std::string toString() const;
};

// Never throws; an empty report means every invariant holds.
ValidationReport validate(const GaussianCloud &cloud);
ValidationReport validate(const DynamicGaussianCloud &cloud);

// Normalizes every quaternion and flips it so the scalar part is >= 0.
// Throws kZeroQuaternion naming the first offending index.
GaussianCloud canonicalize(const GaussianCloud &cloud);

double sigmoid(double x);
double logit(double p);

}  // namespace gsc
