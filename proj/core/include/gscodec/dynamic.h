#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "gscodec/splat.h"

namespace gsc {

using Vec3d = std::array<double, 3>;
using Quatd = std::array<double, 4>;  // (w, x, y, z)

struct MotionSample {
  Vec3d position;
  Quatd rotation;
};

// p_i(t) = mean_i + sum_{k>=1} a_k (t - mu_t)^k and
// q_i(t) = normalize(rot_i + sum_{k>=1} r_k (t - mu_t)^k).
MotionSample evalMotionPoly(const DynamicGaussianCloud &cloud, std::size_t i, double t);

// p_i(t) = mean_i + sum_b c_{i,b} B_b(t), B_b linearly interpolated between
// control values spread evenly over the time range. Times outside the range
// are clamped with a warning.
Vec3d evalMotionBasis(const DynamicGaussianCloud &cloud, std::size_t i, double t);

// Position and rotation at time t for any motion variant (static points and the
// basis variant keep their base rotation).
MotionSample evalMotion(const DynamicGaussianCloud &cloud, std::size_t i, double t);

// sigmoid(logit_i) * exp(-(t - mu_i)^2 / (2 s_i^2)).
double evalTemporalOpacity(const TemporalOpacity &top, std::size_t i, double baseOpacity, double t);

struct TimeInterval {
  double start = 0.0;
  double end = 0.0;
};

// Times where the temporal opacity stays >= tau; nullopt if base < tau.
std::optional<TimeInterval> lifespan(const TemporalOpacity &top, std::size_t i, double baseOpacity, double tau);

// Ordinary least squares on the Vandermonde system in (t - timeCenter).
// Returns a_0..a_degree. Throws kRankDeficient when fewer than degree+1
// distinct times are given.
std::vector<Vec3d> fitPolyTrajectory(std::span<const double> times, std::span<const Vec3d> positions, int degree,
                                     double timeCenter);

struct BasisFit {
  int basisCount = 0;
  int sampleCount = 0;             // T
  std::vector<double> basis;       // B x T, orthonormal rows
  std::vector<double> coeffs;      // N x B x 3
  std::vector<double> centers;     // N x 3, per-point temporal mean
  std::vector<double> singularValues;  // all singular values of the centered matrix
  double residualSquared = 0.0;    // ||centered - reconstruction||_F^2
};

// Rank-B factorization of N trajectories sampled at T times (N x T x 3,
// point-major, then time, then axis). Rows of the centered (3N x T) matrix are
// per-point, per-axis displacement curves; the basis spans their top-B right
// singular vectors.
BasisFit fitBasisPca(std::span<const double> trajectories, std::size_t pointCount, int sampleCount, int basisCount);

// Reconstructed position of point i at sample j from a basis fit.
Vec3d basisReconstruct(const BasisFit &fit, std::size_t i, int sample);

// Static cloud at time t: positions/rotations from the motion model, opacity
// replaced by the temporal opacity (stored back as a logit), points with
// alpha < 1/255 dropped. t is clamped into the time range.
GaussianCloud sliceAtTime(const DynamicGaussianCloud &cloud, double t);

// ceil(frameCount / gofLen) consecutive segments covering every frame once.
std::vector<GofSegment> segmentGof(int frameCount, int gofLen);

// Builds a polynomial-motion dynamic cloud per segment from dense per-frame
// positions (frames x N x 3): each segment gets its own least-squares fit in
// normalized segment time.
DynamicGaussianCloud fitSegment(const GaussianCloud &appearance, std::span<const double> framePositions,
                                std::size_t pointCount, const GofSegment &segment, int degree);

}  // namespace gsc
