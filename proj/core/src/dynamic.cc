#include "gscodec/dynamic.h"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gscodec/error.h"
#include "gscodec/parallel.h"

namespace gsc {

namespace {

double clampTime(const DynamicGaussianCloud &c, double t) {
  if (t < c.timeStart || t > c.timeEnd) {
    logWarning("time " + std::to_string(t) + " outside [" + std::to_string(c.timeStart) + ", " +
               std::to_string(c.timeEnd) + "]; clamping");
    return std::clamp(t, double(c.timeStart), double(c.timeEnd));
  }
  return t;
}

Quatd baseRotation(const GaussianCloud &c, std::size_t i) {
  const float *q = &c.rotations[i * 4];
  return {q[0], q[1], q[2], q[3]};
}

Vec3d baseMean(const GaussianCloud &c, std::size_t i) {
  const float *m = &c.means[i * 3];
  return {m[0], m[1], m[2]};
}

}  // namespace

MotionSample evalMotionPoly(const DynamicGaussianCloud &cloud, std::size_t i, double t) {
  const MotionModel &m = cloud.motion;
  if (m.variant != MotionVariant::kPolynomial) {
    throw Error(ErrorCode::kInvalidArgument, "evalMotionPoly needs the polynomial motion variant");
  }
  const double dt = t - m.timeCenter[i];
  MotionSample s{baseMean(cloud.base, i), baseRotation(cloud.base, i)};
  double power = 1.0;
  for (int k = 0; k < m.positionDegree; ++k) {
    power *= dt;
    const float *a = &m.positionCoeffs[(i * m.positionDegree + k) * 3];
    for (int ax = 0; ax < 3; ++ax) s.position[ax] += a[ax] * power;
  }
  power = 1.0;
  for (int k = 0; k < m.rotationDegree; ++k) {
    power *= dt;
    const float *r = &m.rotationCoeffs[(i * m.rotationDegree + k) * 4];
    for (int ax = 0; ax < 4; ++ax) s.rotation[ax] += r[ax] * power;
  }
  double n2 = 0.0;
  for (double v : s.rotation) n2 += v * v;
  if (!(n2 > 0.0)) {
    throw Error(ErrorCode::kZeroQuaternion, "rotation of point " + std::to_string(i) + " vanishes at t=" +
                                                std::to_string(t));
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (double &v : s.rotation) v *= inv;
  return s;
}

Vec3d evalMotionBasis(const DynamicGaussianCloud &cloud, std::size_t i, double t) {
  const MotionModel &m = cloud.motion;
  if (m.variant != MotionVariant::kBasis) {
    throw Error(ErrorCode::kInvalidArgument, "evalMotionBasis needs the basis motion variant");
  }
  t = clampTime(cloud, t);
  Vec3d p = baseMean(cloud.base, i);
  const int ctrl = m.controlCount;
  std::size_t j0 = 0, j1 = 0;
  double frac = 0.0;
  if (ctrl > 1) {
    double u = (t - cloud.timeStart) / (double(cloud.timeEnd) - cloud.timeStart) * (ctrl - 1);
    u = std::clamp(u, 0.0, double(ctrl - 1));
    j0 = std::min<std::size_t>(static_cast<std::size_t>(std::floor(u)), ctrl - 2);
    j1 = j0 + 1;
    frac = u - double(j0);
  }
  for (int b = 0; b < m.basisCount; ++b) {
    const float *curve = &m.basisCurves[std::size_t(b) * ctrl];
    const double value = curve[j0] + (double(curve[j1]) - curve[j0]) * frac;
    const float *c = &m.basisCoeffs[(i * m.basisCount + b) * 3];
    for (int ax = 0; ax < 3; ++ax) p[ax] += c[ax] * value;
  }
  return p;
}

MotionSample evalMotion(const DynamicGaussianCloud &cloud, std::size_t i, double t) {
  switch (cloud.motion.variant) {
    case MotionVariant::kPolynomial: return evalMotionPoly(cloud, i, t);
    case MotionVariant::kBasis: return {evalMotionBasis(cloud, i, t), baseRotation(cloud.base, i)};
    case MotionVariant::kNone: break;
  }
  return {baseMean(cloud.base, i), baseRotation(cloud.base, i)};
}

double evalTemporalOpacity(const TemporalOpacity &top, std::size_t i, double baseOpacity, double t) {
  if (top.empty()) return baseOpacity;
  const double s = top.scale[i];
  const double d = t - top.center[i];
  return baseOpacity * std::exp(-(d * d) / (2.0 * s * s));
}

std::optional<TimeInterval> lifespan(const TemporalOpacity &top, std::size_t i, double baseOpacity, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lifespan threshold must be > 0");
  if (baseOpacity < tau) return std::nullopt;
  if (top.empty()) {
    return TimeInterval{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  const double half = double(top.scale[i]) * std::sqrt(2.0 * std::log(baseOpacity / tau));
  return TimeInterval{top.center[i] - half, top.center[i] + half};
}

std::vector<Vec3d> fitPolyTrajectory(std::span<const double> times, std::span<const Vec3d> positions, int degree,
                                     double timeCenter) {
  if (degree < 0) throw Error(ErrorCode::kInvalidArgument, "polynomial degree must be >= 0");
  if (times.size() != positions.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "times and positions differ in length");
  }
  const std::size_t n = times.size();
  const int cols = degree + 1;
  std::set<double> distinct(times.begin(), times.end());
  if (distinct.size() < static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::kRankDeficient, "degree " + std::to_string(degree) + " fit needs " +
                                               std::to_string(cols) + " distinct times, got " +
                                               std::to_string(distinct.size()));
  }
  Eigen::MatrixXd v(n, cols);
  Eigen::MatrixXd rhs(n, 3);
  for (std::size_t j = 0; j < n; ++j) {
    const double dt = times[j] - timeCenter;
    double p = 1.0;
    for (int k = 0; k < cols; ++k) {
      v(j, k) = p;
      p *= dt;
    }
    for (int ax = 0; ax < 3; ++ax) rhs(j, ax) = positions[j][ax];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  if (qr.rank() < cols) throw Error(ErrorCode::kRankDeficient, "Vandermonde system is rank deficient");
  Eigen::MatrixXd coef = qr.solve(rhs);
  std::vector<Vec3d> out(cols);
  for (int k = 0; k < cols; ++k) out[k] = {coef(k, 0), coef(k, 1), coef(k, 2)};
  return out;
}

BasisFit fitBasisPca(std::span<const double> trajectories, std::size_t pointCount, int sampleCount,
                     int basisCount) {
  if (basisCount <= 0) throw Error(ErrorCode::kInvalidArgument, "basis count must be >= 1");
  if (sampleCount <= 0 || trajectories.size() != pointCount * sampleCount * 3) {
    throw Error(ErrorCode::kDimensionMismatch, "trajectory array must hold N x T x 3 values");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(pointCount * 3);
  const Eigen::Index cols = sampleCount;
  if (basisCount > std::min<Eigen::Index>(rows, cols)) {
    throw Error(ErrorCode::kInvalidArgument, "basis count exceeds min(3N, T)");
  }
  Eigen::MatrixXd d(rows, cols);
  for (std::size_t i = 0; i < pointCount; ++i) {
    for (int t = 0; t < sampleCount; ++t) {
      for (int ax = 0; ax < 3; ++ax) d(i * 3 + ax, t) = trajectories[(i * sampleCount + t) * 3 + ax];
    }
  }
  BasisFit fit;
  fit.basisCount = basisCount;
  fit.sampleCount = sampleCount;
  fit.centers.resize(pointCount * 3);
  Eigen::VectorXd rowMean = d.rowwise().mean();
  d.colwise() -= rowMean;
  for (Eigen::Index r = 0; r < rows; ++r) fit.centers[r] = rowMean[r];

  Eigen::BDCSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd &sv = svd.singularValues();
  fit.singularValues.assign(sv.data(), sv.data() + sv.size());
  Eigen::MatrixXd ub = svd.matrixU().leftCols(basisCount) * sv.head(basisCount).asDiagonal();
  Eigen::MatrixXd vb = svd.matrixV().leftCols(basisCount);

  fit.basis.resize(static_cast<std::size_t>(basisCount) * sampleCount);
  for (int b = 0; b < basisCount; ++b) {
    for (int t = 0; t < sampleCount; ++t) fit.basis[std::size_t(b) * sampleCount + t] = vb(t, b);
  }
  fit.coeffs.resize(pointCount * basisCount * 3);
  for (std::size_t i = 0; i < pointCount; ++i) {
    for (int b = 0; b < basisCount; ++b) {
      for (int ax = 0; ax < 3; ++ax) fit.coeffs[(i * basisCount + b) * 3 + ax] = ub(i * 3 + ax, b);
    }
  }
  fit.residualSquared = (d - ub * vb.transpose()).squaredNorm();
  return fit;
}

Vec3d basisReconstruct(const BasisFit &fit, std::size_t i, int sample) {
  Vec3d p{fit.centers[i * 3], fit.centers[i * 3 + 1], fit.centers[i * 3 + 2]};
  for (int b = 0; b < fit.basisCount; ++b) {
    const double v = fit.basis[std::size_t(b) * fit.sampleCount + sample];
    for (int ax = 0; ax < 3; ++ax) p[ax] += fit.coeffs[(i * fit.basisCount + b) * 3 + ax] * v;
  }
  return p;
}

GaussianCloud sliceAtTime(const DynamicGaussianCloud &cloud, double t) {
  t = clampTime(cloud, t);
  const GaussianCloud &base = cloud.base;
  const std::size_t n = base.size();
  GaussianCloud moved = base;
  std::vector<uint32_t> keep;
  keep.reserve(n);
  const bool staticRotation = cloud.motion.variant != MotionVariant::kPolynomial || cloud.motion.rotationDegree == 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cloud.motion.variant != MotionVariant::kNone) {
      MotionSample s = evalMotion(cloud, i, t);
      for (int ax = 0; ax < 3; ++ax) moved.means[i * 3 + ax] = static_cast<float>(s.position[ax]);
      if (!staticRotation) {
        for (int ax = 0; ax < 4; ++ax) moved.rotations[i * 4 + ax] = static_cast<float>(s.rotation[ax]);
      }
    }
    const double baseAlpha = sigmoid(base.opacityLogits[i]);
    double alpha = baseAlpha;
    if (!cloud.temporalOpacity.empty()) {
      alpha = evalTemporalOpacity(cloud.temporalOpacity, i, baseAlpha, t);
      if (alpha != baseAlpha) {
        const double a = std::clamp(alpha, 1e-300, 1.0 - 0x1.0p-53);
        moved.opacityLogits[i] = static_cast<float>(logit(a));
      }
    }
    if (alpha >= 1.0 / 255.0) keep.push_back(static_cast<uint32_t>(i));
  }
  return moved.select(keep);
}

std::vector<GofSegment> segmentGof(int frameCount, int gofLen) {
  if (gofLen < 1) throw Error(ErrorCode::kInvalidArgument, "GOF length must be >= 1");
  if (frameCount < 0) throw Error(ErrorCode::kInvalidArgument, "frame count must be >= 0");
  std::vector<GofSegment> out;
  for (int start = 0, idx = 0; start < frameCount; start += gofLen, ++idx) {
    out.push_back({idx, start, std::min(frameCount, start + gofLen)});
  }
  return out;
}

DynamicGaussianCloud fitSegment(const GaussianCloud &appearance, std::span<const double> framePositions,
                                std::size_t pointCount, const GofSegment &segment, int degree) {
  if (appearance.size() != pointCount) {
    throw Error(ErrorCode::kDimensionMismatch, "appearance cloud size differs from trajectory point count");
  }
  const int frames = segment.frameCount();
  if (frames < 1 || framePositions.size() < static_cast<std::size_t>(segment.frameEnd) * pointCount * 3) {
    throw Error(ErrorCode::kDimensionMismatch, "frame positions do not cover the segment");
  }
  const int k = std::min(degree, frames - 1);
  const double center = frames > 1 ? 0.5 : 0.0;

  DynamicGaussianCloud d;
  d.base = appearance;
  d.gofIndex = segment.index;
  d.timeStart = 0.0f;
  d.timeEnd = 1.0f;
  MotionModel &m = d.motion;
  m.variant = MotionVariant::kPolynomial;
  m.positionDegree = k;
  m.rotationDegree = 0;
  m.timeCenter.assign(pointCount, static_cast<float>(center));
  m.positionCoeffs.assign(pointCount * k * 3, 0.0f);

  std::vector<double> times(frames);
  for (int f = 0; f < frames; ++f) times[f] = segment.frameTime(segment.frameStart + f);
  parallelFor(0, pointCount, 1024, [&](std::size_t b, std::size_t e) {
    std::vector<Vec3d> pos(frames);
    for (std::size_t i = b; i < e; ++i) {
      for (int f = 0; f < frames; ++f) {
        const double *p = &framePositions[((segment.frameStart + f) * pointCount + i) * 3];
        pos[f] = {p[0], p[1], p[2]};
      }
      std::vector<Vec3d> coef = fitPolyTrajectory(times, pos, k, center);
      for (int ax = 0; ax < 3; ++ax) d.base.means[i * 3 + ax] = static_cast<float>(coef[0][ax]);
      for (int j = 1; j <= k; ++j) {
        for (int ax = 0; ax < 3; ++ax) m.positionCoeffs[(i * k + j - 1) * 3 + ax] = static_cast<float>(coef[j][ax]);
      }
    }
  });
  return d;
}

}  // namespace gsc
