#include "gscodec/preprocess.h"

#include <unsupported/Eigen/Polynomials>
#include <algorithm>
#include <cmath>

#include "gscodec/dynamic.h"
#include "gscodec/error.h"
#include "gscodec/parallel.h"
#include "kdtree.h"

namespace gsc {

namespace {

enum class PruneKind { kOpacity, kScale, kOutlier };

template <typename Pred>
PruneResult filter(const GaussianCloud &cloud, PruneKind kind, Pred keepPoint) {
  PruneResult r;
  const std::size_t n = cloud.size();
  std::vector<uint32_t> keep;
  keep.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (keepPoint(i)) keep.push_back(static_cast<uint32_t>(i));
    else r.report.indicesRemoved.push_back(static_cast<uint32_t>(i));
  }
  const std::size_t removed = r.report.indicesRemoved.size();
  switch (kind) {
    case PruneKind::kOpacity: r.report.removedByOpacity = removed; break;
    case PruneKind::kScale: r.report.removedByScale = removed; break;
    case PruneKind::kOutlier: r.report.removedByOutlier = removed; break;
  }
  r.report.kept = keep.size();
  r.cloud = keep.size() == n ? cloud : cloud.select(keep);
  r.report.indicesKept = std::move(keep);
  return r;
}

// Rewrites a stage report whose indices refer to `stageInput` (itself the
// kept set `previousKept` of the original) in terms of the original cloud.
void chain(PruneReport &total, const PruneReport &stage) {
  std::vector<uint32_t> kept;
  kept.reserve(stage.indicesKept.size());
  for (uint32_t i : stage.indicesKept) kept.push_back(total.indicesKept[i]);
  for (uint32_t i : stage.indicesRemoved) total.indicesRemoved.push_back(total.indicesKept[i]);
  std::sort(total.indicesRemoved.begin(), total.indicesRemoved.end());
  total.indicesKept = std::move(kept);
  total.removedByOpacity += stage.removedByOpacity;
  total.removedByScale += stage.removedByScale;
  total.removedByOutlier += stage.removedByOutlier;
  total.kept = stage.kept;
}

}  // namespace

PruneResult pruneByOpacity(const GaussianCloud &cloud, double minOpacity) {
  if (!(minOpacity >= 0.0 && minOpacity < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "opacity threshold must lie in [0, 1)");
  }
  return filter(cloud, PruneKind::kOpacity,
                [&](std::size_t i) { return sigmoid(cloud.opacityLogits[i]) >= minOpacity; });
}

PruneResult pruneByScale(const GaussianCloud &cloud, double minScale, double maxScale) {
  if (!(minScale > 0.0 && minScale < maxScale)) {
    throw Error(ErrorCode::kInvalidArgument, "scale bounds must satisfy 0 < min < max");
  }
  return filter(cloud, PruneKind::kScale, [&](std::size_t i) {
    const float *s = &cloud.logScales[i * 3];
    const double scale = std::exp(double(std::max({s[0], s[1], s[2]})));
    return minScale <= scale && scale <= maxScale;
  });
}

std::vector<double> meanNeighborDistances(std::span<const float> points, int k) {
  const std::size_t n = points.size() / 3;
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "neighbour count must be >= 1");
  if (n <= static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kInvalidArgument, "outlier removal needs more than k = " + std::to_string(k) +
                                                 " points, got " + std::to_string(n));
  }
  KdTree tree(points);
  std::vector<double> mean(n);
  parallelFor(0, n, 2048, [&](std::size_t b, std::size_t e) {
    std::vector<double> d2;
    for (std::size_t i = b; i < e; ++i) {
      tree.knn(static_cast<uint32_t>(i), k, d2);
      double sum = 0.0;
      for (double v : d2) sum += std::sqrt(v);
      mean[i] = sum / k;
    }
  });
  return mean;
}

PruneResult pruneOutliers(const GaussianCloud &cloud, int k, double stdMultiplier) {
  std::vector<double> d = meanNeighborDistances(cloud.means, k);
  double mu = 0.0;
  for (double v : d) mu += v;
  mu /= double(d.size());
  double var = 0.0;
  for (double v : d) var += (v - mu) * (v - mu);
  const double sd = std::sqrt(var / double(d.size()));
  const double limit = mu + stdMultiplier * sd;
  return filter(cloud, PruneKind::kOutlier, [&](std::size_t i) { return !(d[i] > limit); });
}

PruneResult applyPruning(const GaussianCloud &cloud, const PruneConfig &config) {
  PruneResult result;
  result.cloud = cloud;
  result.report.kept = cloud.size();
  result.report.indicesKept.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) result.report.indicesKept[i] = static_cast<uint32_t>(i);

  auto run = [&](PruneResult stage) {
    chain(result.report, stage.report);
    result.cloud = std::move(stage.cloud);
  };
  if (config.opacityEnabled) run(pruneByOpacity(result.cloud, config.minOpacity));
  if (config.scaleEnabled) run(pruneByScale(result.cloud, config.minScale, config.maxScale));
  if (config.outliersEnabled && result.cloud.size() > static_cast<std::size_t>(config.outlierNeighbors)) {
    run(pruneOutliers(result.cloud, config.outlierNeighbors, config.outlierStdMultiplier));
  }
  return result;
}

std::size_t AttributeMask::activeCount() const {
  std::size_t c = 0;
  for (uint8_t b : bits) c += b ? 1 : 0;
  return c;
}

namespace {

AttributeMask finishMask(std::string attribute, std::vector<uint8_t> bits) {
  AttributeMask m;
  m.attribute = std::move(attribute);
  m.bits = std::move(bits);
  m.ratio = m.bits.empty() ? 0.0 : double(m.activeCount()) / double(m.bits.size());
  return m;
}

double displacement(const MotionSample &a, const Vec3d &ref) {
  double s = 0.0;
  for (int ax = 0; ax < 3; ++ax) s += (a.position[ax] - ref[ax]) * (a.position[ax] - ref[ax]);
  return std::sqrt(s);
}

// Times in (lo, hi) where d/ds |sum_k a_k s^k|^2 = 0, s = t - center.
std::vector<double> stationaryTimes(const MotionModel &m, std::size_t i, double lo, double hi) {
  const int kp = m.positionDegree;
  if (kp < 2) return {};
  const double center = m.timeCenter[i];
  // f(s) = sum_{j,k} (a_j . a_k) s^(j+k); f'(s) has degree 2kp - 1.
  Eigen::VectorXd deriv = Eigen::VectorXd::Zero(2 * kp);
  for (int j = 1; j <= kp; ++j) {
    for (int k = 1; k <= kp; ++k) {
      const float *aj = &m.positionCoeffs[(i * kp + j - 1) * 3];
      const float *ak = &m.positionCoeffs[(i * kp + k - 1) * 3];
      double dot = double(aj[0]) * ak[0] + double(aj[1]) * ak[1] + double(aj[2]) * ak[2];
      deriv[j + k - 1] += (j + k) * dot;
    }
  }
  int top = static_cast<int>(deriv.size()) - 1;
  double scale = deriv.cwiseAbs().maxCoeff();
  if (scale == 0.0) return {};
  while (top > 0 && std::abs(deriv[top]) <= 1e-14 * scale) --top;
  if (top < 1) return {};
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(deriv.head(top + 1));
  std::vector<double> out;
  for (const auto &root : solver.roots()) {
    if (std::abs(root.imag()) > 1e-7 * (1.0 + std::abs(root.real()))) continue;
    double t = root.real() + center;
    if (t > lo && t < hi) out.push_back(t);
  }
  return out;
}

}  // namespace

AttributeMask deriveShMask(const GaussianCloud &cloud, double energyThreshold) {
  const int m = cloud.shCoeffs();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "SH mask needs SH degree >= 1");
  const std::size_t n = cloud.size();
  const std::size_t w = static_cast<std::size_t>(m) * 3;
  std::vector<uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    for (std::size_t j = 0; j < w; ++j) e += double(cloud.shN[i * w + j]) * cloud.shN[i * w + j];
    bits[i] = e >= energyThreshold ? 1 : 0;
  }
  return finishMask("shN", std::move(bits));
}

AttributeMask deriveStaticMask(const DynamicGaussianCloud &cloud, double threshold, int samples) {
  if (samples < 2) throw Error(ErrorCode::kInvalidArgument, "static mask needs at least 2 time samples");
  const std::size_t n = cloud.size();
  const MotionModel &m = cloud.motion;
  std::vector<uint8_t> bits(n, 0);
  if (m.variant == MotionVariant::kNone) return finishMask("motion", std::move(bits));
  const double lo = cloud.timeStart, hi = cloud.timeEnd;
  parallelFor(0, n, 1024, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double tRef;
      std::vector<double> times;
      if (m.variant == MotionVariant::kPolynomial) {
        tRef = m.timeCenter[i];
        times = stationaryTimes(m, i, lo, hi);
      } else {
        tRef = 0.5 * (lo + hi);
      }
      for (int s = 0; s < samples; ++s) times.push_back(lo + (hi - lo) * double(s) / double(samples - 1));
      const Vec3d ref = evalMotion(cloud, i, tRef).position;
      double best = 0.0;
      for (double t : times) best = std::max(best, displacement(evalMotion(cloud, i, t), ref));
      bits[i] = best >= threshold ? 1 : 0;
    }
  });
  return finishMask("motion", std::move(bits));
}

GaussianCloud applyMask(const GaussianCloud &cloud, const AttributeMask &mask) {
  if (mask.bits.size() != cloud.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask length " + std::to_string(mask.bits.size()) +
                                                   " differs from cloud size " + std::to_string(cloud.size()));
  }
  if (mask.attribute != "shN") {
    throw Error(ErrorCode::kInvalidArgument, "static clouds only support shN masks, got '" + mask.attribute + "'");
  }
  GaussianCloud out = cloud;
  const std::size_t n = cloud.size();
  const std::size_t w = static_cast<std::size_t>(cloud.shCoeffs()) * 3;
  if (out.flags.empty()) out.flags.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.bits[i]) continue;
    std::fill_n(out.shN.begin() + i * w, w, 0.0f);
    out.flags[i] |= kFlagDiffuseOnly;
  }
  return out;
}

DynamicGaussianCloud applyMask(const DynamicGaussianCloud &cloud, const AttributeMask &mask) {
  if (mask.attribute == "shN") {
    DynamicGaussianCloud out = cloud;
    out.base = applyMask(cloud.base, mask);
    return out;
  }
  if (mask.attribute != "motion") {
    throw Error(ErrorCode::kInvalidArgument, "unknown mask attribute '" + mask.attribute + "'");
  }
  if (mask.bits.size() != cloud.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask length " + std::to_string(mask.bits.size()) +
                                                   " differs from cloud size " + std::to_string(cloud.size()));
  }
  DynamicGaussianCloud out = cloud;
  const std::size_t n = cloud.size();
  MotionModel &m = out.motion;
  if (out.base.flags.empty()) out.base.flags.assign(n, 0);
  const std::size_t pw = static_cast<std::size_t>(m.positionDegree) * 3;
  const std::size_t rw = static_cast<std::size_t>(m.rotationDegree) * 4;
  const std::size_t bw = static_cast<std::size_t>(m.basisCount) * 3;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.bits[i]) continue;
    if (m.variant == MotionVariant::kPolynomial) {
      std::fill_n(m.positionCoeffs.begin() + i * pw, pw, 0.0f);
      std::fill_n(m.rotationCoeffs.begin() + i * rw, rw, 0.0f);
    } else if (m.variant == MotionVariant::kBasis) {
      std::fill_n(m.basisCoeffs.begin() + i * bw, bw, 0.0f);
    }
    out.base.flags[i] |= kFlagStatic;
  }
  return out;
}

}  // namespace gsc
