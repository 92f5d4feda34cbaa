#include "gscodec/splat.h"

#include <cmath>
#include <sstream>

#include "gscodec/error.h"

namespace gsc {

namespace {

template <typename T>
void gatherRows(const std::vector<T> &src, std::size_t width, std::span<const uint32_t> idx,
                std::vector<T> &dst) {
  dst.clear();
  if (src.empty() || width == 0) return;
  dst.resize(idx.size() * width);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const T *row = src.data() + static_cast<std::size_t>(idx[i]) * width;
    std::copy(row, row + width, dst.data() + i * width);
  }
}

class ReportBuilder {
 public:
  explicit ReportBuilder(ValidationReport &report) : report_(report) {}

  void add(const std::string &field, const std::string &kind, std::size_t count) {
    if (count > 0) report_.findings.push_back({field, kind, count});
  }

  void checkSize(const std::string &field, std::size_t actual, std::size_t expected) {
    if (actual != expected) add(field, "dimension mismatch", 1);
  }

  void checkFinite(const std::string &field, const std::vector<float> &values) {
    std::size_t bad = 0;
    for (float v : values) bad += std::isfinite(v) ? 0 : 1;
    add(field, "non-finite", bad);
  }

 private:
  ValidationReport &report_;
};

}  // namespace

GaussianCloud GaussianCloud::zeros(std::size_t n, int shDegree, int featureDim) {
  GaussianCloud c;
  c.shDegree = shDegree;
  c.featureDim = featureDim;
  c.means.assign(n * 3, 0.0f);
  c.rotations.assign(n * 4, 0.0f);
  for (std::size_t i = 0; i < n; ++i) c.rotations[i * 4] = 1.0f;
  c.logScales.assign(n * 3, 0.0f);
  c.opacityLogits.assign(n, 0.0f);
  c.sh0.assign(n * 3, 0.0f);
  c.shN.assign(n * shCoeffsForDegree(shDegree) * 3, 0.0f);
  c.features.assign(n * featureDim, 0.0f);
  return c;
}

GaussianCloud GaussianCloud::select(std::span<const uint32_t> indices) const {
  GaussianCloud out;
  out.shDegree = shDegree;
  out.featureDim = featureDim;
  gatherRows(means, 3, indices, out.means);
  gatherRows(rotations, 4, indices, out.rotations);
  gatherRows(logScales, 3, indices, out.logScales);
  gatherRows(opacityLogits, 1, indices, out.opacityLogits);
  gatherRows(sh0, 3, indices, out.sh0);
  gatherRows(shN, static_cast<std::size_t>(shCoeffs()) * 3, indices, out.shN);
  gatherRows(features, static_cast<std::size_t>(featureDim), indices, out.features);
  gatherRows(flags, 1, indices, out.flags);
  return out;
}

DynamicGaussianCloud DynamicGaussianCloud::select(std::span<const uint32_t> indices) const {
  DynamicGaussianCloud out;
  out.base = base.select(indices);
  out.timeStart = timeStart;
  out.timeEnd = timeEnd;
  out.gofIndex = gofIndex;

  const MotionModel &m = motion;
  MotionModel &o = out.motion;
  o.variant = m.variant;
  o.positionDegree = m.positionDegree;
  o.rotationDegree = m.rotationDegree;
  o.basisCount = m.basisCount;
  o.controlCount = m.controlCount;
  o.basisCurves = m.basisCurves;
  gatherRows(m.timeCenter, 1, indices, o.timeCenter);
  gatherRows(m.positionCoeffs, static_cast<std::size_t>(m.positionDegree) * 3, indices, o.positionCoeffs);
  gatherRows(m.rotationCoeffs, static_cast<std::size_t>(m.rotationDegree) * 4, indices, o.rotationCoeffs);
  gatherRows(m.basisCoeffs, static_cast<std::size_t>(m.basisCount) * 3, indices, o.basisCoeffs);

  gatherRows(temporalOpacity.center, 1, indices, out.temporalOpacity.center);
  gatherRows(temporalOpacity.scale, 1, indices, out.temporalOpacity.scale);
  return out;
}

double GofSegment::frameTime(int frame) const {
  int count = frameCount();
  if (count <= 1) return 0.0;
  return static_cast<double>(frame - frameStart) / static_cast<double>(count - 1);
}

std::size_t ValidationReport::count(const std::string &field, const std::string &kind) const {
  for (const auto &f : findings) {
    if (f.field == field && f.kind == kind) return f.count;
  }
  return 0;
}

std::string ValidationReport::toString() const {
  std::ostringstream os;
  for (const auto &f : findings) os << f.field << ": " << f.count << " " << f.kind << "\n";
  return os.str();
}

ValidationReport validate(const GaussianCloud &c) {
  ValidationReport report;
  ReportBuilder rb(report);
  const std::size_t n = c.size();
  if (c.shDegree < 0 || c.shDegree > 3) rb.add("shDegree", "unsupported", 1);
  if (c.featureDim < 0) rb.add("featureDim", "unsupported", 1);
  const std::size_t m = c.shDegree >= 0 && c.shDegree <= 3 ? static_cast<std::size_t>(c.shCoeffs()) : 0;

  rb.checkSize("means", c.means.size(), n * 3);
  rb.checkSize("rotations", c.rotations.size(), n * 4);
  rb.checkSize("logScales", c.logScales.size(), n * 3);
  rb.checkSize("sh0", c.sh0.size(), n * 3);
  rb.checkSize("shN", c.shN.size(), n * m * 3);
  rb.checkSize("features", c.features.size(), n * static_cast<std::size_t>(std::max(c.featureDim, 0)));
  if (!c.flags.empty()) rb.checkSize("flags", c.flags.size(), n);

  rb.checkFinite("means", c.means);
  rb.checkFinite("rotations", c.rotations);
  rb.checkFinite("logScales", c.logScales);
  rb.checkFinite("opacityLogits", c.opacityLogits);
  rb.checkFinite("sh0", c.sh0);
  rb.checkFinite("shN", c.shN);
  rb.checkFinite("features", c.features);

  std::size_t nonUnit = 0;
  for (std::size_t i = 0; i + 4 <= c.rotations.size(); i += 4) {
    const float *q = &c.rotations[i];
    double norm = std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] + double(q[2]) * q[2] +
                            double(q[3]) * q[3]);
    if (!(std::abs(norm - 1.0) <= 1e-4)) ++nonUnit;
  }
  rb.add("rotations", "non-unit quaternion", nonUnit);
  return report;
}

ValidationReport validate(const DynamicGaussianCloud &c) {
  ValidationReport report = validate(c.base);
  ReportBuilder rb(report);
  const std::size_t n = c.size();
  if (!(c.timeStart < c.timeEnd)) rb.add("timeRange", "empty range", 1);

  const MotionModel &m = c.motion;
  switch (m.variant) {
    case MotionVariant::kNone:
      break;
    case MotionVariant::kPolynomial:
      if (m.positionDegree < 0 || m.rotationDegree < 0) rb.add("motion", "negative degree", 1);
      rb.checkSize("motion.timeCenter", m.timeCenter.size(), n);
      rb.checkSize("motion.positionCoeffs", m.positionCoeffs.size(),
                   n * static_cast<std::size_t>(std::max(m.positionDegree, 0)) * 3);
      rb.checkSize("motion.rotationCoeffs", m.rotationCoeffs.size(),
                   n * static_cast<std::size_t>(std::max(m.rotationDegree, 0)) * 4);
      rb.checkFinite("motion.timeCenter", m.timeCenter);
      rb.checkFinite("motion.positionCoeffs", m.positionCoeffs);
      rb.checkFinite("motion.rotationCoeffs", m.rotationCoeffs);
      break;
    case MotionVariant::kBasis:
      if (m.basisCount < 1 || m.controlCount < 1) rb.add("motion", "empty basis", 1);
      rb.checkSize("motion.basisCurves", m.basisCurves.size(),
                   static_cast<std::size_t>(std::max(m.basisCount, 0)) * std::max(m.controlCount, 0));
      rb.checkSize("motion.basisCoeffs", m.basisCoeffs.size(),
                   n * static_cast<std::size_t>(std::max(m.basisCount, 0)) * 3);
      rb.checkFinite("motion.basisCurves", m.basisCurves);
      rb.checkFinite("motion.basisCoeffs", m.basisCoeffs);
      break;
  }

  const TemporalOpacity &top = c.temporalOpacity;
  if (!top.empty()) {
    rb.checkSize("temporalOpacity.center", top.center.size(), n);
    rb.checkSize("temporalOpacity.scale", top.scale.size(), n);
    rb.checkFinite("temporalOpacity.center", top.center);
    std::size_t bad = 0;
    for (float s : top.scale) bad += (std::isfinite(s) && s > 0.0f) ? 0 : 1;
    rb.add("temporalOpacity.scale", "non-positive", bad);
  }
  return report;
}

GaussianCloud canonicalize(const GaussianCloud &cloud) {
  GaussianCloud out = cloud;
  for (std::size_t i = 0; i + 4 <= out.rotations.size(); i += 4) {
    float *q = &out.rotations[i];
    double n2 = double(q[0]) * q[0] + double(q[1]) * q[1] + double(q[2]) * q[2] + double(q[3]) * q[3];
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
      throw Error(ErrorCode::kZeroQuaternion, "rotation at index " + std::to_string(i / 4) +
                                                  " has zero or non-finite norm");
    }
    double norm = std::sqrt(n2);
    // Already-unit quaternions are left alone so the operation is idempotent.
    double inv = std::abs(norm - 1.0) <= 1e-6 ? 1.0 : 1.0 / norm;
    if (q[0] < 0.0f) inv = -inv;
    if (inv != 1.0) {
      for (int k = 0; k < 4; ++k) q[k] = static_cast<float>(q[k] * inv);
    }
  }
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace gsc
