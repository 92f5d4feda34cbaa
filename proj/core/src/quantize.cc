#include "gscodec/quantize.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gscodec/error.h"
#include "gscodec/parallel.h"
#include "random_util.h"

namespace gsc {

const char *transformName(Transform t) {
  switch (t) {
    case Transform::kIdentity: return "identity";
    case Transform::kLog: return "log";
    case Transform::kLogit: return "logit";
    case Transform::kUnitNormalize: return "unit-normalize";
  }
  return "?";
}

void QuantizationScheme::check() const {
  if (bits < kMinBits || bits > kMaxBits) {
    throw Error(ErrorCode::kInvalidArgument, "bit width " + std::to_string(bits) + " outside [5, 16]");
  }
  if (!std::isfinite(vMin) || !std::isfinite(vMax) || !(vMin < vMax)) {
    throw Error(ErrorCode::kInvalidArgument, "scheme range must satisfy vMin < vMax");
  }
}

double applyTransform(Transform t, double v) {
  switch (t) {
    case Transform::kLog: return std::log(v);
    case Transform::kLogit: return std::log(v / (1.0 - v));
    case Transform::kIdentity:
    case Transform::kUnitNormalize: return v;
  }
  return v;
}

double invertTransform(Transform t, double v) {
  switch (t) {
    case Transform::kLog: return std::exp(v);
    case Transform::kLogit: return 1.0 / (1.0 + std::exp(-v));
    case Transform::kIdentity:
    case Transform::kUnitNormalize: return v;
  }
  return v;
}

namespace {

double percentile(const std::vector<double> &sorted, double pct) {
  if (sorted.size() == 1) return sorted[0];
  double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

template <typename T>
std::vector<uint32_t> quantizeAll(std::span<const T> values, const QuantizationScheme &scheme) {
  scheme.check();
  std::vector<uint32_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = quantizeValue(static_cast<double>(values[i]), scheme);
  return out;
}

}  // namespace

QuantizationScheme fitScheme(std::span<const float> values, int bits, double clipPct, Transform transform,
                             std::string attribute) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot fit a scheme to no values");
  if (!(clipPct >= 0.0 && clipPct < 50.0)) {
    throw Error(ErrorCode::kInvalidArgument, "clip percentage must lie in [0, 50)");
  }
  std::vector<double> t(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    t[i] = applyTransform(transform, values[i]);
    if (!std::isfinite(t[i])) {
      throw Error(ErrorCode::kNonFinite, "value " + std::to_string(i) + " is not finite after transform");
    }
  }
  QuantizationScheme s;
  s.attribute = std::move(attribute);
  s.transform = transform;
  s.bits = bits;
  if (clipPct == 0.0) {
    auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    s.vMin = static_cast<float>(*lo);
    s.vMax = static_cast<float>(*hi);
  } else {
    std::sort(t.begin(), t.end());
    s.vMin = static_cast<float>(percentile(t, clipPct));
    s.vMax = static_cast<float>(percentile(t, 100.0 - clipPct));
  }
  if (!(s.vMin < s.vMax)) {
    throw Error(ErrorCode::kDegenerateRange,
                "attribute '" + s.attribute + "' has a constant range; store it as a raw-constant chunk");
  }
  s.check();
  return s;
}

uint32_t quantizeValue(double value, const QuantizationScheme &scheme) {
  double t = applyTransform(scheme.transform, value);
  if (!std::isfinite(t)) throw Error(ErrorCode::kNonFinite, "cannot quantize a non-finite value");
  double lo = scheme.vMin, hi = scheme.vMax;
  double clamped = std::clamp(t, lo, hi);
  // Scaled position in [0, maxSymbol]; std::round rounds halves away from zero.
  double pos = (clamped - lo) / (hi - lo) * static_cast<double>(scheme.maxSymbol());
  double r = std::round(pos);
  return static_cast<uint32_t>(std::clamp(r, 0.0, static_cast<double>(scheme.maxSymbol())));
}

std::vector<uint32_t> quantizeScalar(std::span<const float> values, const QuantizationScheme &scheme) {
  return quantizeAll(values, scheme);
}

std::vector<uint32_t> quantizeScalar(std::span<const double> values, const QuantizationScheme &scheme) {
  return quantizeAll(values, scheme);
}

double dequantizeValue(uint32_t symbol, const QuantizationScheme &scheme) {
  const uint32_t top = scheme.maxSymbol();
  if (symbol > top) {
    throw Error(ErrorCode::kOutOfRange, "symbol " + std::to_string(symbol) + " exceeds " + std::to_string(top));
  }
  // Both products are exact in double (24-bit mantissa times <= 16-bit integer).
  double num = double(top - symbol) * double(scheme.vMin) + double(symbol) * double(scheme.vMax);
  return num / double(top);
}

std::vector<double> dequantizeScalar(std::span<const uint32_t> symbols, const QuantizationScheme &scheme) {
  scheme.check();
  std::vector<double> out(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) out[i] = dequantizeValue(symbols[i], scheme);
  return out;
}

std::vector<double> simulateNoiseQuant(std::span<const double> values, double step, uint64_t seed) {
  if (!(step >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "quantization step must be >= 0");
  std::vector<double> out(values.begin(), values.end());
  if (step == 0.0) return out;
  std::mt19937_64 rng(seed);
  for (double &v : out) v += (uniform01(rng) - 0.5) * step;
  return out;
}

std::vector<double> steForward(std::span<const double> values, const QuantizationScheme &scheme) {
  std::vector<uint32_t> sym = quantizeScalar(values, scheme);
  return dequantizeScalar(sym, scheme);
}

// ---------------------------------------------------------------------------
// Vector quantization

namespace {

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double squaredDistance(const float *a, const double *c, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    double diff = double(a[j]) - c[j];
    s += diff * diff;
  }
  return s;
}

double squaredDistance(const float *a, const float *c, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    double diff = double(a[j]) - double(c[j]);
    s += diff * diff;
  }
  return s;
}

constexpr std::size_t kAssignChunk = 256;

// Exact nearest-centroid assignment. A float GEMM screens candidates; every
// centroid within a safety margin of the screened minimum is re-scored in
// double, so the result equals an exhaustive double-precision scan.
void assignNearest(std::span<const float> vectors, int d, std::span<const float> centroidsF,
                   std::span<const double> centroidsD, int k, std::vector<uint32_t> &assignment,
                   std::vector<double> &dist2) {
  const std::size_t n = vectors.size() / d;
  assignment.resize(n);
  dist2.resize(n);
  Eigen::Map<const RowMatrixF> cmat(centroidsF.data(), k, d);
  Eigen::VectorXf cnorm = cmat.rowwise().squaredNorm();
  float cmax = cnorm.size() ? cnorm.maxCoeff() : 0.0f;

  auto exact = [&](const float *x, int c) {
    return centroidsD.empty() ? squaredDistance(x, centroidsF.data() + std::size_t(c) * d, d)
                              : squaredDistance(x, centroidsD.data() + std::size_t(c) * d, d);
  };

  parallelFor(0, n, kAssignChunk, [&](std::size_t b, std::size_t e) {
    const std::size_t rows = e - b;
    Eigen::Map<const RowMatrixF> xmat(vectors.data() + b * d, rows, d);
    RowMatrixF dots = xmat * cmat.transpose();
    for (std::size_t r = 0; r < rows; ++r) {
      const float *x = vectors.data() + (b + r) * d;
      float xnorm = xmat.row(r).squaredNorm();
      float best = std::numeric_limits<float>::infinity();
      for (int c = 0; c < k; ++c) best = std::min(best, cnorm[c] - 2.0f * dots(r, c));
      const float margin = 1e-4f * (xnorm + cmax) + 1e-30f;
      int bestIdx = -1;
      double bestD = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (cnorm[c] - 2.0f * dots(r, c) > best + margin) continue;
        double dd = exact(x, c);
        if (dd < bestD) {
          bestD = dd;
          bestIdx = c;
        }
      }
      assignment[b + r] = static_cast<uint32_t>(bestIdx);
      dist2[b + r] = bestD;
    }
  });
}

}  // namespace

VQFitResult fitVQCodebook(std::span<const float> vectors, int d, const VQFitOptions &options) {
  if (d <= 0 || vectors.empty() || vectors.size() % d != 0) {
    throw Error(ErrorCode::kInvalidArgument, "VQ fit needs at least one vector of positive dimension");
  }
  for (float v : vectors) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "VQ input contains non-finite values");
  }
  if (options.codebookSize < 1) throw Error(ErrorCode::kInvalidArgument, "codebook size must be >= 1");
  const std::size_t n = vectors.size() / d;
  int k = options.codebookSize;
  if (static_cast<std::size_t>(k) > n) {
    logWarning("codebook size " + std::to_string(k) + " exceeds " + std::to_string(n) +
               " vectors; clamping");
    k = static_cast<int>(n);
  }

  std::mt19937_64 rng(options.seed);
  std::vector<double> cent(static_cast<std::size_t>(k) * d);
  auto setCentroid = [&](int c, std::size_t point) {
    for (int j = 0; j < d; ++j) cent[std::size_t(c) * d + j] = vectors[point * d + j];
  };

  // k-means++ seeding.
  std::vector<double> minD2(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  std::size_t first = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * double(n)), n - 1);
  setCentroid(0, first);
  chosen[first] = 1;
  for (int c = 1; c < k; ++c) {
    const double *latest = &cent[std::size_t(c - 1) * d];
    parallelFor(0, n, 4096, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) minD2[i] = std::min(minD2[i], squaredDistance(&vectors[i * d], latest, d));
    });
    double total = 0.0;
    for (double v : minD2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += minD2[i];
        if (acc > target && minD2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (minD2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    setCentroid(c, pick);
    chosen[pick] = 1;
  }

  VQFitResult result;
  std::vector<uint32_t> assign;
  std::vector<double> dist2;
  std::vector<float> centF(cent.size());
  std::vector<double> sums(cent.size());
  std::vector<std::size_t> counts(k);
  for (int it = 0; it < std::max(options.iterations, 1); ++it) {
    for (std::size_t i = 0; i < cent.size(); ++i) centF[i] = static_cast<float>(cent[i]);
    assignNearest(vectors, d, centF, cent, k, assign, dist2);

    std::fill(counts.begin(), counts.end(), 0);
    for (uint32_t a : assign) ++counts[a];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (dist2[i] > dist2[far]) far = i;
      }
      --counts[assign[far]];
      assign[far] = static_cast<uint32_t>(c);
      counts[c] = 1;
      dist2[far] = 0.0;
      setCentroid(c, far);
    }
    double total = 0.0;
    for (double v : dist2) total += v;
    result.distortion.push_back(total / double(n));

    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double *s = &sums[std::size_t(assign[i]) * d];
      for (int j = 0; j < d; ++j) s[j] += vectors[i * d + j];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (int j = 0; j < d; ++j) cent[std::size_t(c) * d + j] = sums[std::size_t(c) * d + j] / double(counts[c]);
    }
  }

  VQCodebook &cb = result.codebook;
  cb.size = k;
  cb.dimension = d;
  cb.seed = options.seed;
  cb.centroids.resize(cent.size());
  for (std::size_t i = 0; i < cent.size(); ++i) cb.centroids[i] = static_cast<float>(cent[i]);
  return result;
}

std::vector<uint32_t> vqEncode(std::span<const float> vectors, const VQCodebook &codebook) {
  const int d = codebook.dimension;
  if (d <= 0 || codebook.size < 1 || vectors.size() % d != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "vector length does not match codebook dimension");
  }
  std::vector<uint32_t> assign;
  std::vector<double> dist2;
  assignNearest(vectors, d, codebook.centroids, {}, codebook.size, assign, dist2);
  return assign;
}

std::vector<float> vqDecode(std::span<const uint32_t> indices, const VQCodebook &codebook) {
  const int d = codebook.dimension;
  std::vector<float> out(indices.size() * d);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= static_cast<uint32_t>(codebook.size)) {
      throw Error(ErrorCode::kOutOfRange, "VQ index " + std::to_string(indices[i]) + " outside codebook of size " +
                                              std::to_string(codebook.size));
    }
    const float *c = codebook.centroid(static_cast<int>(indices[i]));
    std::copy(c, c + d, out.data() + i * d);
  }
  return out;
}

double vqDistortion(std::span<const float> vectors, std::span<const uint32_t> indices, const VQCodebook &codebook) {
  const int d = codebook.dimension;
  if (indices.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    total += squaredDistance(&vectors[i * d], codebook.centroid(static_cast<int>(indices[i])), d);
  }
  return total / double(indices.size());
}

}  // namespace gsc
