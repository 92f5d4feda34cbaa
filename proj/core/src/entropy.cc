#include "gscodec/entropy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gscodec/error.h"

namespace gsc {

namespace {

constexpr double kCodeMax = 65535.0;
constexpr int kMaxDimPerAxis = 256;

double log2p(double p) { return std::log2(std::max(p, kMinProbability)); }

}  // namespace

double HistogramModel::probability(uint32_t symbol) const {
  if (symbol >= symbolCount) return 0.0;
  return (double(counts[symbol]) + alpha) / (double(total) + alpha * double(symbolCount));
}

HistogramModel fitHistogram(std::span<const uint32_t> symbols, uint32_t symbolCount, double alpha) {
  if (symbolCount < 2) throw Error(ErrorCode::kInvalidArgument, "histogram alphabet needs at least 2 symbols");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kInvalidArgument, "smoothing alpha must be >= 0");
  if (symbols.empty()) throw Error(ErrorCode::kEmptyCloud, "cannot fit a histogram to an empty stream");
  HistogramModel m;
  m.symbolCount = symbolCount;
  m.alpha = double(static_cast<float>(alpha));
  m.total = symbols.size();
  m.counts.assign(symbolCount, 0);
  for (uint32_t s : symbols) {
    if (s >= symbolCount) {
      throw Error(ErrorCode::kOutOfRange, "symbol " + std::to_string(s) + " outside alphabet of " +
                                              std::to_string(symbolCount));
    }
    ++m.counts[s];
  }
  std::vector<uint64_t> prefix(symbolCount + 1, 0);
  for (uint32_t s = 0; s < symbolCount; ++s) prefix[s + 1] = prefix[s] + m.counts[s];
  const double denom = double(m.total) + m.alpha * double(symbolCount);
  m.table = CdfTable::fromCumulative(symbolCount, [&](uint32_t s) {
    return (double(prefix[s]) + m.alpha * double(s)) / denom;
  });
  return m;
}

FactorizedHistogramModel fitFactorized(std::span<const uint32_t> symbols, int channels, uint32_t symbolCount,
                                       double alpha) {
  if (channels <= 0 || symbols.size() % channels != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "symbol stream is not a whole number of points");
  }
  const std::size_t n = symbols.size() / channels;
  FactorizedHistogramModel model;
  std::vector<uint32_t> column(n);
  for (int c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = symbols[i * channels + c];
    model.channels.push_back(fitHistogram(column, symbolCount, alpha));
  }
  return model;
}

TableAnsModel FactorizedHistogramModel::coder() const {
  std::vector<const CdfTable *> tables;
  for (const auto &c : channels) tables.push_back(&c.table);
  return TableAnsModel(std::move(tables));
}

double rateEstimate(const HistogramModel &model, std::span<const uint32_t> symbols) {
  double bits = 0.0;
  for (uint32_t s : symbols) bits -= log2p(model.probability(s));
  return bits;
}

double rateEstimate(const FactorizedHistogramModel &model, std::span<const uint32_t> symbols) {
  const std::size_t c = model.channelCount();
  double bits = 0.0;
  for (std::size_t i = 0; i < symbols.size(); ++i) bits -= log2p(model.channels[i % c].probability(symbols[i]));
  return bits;
}

void serializeHistogram(const HistogramModel &model, ByteWriter &out) {
  ByteWriter counts;
  for (uint64_t c : model.counts) counts.varint(c);
  std::vector<uint8_t> raw = counts.take();
  std::vector<uint8_t> z = deflateBytes(raw);
  out.u32(model.symbolCount);
  out.f32(static_cast<float>(model.alpha));
  out.u32(static_cast<uint32_t>(raw.size()));
  out.u32(static_cast<uint32_t>(z.size()));
  out.bytes(z);
}

HistogramModel deserializeHistogram(ByteReader &in) {
  const uint32_t symbolCount = in.u32();
  const float alpha = in.f32();
  const uint32_t rawLen = in.u32();
  const uint32_t zLen = in.u32();
  if (symbolCount < 2 || symbolCount > kAnsMaxSymbols) throw Error(ErrorCode::kCorrupt, "histogram alphabet out of range");
  std::vector<uint8_t> raw = inflateBytes(in.bytes(zLen), rawLen);
  ByteReader counts(raw, "histogram counts");
  HistogramModel m;
  m.symbolCount = symbolCount;
  m.alpha = alpha;
  m.counts.resize(symbolCount);
  for (uint32_t s = 0; s < symbolCount; ++s) {
    m.counts[s] = counts.varint();
    m.total += m.counts[s];
  }
  if (m.total == 0 && alpha == 0.0f) throw Error(ErrorCode::kCorrupt, "histogram has no mass");
  std::vector<uint64_t> prefix(symbolCount + 1, 0);
  for (uint32_t s = 0; s < symbolCount; ++s) prefix[s + 1] = prefix[s] + m.counts[s];
  const double denom = double(m.total) + m.alpha * double(symbolCount);
  m.table = CdfTable::fromCumulative(symbolCount, [&](uint32_t s) {
    return (double(prefix[s]) + m.alpha * double(s)) / denom;
  });
  return m;
}

double normalCdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double gaussianProbability(double v, double q, double mu, double sigma) {
  const double hi = (v + 0.5 * q - mu) / sigma;
  const double lo = (v - 0.5 * q - mu) / sigma;
  // Evaluate in the tail that keeps precision: for positive z use upper tails.
  double p;
  if (lo > 0.0) p = 0.5 * std::erfc(lo * M_SQRT1_2) - 0.5 * std::erfc(hi * M_SQRT1_2);
  else p = normalCdf(hi) - normalCdf(lo);
  return std::max(p, kMinProbability);
}

uint32_t SpatialGaussianModel::voxelOf(const float *p) const {
  std::array<int, 3> idx;
  for (int a = 0; a < 3; ++a) {
    double f = std::floor((double(p[a]) - double(origin[a])) / double(voxelSize));
    idx[a] = static_cast<int>(std::clamp(f, 0.0, double(dims[a] - 1)));
  }
  return static_cast<uint32_t>((std::size_t(idx[2]) * dims[1] + idx[1]) * dims[0] + idx[0]);
}

double suggestVoxelSize(std::span<const float> positions, double pointsPerVoxel) {
  const std::size_t n = positions.size() / 3;
  if (n == 0) return 1.0;
  double extent = 0.0;
  for (int a = 0; a < 3; ++a) {
    float lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, positions[i * 3 + a]);
      hi = std::max(hi, positions[i * 3 + a]);
    }
    extent = std::max(extent, double(hi) - double(lo));
  }
  if (!(extent > 0.0)) return 1.0;
  const double cells = std::max(1.0, std::round(std::cbrt(double(n) / pointsPerVoxel)));
  return extent / cells;
}

SpatialGaussianModel fitSpatialGaussian(std::span<const float> positions, std::span<const float> values, int channels,
                                        double voxelSize, double sigmaFloor) {
  if (!(voxelSize > 0.0)) throw Error(ErrorCode::kInvalidArgument, "voxel size must be > 0");
  if (!(sigmaFloor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma floor must be > 0");
  if (channels <= 0) throw Error(ErrorCode::kInvalidArgument, "spatial model needs at least one channel");
  const std::size_t n = positions.size() / 3;
  if (values.size() != n * channels) throw Error(ErrorCode::kDimensionMismatch, "values must be N x channels");
  if (n == 0) throw Error(ErrorCode::kEmptyCloud, "cannot fit a spatial model to no points");

  SpatialGaussianModel m;
  m.channels = channels;
  m.sigmaFloor = static_cast<float>(sigmaFloor);
  std::array<float, 3> hi;
  for (int a = 0; a < 3; ++a) {
    m.origin[a] = INFINITY;
    hi[a] = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      m.origin[a] = std::min(m.origin[a], positions[i * 3 + a]);
      hi[a] = std::max(hi[a], positions[i * 3 + a]);
    }
  }
  double size = voxelSize;
  // Coarsen if the requested resolution would exceed the per-axis cap.
  for (int a = 0; a < 3; ++a) size = std::max(size, (double(hi[a]) - double(m.origin[a])) / kMaxDimPerAxis);
  m.voxelSize = static_cast<float>(size);
  for (int a = 0; a < 3; ++a) {
    double cells = std::floor((double(hi[a]) - double(m.origin[a])) / double(m.voxelSize)) + 1.0;
    m.dims[a] = static_cast<int>(std::clamp(cells, 1.0, double(kMaxDimPerAxis + 1)));
  }

  const std::size_t voxels = m.voxelCount();
  std::vector<uint32_t> voxelOfPoint(n);
  m.members.assign(voxels, 0);
  for (std::size_t i = 0; i < n; ++i) {
    voxelOfPoint[i] = m.voxelOf(&positions[i * 3]);
    ++m.members[voxelOfPoint[i]];
  }

  std::vector<double> sum(voxels * channels, 0.0), sq(voxels * channels, 0.0);
  std::vector<double> gsum(channels, 0.0), gsq(channels, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      sum[std::size_t(voxelOfPoint[i]) * channels + c] += values[i * channels + c];
      gsum[c] += values[i * channels + c];
    }
  }
  m.globalMean.resize(channels);
  m.globalSigma.resize(channels);
  for (int c = 0; c < channels; ++c) gsum[c] /= double(n);
  for (std::size_t v = 0; v < voxels; ++v) {
    if (m.members[v] == 0) continue;
    for (int c = 0; c < channels; ++c) sum[v * channels + c] /= double(m.members[v]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      const double x = values[i * channels + c];
      const double d = x - sum[std::size_t(voxelOfPoint[i]) * channels + c];
      sq[std::size_t(voxelOfPoint[i]) * channels + c] += d * d;
      gsq[c] += (x - gsum[c]) * (x - gsum[c]);
    }
  }
  for (int c = 0; c < channels; ++c) {
    m.globalMean[c] = static_cast<float>(gsum[c]);
    m.globalSigma[c] = static_cast<float>(std::max(std::sqrt(gsq[c] / double(n)), sigmaFloor));
  }
  m.mean.resize(voxels * channels);
  m.sigma.resize(voxels * channels);
  for (std::size_t v = 0; v < voxels; ++v) {
    for (int c = 0; c < channels; ++c) {
      const std::size_t k = v * channels + c;
      if (m.members[v] < 2) {
        m.mean[k] = m.globalMean[c];
        m.sigma[k] = m.globalSigma[c];
      } else {
        m.mean[k] = static_cast<float>(sum[k]);
        m.sigma[k] = static_cast<float>(std::max(std::sqrt(sq[k] / double(m.members[v])), sigmaFloor));
      }
    }
  }
  return m;
}

double rateEstimate(const SpatialGaussianModel &model, std::span<const float> positions,
                    std::span<const float> values, double q) {
  const std::size_t n = positions.size() / 3;
  double bits = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const uint32_t v = model.voxelOf(&positions[i * 3]);
    for (int c = 0; c < model.channels; ++c) {
      bits -= std::log2(model.probability(v, c, values[i * model.channels + c], q));
    }
  }
  return bits;
}

namespace {

struct StorageCodec {
  double symbols, floor, logRange;

  StorageCodec(uint32_t symbolCount, double sigmaFloor)
      : symbols(symbolCount), floor(sigmaFloor), logRange(std::log(std::max(double(symbolCount), 2.0) / sigmaFloor)) {}

  uint16_t muCode(double mu) const {
    return static_cast<uint16_t>(std::lround(std::clamp((mu + 0.5) / symbols, 0.0, 1.0) * kCodeMax));
  }
  double mu(uint16_t code) const { return double(code) / kCodeMax * symbols - 0.5; }
  uint16_t sigmaCode(double sigma) const {
    double t = logRange > 0.0 ? std::log(std::max(sigma, floor) / floor) / logRange : 0.0;
    return static_cast<uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * kCodeMax));
  }
  double sigma(uint16_t code) const { return floor * std::exp(double(code) / kCodeMax * logRange); }
};

}  // namespace

void snapToStorage(SpatialGaussianModel &model, uint32_t symbolCount) {
  const StorageCodec codec(symbolCount, model.sigmaFloor);
  for (float &mu : model.mean) mu = static_cast<float>(codec.mu(codec.muCode(mu)));
  for (float &s : model.sigma) s = static_cast<float>(codec.sigma(codec.sigmaCode(s)));
  for (float &mu : model.globalMean) mu = static_cast<float>(codec.mu(codec.muCode(mu)));
  for (float &s : model.globalSigma) s = static_cast<float>(codec.sigma(codec.sigmaCode(s)));
}

void serializeSpatialGaussian(const SpatialGaussianModel &model, uint32_t symbolCount, ByteWriter &out) {
  const StorageCodec codec(symbolCount, model.sigmaFloor);
  out.u16(static_cast<uint16_t>(model.channels));
  for (int a = 0; a < 3; ++a) out.f32(model.origin[a]);
  out.f32(model.voxelSize);
  for (int a = 0; a < 3; ++a) out.u16(static_cast<uint16_t>(model.dims[a]));
  out.f32(model.sigmaFloor);
  ByteWriter table;
  for (int c = 0; c < model.channels; ++c) {
    table.u16(codec.muCode(model.globalMean[c]));
    table.u16(codec.sigmaCode(model.globalSigma[c]));
  }
  // Channel-major so each code plane deflates well.
  for (int c = 0; c < model.channels; ++c) {
    for (std::size_t v = 0; v < model.voxelCount(); ++v) table.u16(codec.muCode(model.mu(uint32_t(v), c)));
  }
  for (int c = 0; c < model.channels; ++c) {
    for (std::size_t v = 0; v < model.voxelCount(); ++v) table.u16(codec.sigmaCode(model.sd(uint32_t(v), c)));
  }
  std::vector<uint8_t> raw = table.take();
  std::vector<uint8_t> z = deflateBytes(raw);
  out.u32(static_cast<uint32_t>(raw.size()));
  out.u32(static_cast<uint32_t>(z.size()));
  out.bytes(z);
}

SpatialGaussianModel deserializeSpatialGaussian(ByteReader &in, uint32_t symbolCount) {
  SpatialGaussianModel m;
  m.channels = in.u16();
  for (int a = 0; a < 3; ++a) m.origin[a] = in.f32();
  m.voxelSize = in.f32();
  for (int a = 0; a < 3; ++a) m.dims[a] = in.u16();
  m.sigmaFloor = in.f32();
  if (m.channels <= 0 || !(m.voxelSize > 0.0f) || !(m.sigmaFloor > 0.0f)) {
    throw Error(ErrorCode::kCorrupt, "spatial model header is invalid");
  }
  for (int a = 0; a < 3; ++a) {
    if (m.dims[a] < 1 || m.dims[a] > kMaxDimPerAxis + 1) throw Error(ErrorCode::kCorrupt, "spatial model grid is invalid");
  }
  const uint32_t rawLen = in.u32();
  const uint32_t zLen = in.u32();
  const std::size_t voxels = m.voxelCount();
  const std::size_t expect = (2 * std::size_t(m.channels) + 2 * voxels * m.channels) * 2;
  if (rawLen != expect) throw Error(ErrorCode::kCorrupt, "spatial model table has the wrong size");
  std::vector<uint8_t> raw = inflateBytes(in.bytes(zLen), rawLen);
  ByteReader table(raw, "spatial model table");
  const StorageCodec codec(symbolCount, m.sigmaFloor);
  m.globalMean.resize(m.channels);
  m.globalSigma.resize(m.channels);
  for (int c = 0; c < m.channels; ++c) {
    m.globalMean[c] = static_cast<float>(codec.mu(table.u16()));
    m.globalSigma[c] = static_cast<float>(codec.sigma(table.u16()));
  }
  m.mean.resize(voxels * m.channels);
  m.sigma.resize(voxels * m.channels);
  for (int c = 0; c < m.channels; ++c) {
    for (std::size_t v = 0; v < voxels; ++v) m.mean[v * m.channels + c] = static_cast<float>(codec.mu(table.u16()));
  }
  for (int c = 0; c < m.channels; ++c) {
    for (std::size_t v = 0; v < voxels; ++v) m.sigma[v * m.channels + c] = static_cast<float>(codec.sigma(table.u16()));
  }
  m.members.assign(voxels, 2);
  return m;
}

GaussianAnsModel::GaussianAnsModel(const SpatialGaussianModel &model, std::vector<uint32_t> voxelOfPoint,
                                   uint32_t symbolCount)
    : model_(model), voxels_(std::move(voxelOfPoint)), symbols_(symbolCount) {
  if (symbolCount < 2 || symbolCount > kAnsMaxSymbols) {
    throw Error(ErrorCode::kInvalidArgument, "Gaussian coding alphabet out of range");
  }
}

uint32_t GaussianAnsModel::cum(std::size_t i, uint32_t s) const {
  if (s == 0) return 0;
  if (s >= symbols_) return kAnsTotal;
  const int c = static_cast<int>(i % model_.channels);
  const uint32_t v = voxels_[i / model_.channels];
  const double f = normalCdf((double(s) - 0.5 - model_.mu(v, c)) / model_.sd(v, c));
  return s + static_cast<uint32_t>(std::floor(f * double(kAnsTotal - symbols_)));
}

AnsInterval GaussianAnsModel::interval(std::size_t i, uint32_t s) const {
  const uint32_t lo = cum(i, s), hi = cum(i, s + 1);
  return {lo, hi - lo};
}

uint32_t GaussianAnsModel::lookup(std::size_t i, uint32_t slot, AnsInterval *iv) const {
  uint32_t lo = 0, hi = symbols_;  // invariant: cum(lo) <= slot < cum(hi)
  while (hi - lo > 1) {
    const uint32_t mid = lo + (hi - lo) / 2;
    if (cum(i, mid) <= slot) lo = mid;
    else hi = mid;
  }
  *iv = interval(i, lo);
  return lo;
}

double entropyLoss(std::span<const double> values, double q, std::span<const double> mu,
                   std::span<const double> sigma) {
  if (values.empty()) return 0.0;
  if (mu.size() != values.size() || sigma.size() != values.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "entropy loss needs one mean and sigma per value");
  }
  double bits = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) bits -= std::log2(gaussianProbability(values[i], q, mu[i], sigma[i]));
  return bits / double(values.size());
}

double entropyLoss(const SpatialGaussianModel &model, std::span<const float> positions, std::span<const float> values,
                   double q) {
  if (values.empty()) return 0.0;
  return rateEstimate(model, positions, values, q) / double(values.size());
}

double entropyLoss(const HistogramModel &model, std::span<const double> values, double lo, double q) {
  if (values.empty()) return 0.0;
  double bits = 0.0;
  for (double v : values) {
    double idx = std::round((v - lo) / q);
    idx = std::clamp(idx, 0.0, double(model.symbolCount - 1));
    bits -= log2p(model.probability(static_cast<uint32_t>(idx)));
  }
  return bits / double(values.size());
}

}  // namespace gsc
