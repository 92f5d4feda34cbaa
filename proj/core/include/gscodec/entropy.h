#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gscodec/ans.h"
#include "gscodec/bytes.h"

namespace gsc {

// Smallest probability any model reports; keeps -log2 p finite.
constexpr double kMinProbability = 0x1.0p-24;

// Laplace-smoothed histogram of one channel: p[s] = (count[s] + a) / (n + a S).
struct HistogramModel {
  uint32_t symbolCount = 0;
  double alpha = 1.0;
  uint64_t total = 0;
  std::vector<uint64_t> counts;
  CdfTable table;  // quantized CDF used by the coder

  double probability(uint32_t symbol) const;
};

// Independent histogram per channel ("factorized" across channels).
struct FactorizedHistogramModel {
  std::vector<HistogramModel> channels;

  std::size_t channelCount() const { return channels.size(); }
  // Stream position i codes channel i % C (point-major interleave).
  TableAnsModel coder() const;
};

// alpha is stored as binary32 so the decoder rebuilds the identical table.
// Throws kInvalidArgument for S < 2 or alpha < 0, kEmptyCloud for empty input,
// kOutOfRange for symbols >= S.
HistogramModel fitHistogram(std::span<const uint32_t> symbols, uint32_t symbolCount, double alpha = 1.0);
// symbols is point-major N x channels; every channel shares the alphabet.
FactorizedHistogramModel fitFactorized(std::span<const uint32_t> symbols, int channels, uint32_t symbolCount,
                                       double alpha = 1.0);

// Total bits sum_i -log2 p(symbol_i).
double rateEstimate(const HistogramModel &model, std::span<const uint32_t> symbols);
double rateEstimate(const FactorizedHistogramModel &model, std::span<const uint32_t> symbols);

void serializeHistogram(const HistogramModel &model, ByteWriter &out);
HistogramModel deserializeHistogram(ByteReader &in);

// Standard normal CDF.
double normalCdf(double z);

// Mass of N(mu, sigma) on [v - q/2, v + q/2], floored at kMinProbability.
double gaussianProbability(double v, double q, double mu, double sigma);

// Per-voxel Gaussian context over a regular grid covering the positions'
// bounding box. Values are modelled in whatever units they are given in.
struct SpatialGaussianModel {
  int channels = 0;
  std::array<float, 3> origin{};
  float voxelSize = 1.0f;
  std::array<int, 3> dims{1, 1, 1};
  float sigmaFloor = 0.25f;
  std::vector<float> mean;          // voxels x channels
  std::vector<float> sigma;         // voxels x channels, >= sigmaFloor
  std::vector<float> globalMean;    // channels
  std::vector<float> globalSigma;   // channels
  std::vector<uint32_t> members;    // voxels; < 2 means the global fallback is used

  std::size_t voxelCount() const { return std::size_t(dims[0]) * dims[1] * dims[2]; }
  // Voxel holding a position (clamped into the grid).
  uint32_t voxelOf(const float *position) const;
  double mu(uint32_t voxel, int channel) const { return mean[std::size_t(voxel) * channels + channel]; }
  double sd(uint32_t voxel, int channel) const { return sigma[std::size_t(voxel) * channels + channel]; }
  double probability(uint32_t voxel, int channel, double value, double q) const {
    return gaussianProbability(value, q, mu(voxel, channel), sd(voxel, channel));
  }
};

// positions: N x 3; values: N x channels (point-major). Voxels with fewer than
// two members take the global statistics; sigma is clamped to sigmaFloor.
SpatialGaussianModel fitSpatialGaussian(std::span<const float> positions, std::span<const float> values, int channels,
                                        double voxelSize, double sigmaFloor);

// Voxel edge giving roughly `pointsPerVoxel` points per occupied voxel.
double suggestVoxelSize(std::span<const float> positions, double pointsPerVoxel = 64.0);

// Total bits of point-major N x C values, each coded with bin width q.
double rateEstimate(const SpatialGaussianModel &model, std::span<const float> positions,
                    std::span<const float> values, double q);

// Snaps mean/sigma to the 16-bit codes used on disk for an alphabet
// [0, symbolCount); the encoder must code with the snapped model.
void snapToStorage(SpatialGaussianModel &model, uint32_t symbolCount);
void serializeSpatialGaussian(const SpatialGaussianModel &model, uint32_t symbolCount, ByteWriter &out);
SpatialGaussianModel deserializeSpatialGaussian(ByteReader &in, uint32_t symbolCount);

// Codes integer symbols s in [0, S) with the Gaussian mass of [s - 1/2, s + 1/2]
// under each point's voxel; the two tails fold into the end symbols.
class GaussianAnsModel : public AnsModel {
 public:
  GaussianAnsModel(const SpatialGaussianModel &model, std::vector<uint32_t> voxelOfPoint, uint32_t symbolCount);
  uint32_t symbolCount(std::size_t) const override { return symbols_; }
  AnsInterval interval(std::size_t i, uint32_t s) const override;
  uint32_t lookup(std::size_t i, uint32_t slot, AnsInterval *iv) const override;

 private:
  uint32_t cum(std::size_t i, uint32_t s) const;
  const SpatialGaussianModel &model_;
  std::vector<uint32_t> voxels_;
  uint32_t symbols_;
};

// -(1/n) sum log2 P(v_i) with P the Gaussian bin mass of width q around each
// continuous value. Bits per value.
double entropyLoss(std::span<const double> values, double q, std::span<const double> mu,
                   std::span<const double> sigma);
double entropyLoss(const SpatialGaussianModel &model, std::span<const float> positions, std::span<const float> values,
                   double q);
// Histogram variant: each value is binned by round((v - lo) / q) into the
// model's alphabet.
double entropyLoss(const HistogramModel &model, std::span<const double> values, double lo, double q);

}  // namespace gsc
