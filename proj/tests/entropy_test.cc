#include "gscodec/entropy.h"

#include <cmath>
#include <random>

#include "gscodec/bytes.h"
#include "test_util.h"

namespace gsc {
namespace {

using test::expectError;

TEST(HistogramTest, LaplaceSmoothedProbabilities) {
  const std::vector<uint32_t> s = {0, 0, 0, 1, 3};
  const HistogramModel m = fitHistogram(s, 5, 1.0);
  EXPECT_DOUBLE_EQ(m.probability(0), 4.0 / 10.0);
  EXPECT_DOUBLE_EQ(m.probability(2), 1.0 / 10.0);
  EXPECT_DOUBLE_EQ(m.probability(4), 1.0 / 10.0);
  double sum = 0.0;
  for (uint32_t k = 0; k < 5; ++k) sum += m.probability(k);
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(HistogramTest, RateEstimateMatchesDirectSum) {
  std::mt19937_64 rng(4);
  std::binomial_distribution<uint32_t> b(63, 0.3);
  std::vector<uint32_t> s(10000);
  for (auto &x : s) x = b(rng);
  const HistogramModel m = fitHistogram(s, 64, 0.5);
  std::vector<double> counts(64, 0.0);
  for (uint32_t x : s) counts[x] += 1.0;
  double oracle = 0.0;
  for (uint32_t x : s) oracle -= std::log2((counts[x] + 0.5) / (s.size() + 0.5 * 64));
  EXPECT_NEAR(rateEstimate(m, s), oracle, 1e-9 * oracle);
}

TEST(HistogramTest, SerializationRoundTrip) {
  std::mt19937_64 rng(6);
  std::vector<uint32_t> s(3000);
  for (auto &x : s) x = uint32_t(rng() % 200);
  const HistogramModel m = fitHistogram(s, 256, 1.0);
  ByteWriter w;
  serializeHistogram(m, w);
  auto bytes = w.take();
  ByteReader r(bytes);
  const HistogramModel back = deserializeHistogram(r);
  EXPECT_EQ(back.counts, m.counts);
  EXPECT_EQ(back.table.cumulative(), m.table.cumulative());
  EXPECT_EQ(r.remaining(), 0u);
}

TEST(HistogramTest, Errors) {
  const std::vector<uint32_t> s = {0, 5};
  expectError(ErrorCode::kOutOfRange, [&] { fitHistogram(s, 4); });
  expectError(ErrorCode::kInvalidArgument, [&] { fitHistogram(s, 1); });
  expectError(ErrorCode::kDimensionMismatch, [&] { fitFactorized(std::vector<uint32_t>{0, 1, 2}, 2, 4); });
}

TEST(GaussianTest, BinProbabilitiesSumToOne) {
  for (double sigma : {0.25, 1.0, 7.5}) {
    double sum = 0.0;
    for (int v = -200; v <= 200; ++v) sum += gaussianProbability(v, 1.0, 3.3, sigma);
    // Floor mass on the empty bins adds at most 401 * 2^-24.
    EXPECT_NEAR(sum, 1.0, 401 * kMinProbability + 1e-12);
  }
}

TEST(GaussianTest, MatchesErfOracleAndStaysPositiveInTails) {
  const double mu = 1.0, sigma = 2.0;
  for (double v : {-3.0, 0.0, 1.0, 4.5}) {
    const double oracle = 0.5 * (std::erf((v + 0.5 - mu) / (sigma * std::sqrt(2.0))) -
                                 std::erf((v - 0.5 - mu) / (sigma * std::sqrt(2.0))));
    EXPECT_NEAR(gaussianProbability(v, 1.0, mu, sigma), oracle, 1e-14);
  }
  EXPECT_GE(gaussianProbability(60.0, 1.0, 0.0, 1.0), kMinProbability);
  // Upper-tail evaluation keeps relative precision above the floor (z ~ 5).
  const double p5 = gaussianProbability(5.0, 1.0, 0.0, 1.0);
  const double tail = 0.5 * (std::erfc(4.5 / std::sqrt(2.0)) - std::erfc(5.5 / std::sqrt(2.0)));
  EXPECT_NEAR(p5, tail, 1e-12 * tail);
  // Below the floor the model reports the floor.
  EXPECT_EQ(gaussianProbability(7.0, 1.0, 0.0, 1.0), kMinProbability);
}

TEST(EntropyLossTest, PerValueAndHistogramForms) {
  const std::vector<double> v = {0.0, 1.0, 2.0};
  const std::vector<double> mu = {0.0, 0.0, 0.0}, sd = {1.0, 1.0, 1.0};
  double oracle = 0.0;
  for (double x : v) oracle -= std::log2(gaussianProbability(x, 1.0, 0.0, 1.0));
  EXPECT_NEAR(entropyLoss(v, 1.0, mu, sd), oracle / 3.0, 1e-12);

  const std::vector<uint32_t> sym = {0, 0, 1, 2};
  const HistogramModel m = fitHistogram(sym, 4);
  const std::vector<double> values = {-1.0, -0.9, -0.5, 0.01};  // lo = -1, q = 0.5
  EXPECT_NEAR(entropyLoss(m, values, -1.0, 0.5), rateEstimate(m, sym) / 4.0, 1e-12);
}

// Points in two spatial blobs with different value levels: the voxel model
// should beat a single global histogram.
struct TwoBlobs {
  std::vector<float> pos, values;
  std::vector<uint32_t> symbols;
};

TwoBlobs makeTwoBlobs(std::size_t n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> g(0.0f, 1.0f);
  TwoBlobs b;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i % 2 == 0;
    b.pos.push_back((left ? -5.0f : 5.0f) + g(rng));
    b.pos.push_back(g(rng));
    b.pos.push_back(g(rng));
    const int s = std::clamp(int(std::lround((left ? 40.0f : 200.0f) + 3.0f * g(rng))), 0, 255);
    b.symbols.push_back(uint32_t(s));
    b.values.push_back(float(s));
  }
  return b;
}

TEST(SpatialGaussianTest, FitsVoxelStatisticsAndFallsBack) {
  const TwoBlobs b = makeTwoBlobs(4000);
  SpatialGaussianModel m = fitSpatialGaussian(b.pos, b.values, 1, 2.0, 0.25);
  ASSERT_EQ(m.channels, 1);
  for (float s : m.sigma) EXPECT_GE(s, 0.25f);
  std::size_t sparse = 0;
  for (std::size_t v = 0; v < m.voxelCount(); ++v) {
    if (m.members[v] < 2) {
      ++sparse;
      EXPECT_EQ(m.mean[v], m.globalMean[0]);
      EXPECT_EQ(m.sigma[v], m.globalSigma[0]);
    }
  }
  EXPECT_GT(sparse, 0u);
  const float left[3] = {-5.0f, 0.0f, 0.0f}, right[3] = {5.0f, 0.0f, 0.0f};
  EXPECT_NEAR(m.mu(m.voxelOf(left), 0), 40.0, 1.5);
  EXPECT_NEAR(m.mu(m.voxelOf(right), 0), 200.0, 1.5);
  const HistogramModel h = fitHistogram(b.symbols, 256);
  EXPECT_LT(rateEstimate(m, b.pos, b.values, 1.0), 0.8 * rateEstimate(h, b.symbols));
}

TEST(SpatialGaussianTest, StorageRoundTripAndCoding) {
  const TwoBlobs b = makeTwoBlobs(3000);
  SpatialGaussianModel m = fitSpatialGaussian(b.pos, b.values, 1, suggestVoxelSize(b.pos, 64.0), 0.25);
  snapToStorage(m, 256);
  ByteWriter w;
  serializeSpatialGaussian(m, 256, w);
  auto bytes = w.take();
  ByteReader r(bytes);
  const SpatialGaussianModel back = deserializeSpatialGaussian(r, 256);
  EXPECT_EQ(back.mean, m.mean);
  EXPECT_EQ(back.sigma, m.sigma);
  EXPECT_EQ(back.dims, m.dims);

  std::vector<uint32_t> voxels(b.symbols.size());
  for (std::size_t i = 0; i < voxels.size(); ++i) voxels[i] = back.voxelOf(&b.pos[i * 3]);
  GaussianAnsModel coder(back, voxels, 256);
  const auto stream = ansEncode(b.symbols, coder);
  EXPECT_EQ(ansDecode(stream, coder, b.symbols.size()), b.symbols);
  const double ideal = rateEstimate(back, b.pos, b.values, 1.0) / 8.0;
  EXPECT_LE(double(stream.size()), ideal * 1.01 + 64.0);
}

TEST(SpatialGaussianTest, SnapIsIdempotent) {
  const TwoBlobs b = makeTwoBlobs(500);
  SpatialGaussianModel m = fitSpatialGaussian(b.pos, b.values, 1, 1.0, 0.25);
  snapToStorage(m, 256);
  const SpatialGaussianModel once = m;
  snapToStorage(m, 256);
  EXPECT_EQ(m.mean, once.mean);
  EXPECT_EQ(m.sigma, once.sigma);
}

}  // namespace
}  // namespace gsc
