#include "gscodec/splat.h"

#include <cmath>
#include <limits>

#include "gscodec/synthetic.h"
#include "test_util.h"

namespace gsc {
namespace {

using test::expectError;

TEST(SplatTest, ZerosHasIdentityRotationsAndShapes) {
  const GaussianCloud c = GaussianCloud::zeros(5, 2, 3);
  EXPECT_EQ(c.size(), 5u);
  EXPECT_EQ(c.shCoeffs(), 8);
  EXPECT_EQ(c.shN.size(), 5u * 8 * 3);
  EXPECT_EQ(c.features.size(), 15u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(c.rotations[i * 4], 1.0f);
  EXPECT_TRUE(validate(c).empty()) << validate(c).toString();
}

TEST(SplatTest, ShCoefficientCounts) {
  EXPECT_EQ(shCoeffsForDegree(0), 0);
  EXPECT_EQ(shCoeffsForDegree(1), 3);
  EXPECT_EQ(shCoeffsForDegree(2), 8);
  EXPECT_EQ(shCoeffsForDegree(3), 15);
}

TEST(SplatTest, SelectGathersInOrder) {
  const GaussianCloud c = randomCloud(10, 1, 3);
  const std::vector<uint32_t> idx = {7, 2, 2};
  const GaussianCloud s = c.select(idx);
  ASSERT_EQ(s.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    for (int a = 0; a < 3; ++a) EXPECT_EQ(s.means[k * 3 + a], c.means[idx[k] * 3 + a]);
    for (int j = 0; j < 9; ++j) EXPECT_EQ(s.shN[k * 9 + j], c.shN[idx[k] * 9 + j]);
  }
}

TEST(SplatTest, ValidateReportsProblems) {
  GaussianCloud c = randomCloud(20, 0, 1);
  c.means[5] = std::numeric_limits<float>::quiet_NaN();
  c.rotations[8] = 3.0f;
  c.sh0.pop_back();
  const ValidationReport r = validate(c);
  EXPECT_EQ(r.count("means", "non-finite"), 1u);
  EXPECT_GE(r.count("rotations", "non-unit quaternion"), 1u);
  EXPECT_EQ(r.count("sh0", "dimension mismatch"), 1u);
}

TEST(SplatTest, CanonicalizeNormalizesAndFlips) {
  GaussianCloud c = GaussianCloud::zeros(2);
  const float q[8] = {-2.0f, 0.0f, 2.0f, 0.0f, 0.0f, 0.0f, 0.0f, 3.0f};
  std::copy(q, q + 8, c.rotations.begin());
  const GaussianCloud k = canonicalize(c);
  EXPECT_FLOAT_EQ(k.rotations[0], std::sqrt(0.5f));
  EXPECT_FLOAT_EQ(k.rotations[2], -std::sqrt(0.5f));
  EXPECT_FLOAT_EQ(k.rotations[7], 1.0f);
  EXPECT_GE(k.rotations[4], 0.0f);
  c.rotations.assign(8, 0.0f);
  expectError(ErrorCode::kZeroQuaternion, [&] { canonicalize(c); });
}

TEST(SplatTest, DynamicSelectKeepsMotion) {
  const SyntheticMotion m = syntheticMotion(50, 10, 0.5, 0, 2);
  const DynamicSequence seq = sequenceFromMotion(m, 10, 2);
  const std::vector<uint32_t> idx = {3, 9};
  const DynamicGaussianCloud s = seq.gofs[0].select(idx);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.motion.positionDegree, 2);
  for (int j = 0; j < 6; ++j) EXPECT_EQ(s.motion.positionCoeffs[6 + j], seq.gofs[0].motion.positionCoeffs[9 * 6 + j]);
  EXPECT_TRUE(validate(s).empty()) << validate(s).toString();
}

}  // namespace
}  // namespace gsc
