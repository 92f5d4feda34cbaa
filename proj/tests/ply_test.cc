#include "gscodec/ply.h"

#include <cstring>
#include <string>

#include "gscodec/synthetic.h"
#include "test_util.h"

namespace gsc {
namespace {

using test::expectError;

std::span<const uint8_t> asBytes(const std::string &s) {
  return {reinterpret_cast<const uint8_t *>(s.data()), s.size()};
}

TEST(PlyTest, BinaryRoundTripIsExact) {
  for (int deg : {0, 1, 3}) {
    const GaussianCloud c = randomCloud(257, deg, 10 + deg, deg == 1 ? 4 : 0);
    const GaussianCloud back = loadPly(savePly(c));
    EXPECT_EQ(back.shDegree, deg);
    EXPECT_EQ(back.featureDim, c.featureDim);
    EXPECT_EQ(back.means, c.means);
    EXPECT_EQ(back.rotations, c.rotations);
    EXPECT_EQ(back.logScales, c.logScales);
    EXPECT_EQ(back.opacityLogits, c.opacityLogits);
    EXPECT_EQ(back.sh0, c.sh0);
    EXPECT_EQ(back.shN, c.shN);
    EXPECT_EQ(back.features, c.features);
  }
}

TEST(PlyTest, ReadsAsciiWithExtraProperties) {
  const std::string text =
      "ply\nformat ascii 1.0\nelement vertex 2\n"
      "property float x\nproperty float y\nproperty float z\nproperty float nx\n"
      "property float f_dc_0\nproperty float f_dc_1\nproperty float f_dc_2\nproperty float opacity\n"
      "property float scale_0\nproperty float scale_1\nproperty float scale_2\n"
      "property float rot_0\nproperty float rot_1\nproperty float rot_2\nproperty float rot_3\nend_header\n"
      "1 2 3 9 0.1 0.2 0.3 -1 -3 -3 -3 1 0 0 0\n"
      "4 5 6 9 0.4 0.5 0.6 2 -2 -2 -2 0 1 0 0\n";
  const GaussianCloud c = loadPly(asBytes(text));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.means, (std::vector<float>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(c.opacityLogits, (std::vector<float>{-1, 2}));
  EXPECT_FLOAT_EQ(c.sh0[4], 0.5f);
  EXPECT_EQ(c.shDegree, 0);
}

TEST(PlyTest, Errors) {
  const std::string missing =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nend_header\n1 2\n";
  expectError(ErrorCode::kMissingProperty, [&] { loadPly(asBytes(missing)); });
  expectError(ErrorCode::kMalformedHeader, [&] { loadPly(asBytes(std::string("plx\n"))); });
  auto bytes = savePly(randomCloud(10, 0, 1));
  bytes.resize(bytes.size() - 7);
  expectError(ErrorCode::kTruncated, [&] { loadPly(bytes); });
  expectError(ErrorCode::kEmptyCloud, [] { savePly(GaussianCloud{}); });
}

TEST(PlyTest, DynamicRoundTrip) {
  const SyntheticMotion m = syntheticMotion(40, 12, 0.5, 1, 3);
  const DynamicSequence seq = sequenceFromMotion(m, 6, 3);
  GofSegment seg;
  const DynamicGaussianCloud back = loadDynamicPly(saveDynamicPly(seq.gofs[1], seq.segments[1]), &seg);
  EXPECT_EQ(seg.frameStart, seq.segments[1].frameStart);
  EXPECT_EQ(seg.frameEnd, seq.segments[1].frameEnd);
  EXPECT_EQ(back.motion.positionCoeffs, seq.gofs[1].motion.positionCoeffs);
  EXPECT_EQ(back.motion.timeCenter, seq.gofs[1].motion.timeCenter);
  EXPECT_EQ(back.base.means, seq.gofs[1].base.means);
}

}  // namespace
}  // namespace gsc
