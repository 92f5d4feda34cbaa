#include "gscodec/config.h"

#include "test_util.h"

namespace gsc {
namespace {

using test::expectError;

TEST(ConfigTest, StaticPresetRoutes) {
  const EncodeConfig c = presetConfig("static-gscodec");
  EXPECT_EQ(c.route("means").codec, Codec::kPngPlane);
  EXPECT_EQ(c.route("means").bits, 16);
  for (const char *a : {"rotations", "scales", "opacity", "sh0"}) {
    EXPECT_EQ(c.route(a).codec, Codec::kPngPlane) << a;
    EXPECT_EQ(c.route(a).bits, 8) << a;
  }
  EXPECT_EQ(c.route("shN").codec, Codec::kVqAns);
  EXPECT_TRUE(c.prune.opacityEnabled);
  EXPECT_FALSE(c.prune.scaleEnabled);
  EXPECT_FALSE(c.prune.outliersEnabled);
  EXPECT_FALSE(c.shMaskEnabled);
  EXPECT_TRUE(c.plasEnabled);
}

TEST(ConfigTest, DynamicPresetAddsMotionRoutes) {
  const EncodeConfig c = presetConfig("dynamic-gscodec");
  EXPECT_EQ(c.route("motion_pos").bits, 16);
  EXPECT_EQ(c.route("t_scale").bits, 8);
  expectError(ErrorCode::kInvalidArgument, [] { presetConfig("nope"); });
}

TEST(ConfigTest, ParsesKeys) {
  const EncodeConfig c = parseConfig(
      "# comment\n"
      "bits = 6\n"
      "means.bits = 12\n"
      "shN.route = ans   # inline comment\n"
      "prune.opacity = off\n"
      "prune.scale = -8, 2\n"
      "prune.outliers = 16, 3\n"
      "mask.sh = 0.01\n"
      "mask.static = 0.002, 8\n"
      "plas = false\n"
      "vq.size = 256\n"
      "entropy.model = gaussian\n"
      "gof_len = 30\n"
      "seed = 7\n");
  EXPECT_EQ(c.route("opacity").bits, 6);
  EXPECT_EQ(c.route("means").bits, 12);
  EXPECT_EQ(c.route("shN").codec, Codec::kAns);
  EXPECT_FALSE(c.prune.opacityEnabled);
  EXPECT_TRUE(c.prune.scaleEnabled);
  EXPECT_DOUBLE_EQ(c.prune.minScale, -8.0);
  EXPECT_DOUBLE_EQ(c.prune.maxScale, 2.0);
  EXPECT_EQ(c.prune.outlierNeighbors, 16);
  EXPECT_DOUBLE_EQ(c.prune.outlierStdMultiplier, 3.0);
  EXPECT_TRUE(c.shMaskEnabled);
  EXPECT_DOUBLE_EQ(c.shMaskThreshold, 0.01);
  EXPECT_TRUE(c.staticMaskEnabled);
  EXPECT_EQ(c.staticMaskSamples, 8);
  EXPECT_FALSE(c.plasEnabled);
  EXPECT_EQ(c.vqSize, 256);
  EXPECT_EQ(c.entropyModel, EntropyModelKind::kSpatialGaussian);
  EXPECT_EQ(c.gofLength, 30);
  EXPECT_EQ(c.seed, 7u);
}

TEST(ConfigTest, PresetKeyResetsFirst) {
  const EncodeConfig c = parseConfig("vq.size = 3\npreset = dynamic-gscodec\nseed = 2\n");
  EXPECT_EQ(c.preset, "dynamic-gscodec");
  EXPECT_EQ(c.vqSize, presetConfig("dynamic-gscodec").vqSize);
  EXPECT_EQ(c.seed, 2u);
}

TEST(ConfigTest, RejectsBadInput) {
  expectError(ErrorCode::kInvalidArgument, [] { parseConfig("unknown.key = 1\n"); });
  expectError(ErrorCode::kInvalidArgument, [] { parseConfig("no equals sign\n"); });
  expectError(ErrorCode::kInvalidArgument, [] { parseConfig("bits = 4\n"); });
  expectError(ErrorCode::kInvalidArgument, [] { parseConfig("means.bits = 17\n"); });
  expectError(ErrorCode::kInvalidArgument, [] { parseConfig("plas = maybe\n"); });
  expectError(ErrorCode::kInvalidArgument, [] { parseConfig("shN.route = zip\n"); });
  expectError(ErrorCode::kInvalidArgument, [] { parseConfig("vq.size = abc\n"); });
  expectError(ErrorCode::kInvalidArgument, [] { parseConfig("prune.scale = 1\n"); });
}

TEST(ConfigTest, SweepSectionsShareDefaults) {
  const auto configs = parseSweepConfigs(
      "seed = 5\n"
      "[b8]\n"
      "bits = 8\n"
      "[b6]\n"
      "bits = 6\n"
      "seed = 9\n");
  ASSERT_EQ(configs.size(), 2u);
  EXPECT_EQ(configs[0].name, "b8");
  EXPECT_EQ(configs[0].config.seed, 5u);
  EXPECT_EQ(configs[1].config.route("sh0").bits, 6);
  EXPECT_EQ(configs[1].config.seed, 9u);
  expectError(ErrorCode::kInvalidArgument, [] { parseSweepConfigs("bits = 8\n"); });
  expectError(ErrorCode::kInvalidArgument, [] { parseSweepConfigs("[broken\n"); });
}

}  // namespace
}  // namespace gsc
