#include "gscodec/rd_sweep.h"

#include "gscodec/synthetic.h"
#include "test_util.h"

namespace gsc {
namespace {

TEST(RdSweepTest, RateUnits) {
  EXPECT_DOUBLE_EQ(megabytes(1 << 20), 1.0);
  // 19.65 MB over 300 frames at 30 fps.
  const uint64_t bytes = 6550000;
  EXPECT_NEAR(megabitsPerSecond(bytes, 300, 30.0), 5.24, 1e-9);
}

TEST(RdSweepTest, StaticSweepOrdersBitWidths) {
  const GaussianCloud cloud = proceduralScene(4000, 1, 2);
  const auto cams = orbitCameras(cloud, 2, 48, 48);
  const auto configs = parseSweepConfigs(
      "vq.size = 64\nvq.iterations = 4\nplas.proposals = 4\n"
      "[b8]\nbits = 8\n[b6]\nbits = 6\n");
  const auto rows = rdSweep(cloud, cams, configs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].config, "b8");
  EXPECT_LT(rows[1].rate, rows[0].rate);
  EXPECT_DOUBLE_EQ(rows[0].rate, megabytes(rows[0].bytes));
  EXPECT_GT(rows[0].psnr, 30.0);
  EXPECT_LE(rows[0].ssim, 1.0);
  const std::string csv = rdCsv(rows);
  EXPECT_EQ(csv.rfind("config,bytes,rate,psnr,ssim\n", 0), 0u);
  EXPECT_NE(csv.find("\nb6,"), std::string::npos);
}

TEST(RdSweepTest, DynamicSweepReportsMbps) {
  const SyntheticMotion m = syntheticMotion(800, 8, 0.5, 0, 3);
  const DynamicSequence seq = sequenceFromMotion(m, 4, 2);
  const auto cams = orbitCameras(m.appearance, 1, 32, 32);
  const auto configs = parseSweepConfigs("preset = dynamic-gscodec\nplas.proposals = 2\n[d]\n");
  const auto rows = rdSweep(seq, cams, configs);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].rate, megabitsPerSecond(rows[0].bytes, 8, seq.fps));
}

}  // namespace
}  // namespace gsc
