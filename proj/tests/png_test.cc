#include "gscodec/png.h"

#include <random>

#include <zlib.h>

#include "test_util.h"

namespace gsc {
namespace {

using test::expectError;

PngImage randomImage(int w, int h, int channels, int depth, uint64_t seed, bool smooth) {
  std::mt19937_64 rng(seed);
  PngImage img;
  img.width = w;
  img.height = h;
  img.channels = channels;
  img.bitDepth = depth;
  img.samples.resize(img.sampleCount());
  const uint32_t top = depth == 16 ? 65535 : 255;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        const uint32_t v = smooth ? uint32_t((x * 3 + y * 5 + c * 40) % (top + 1)) : uint32_t(rng() % (top + 1));
        img.samples[(std::size_t(y) * w + x) * channels + c] = uint16_t(v);
      }
    }
  }
  return img;
}

class PngRoundTrip : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(PngRoundTrip, Lossless) {
  const auto [channels, depth] = GetParam();
  for (bool smooth : {false, true}) {
    const PngImage img = randomImage(37, 23, channels, depth, channels * 100 + depth, smooth);
    const PngImage back = decodePng(encodePng(img));
    EXPECT_EQ(back.width, img.width);
    EXPECT_EQ(back.height, img.height);
    EXPECT_EQ(back.channels, img.channels);
    EXPECT_EQ(back.bitDepth, img.bitDepth);
    EXPECT_EQ(back.samples, img.samples);
  }
}

INSTANTIATE_TEST_SUITE_P(Formats, PngRoundTrip,
                         ::testing::Combine(::testing::Values(1, 2, 3, 4), ::testing::Values(8, 16)));

TEST(PngTest, StandardSignatureAndChunkCrcs) {
  const auto bytes = encodePng(randomImage(8, 8, 1, 8, 1, true));
  const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  ASSERT_GE(bytes.size(), 8u);
  EXPECT_TRUE(std::equal(sig, sig + 8, bytes.begin()));
  // Walk the chunks and check each CRC with zlib directly.
  std::size_t pos = 8;
  std::vector<std::string> types;
  while (pos + 12 <= bytes.size()) {
    const uint32_t len = uint32_t(bytes[pos]) << 24 | uint32_t(bytes[pos + 1]) << 16 | uint32_t(bytes[pos + 2]) << 8 | bytes[pos + 3];
    types.emplace_back(reinterpret_cast<const char *>(&bytes[pos + 4]), 4);
    const uint32_t crc = uint32_t(crc32(0, &bytes[pos + 4], len + 4));
    const std::size_t c = pos + 8 + len;
    const uint32_t stored = uint32_t(bytes[c]) << 24 | uint32_t(bytes[c + 1]) << 16 | uint32_t(bytes[c + 2]) << 8 | bytes[c + 3];
    EXPECT_EQ(crc, stored) << types.back();
    pos = c + 4;
  }
  EXPECT_EQ(pos, bytes.size());
  ASSERT_GE(types.size(), 3u);
  EXPECT_EQ(types.front(), "IHDR");
  EXPECT_EQ(types.back(), "IEND");
}

TEST(PngTest, SmoothImagesCompressBetterThanNoise) {
  const auto smooth = encodePng(randomImage(64, 64, 1, 8, 2, true));
  const auto noise = encodePng(randomImage(64, 64, 1, 8, 2, false));
  EXPECT_LT(smooth.size() * 4, noise.size());
}

TEST(PngTest, DetectsDamage) {
  auto bytes = encodePng(randomImage(16, 16, 3, 8, 3, false));
  auto bad = bytes;
  bad[0] = 0;
  expectError(ErrorCode::kCorrupt, [&] { decodePng(bad); });
  bad = bytes;
  bad[40] ^= 0x55;  // inside IDAT
  expectError(ErrorCode::kChecksum, [&] { decodePng(bad); });
  expectError(ErrorCode::kTruncated, [&] { decodePng(std::span<const uint8_t>(bytes.data(), 30)); });
}

}  // namespace
}  // namespace gsc
