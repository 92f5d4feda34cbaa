#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gsc {

// Row-major interleaved samples; 8-bit images keep values in [0, 255].
struct PngImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 gray, 2 gray+alpha, 3 RGB, 4 RGBA
  int bitDepth = 8;  // 8 or 16
  std::vector<uint16_t> samples;

  std::size_t sampleCount() const { return std::size_t(width) * height * channels; }
  uint16_t at(int x, int y, int c) const { return samples[(std::size_t(y) * width + x) * channels + c]; }
};

// Non-interlaced PNG with per-row adaptive filtering and zlib level 9.
std::vector<uint8_t> encodePng(const PngImage &image);

// Accepts non-interlaced gray / gray-alpha / RGB / RGBA at 8 or 16 bits.
// Throws kCorrupt (bad structure), kChecksum (CRC), kTruncated, kUnsupported.
PngImage decodePng(std::span<const uint8_t> bytes);

}  // namespace gsc
