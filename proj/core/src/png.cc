#include "gscodec/png.h"

#include <zlib.h>

#include <array>
#include <cstdlib>
#include <cstring>
#include <string>

#include "gscodec/error.h"

namespace gsc {

namespace {

constexpr std::array<uint8_t, 8> kSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

int colorType(int channels) {
  switch (channels) {
    case 1: return 0;
    case 2: return 4;
    case 3: return 2;
    case 4: return 6;
  }
  throw Error(ErrorCode::kUnsupported, "PNG supports 1-4 channels, got " + std::to_string(channels));
}

int channelsForColorType(int type) {
  switch (type) {
    case 0: return 1;
    case 4: return 2;
    case 2: return 3;
    case 6: return 4;
  }
  throw Error(ErrorCode::kUnsupported, "unsupported PNG color type " + std::to_string(type));
}

void putU32(std::vector<uint8_t> &out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

uint32_t getU32(const uint8_t *p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void writeChunk(std::vector<uint8_t> &out, const char type[4], const std::vector<uint8_t> &data) {
  putU32(out, static_cast<uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  putU32(out, static_cast<uint32_t>(crc));
}

uint8_t paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return uint8_t(a);
  if (pb <= pc) return uint8_t(b);
  return uint8_t(c);
}

// Applies filter `type` to `cur` (prev may be all zeros) into `out`.
void filterRow(int type, const uint8_t *cur, const uint8_t *prev, std::size_t len, std::size_t bpp, uint8_t *out) {
  for (std::size_t i = 0; i < len; ++i) {
    int a = i >= bpp ? cur[i - bpp] : 0;
    int b = prev[i];
    int c = i >= bpp ? prev[i - bpp] : 0;
    int pred = 0;
    switch (type) {
      case 1: pred = a; break;
      case 2: pred = b; break;
      case 3: pred = (a + b) >> 1; break;
      case 4: pred = paeth(a, b, c); break;
    }
    out[i] = uint8_t(cur[i] - pred);
  }
}

void unfilterRow(int type, uint8_t *cur, const uint8_t *prev, std::size_t len, std::size_t bpp) {
  for (std::size_t i = 0; i < len; ++i) {
    int a = i >= bpp ? cur[i - bpp] : 0;
    int b = prev[i];
    int c = i >= bpp ? prev[i - bpp] : 0;
    int pred = 0;
    switch (type) {
      case 0: break;
      case 1: pred = a; break;
      case 2: pred = b; break;
      case 3: pred = (a + b) >> 1; break;
      case 4: pred = paeth(a, b, c); break;
      default: throw Error(ErrorCode::kCorrupt, "invalid PNG filter type " + std::to_string(type));
    }
    cur[i] = uint8_t(cur[i] + pred);
  }
}

}  // namespace

std::vector<uint8_t> encodePng(const PngImage &image) {
  if (image.width <= 0 || image.height <= 0) throw Error(ErrorCode::kInvalidArgument, "PNG dimensions must be positive");
  if (image.bitDepth != 8 && image.bitDepth != 16) {
    throw Error(ErrorCode::kUnsupported, "PNG bit depth must be 8 or 16");
  }
  const int ctype = colorType(image.channels);
  if (image.samples.size() != image.sampleCount()) {
    throw Error(ErrorCode::kDimensionMismatch, "PNG sample buffer does not match dimensions");
  }
  const std::size_t bpp = std::size_t(image.channels) * (image.bitDepth / 8);
  const std::size_t rowLen = bpp * image.width;

  // Filtered scanlines: one filter byte then the row.
  std::vector<uint8_t> raw((rowLen + 1) * image.height);
  std::vector<uint8_t> prev(rowLen, 0), cur(rowLen), trial(rowLen), best(rowLen);
  for (int y = 0; y < image.height; ++y) {
    const uint16_t *src = &image.samples[std::size_t(y) * image.width * image.channels];
    const std::size_t n = std::size_t(image.width) * image.channels;
    if (image.bitDepth == 8) {
      for (std::size_t i = 0; i < n; ++i) {
        if (src[i] > 255) throw Error(ErrorCode::kOutOfRange, "8-bit PNG sample exceeds 255");
        cur[i] = uint8_t(src[i]);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        cur[2 * i] = uint8_t(src[i] >> 8);
        cur[2 * i + 1] = uint8_t(src[i]);
      }
    }
    // Minimum sum of absolute signed residuals, the usual libpng heuristic.
    int bestType = 0;
    uint64_t bestCost = UINT64_MAX;
    for (int type = 0; type < 5; ++type) {
      filterRow(type, cur.data(), prev.data(), rowLen, bpp, trial.data());
      uint64_t cost = 0;
      for (uint8_t v : trial) cost += v < 128 ? v : 256 - v;
      if (cost < bestCost) {
        bestCost = cost;
        bestType = type;
        best.swap(trial);
      }
    }
    uint8_t *dst = &raw[std::size_t(y) * (rowLen + 1)];
    dst[0] = uint8_t(bestType);
    std::memcpy(dst + 1, best.data(), rowLen);
    prev.swap(cur);
  }

  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw Error(ErrorCode::kIo, "zlib compression failed");
  }
  z.resize(zlen);

  std::vector<uint8_t> out(kSignature.begin(), kSignature.end());
  std::vector<uint8_t> ihdr;
  putU32(ihdr, static_cast<uint32_t>(image.width));
  putU32(ihdr, static_cast<uint32_t>(image.height));
  ihdr.push_back(uint8_t(image.bitDepth));
  ihdr.push_back(uint8_t(ctype));
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  writeChunk(out, "IHDR", ihdr);
  writeChunk(out, "IDAT", z);
  writeChunk(out, "IEND", {});
  return out;
}

PngImage decodePng(std::span<const uint8_t> bytes) {
  if (bytes.size() < kSignature.size() || std::memcmp(bytes.data(), kSignature.data(), kSignature.size()) != 0) {
    throw Error(ErrorCode::kCorrupt, "missing PNG signature");
  }
  PngImage img;
  bool haveHeader = false, haveEnd = false;
  std::vector<uint8_t> z;
  std::size_t pos = kSignature.size();
  while (pos < bytes.size() && !haveEnd) {
    if (bytes.size() - pos < 12) throw Error(ErrorCode::kTruncated, "PNG chunk header truncated at byte " + std::to_string(pos));
    const uint32_t len = getU32(&bytes[pos]);
    if (len > bytes.size() - pos - 12) {
      throw Error(ErrorCode::kTruncated, "PNG chunk overruns file at byte " + std::to_string(pos));
    }
    const uint8_t *type = &bytes[pos + 4];
    const uint8_t *data = type + 4;
    const uint32_t crc = getU32(data + len);
    if (crc32(0L, type, len + 4) != crc) {
      throw Error(ErrorCode::kChecksum, "PNG chunk CRC mismatch at byte " + std::to_string(pos));
    }
    const std::string name(reinterpret_cast<const char *>(type), 4);
    if (name == "IHDR") {
      if (len != 13) throw Error(ErrorCode::kCorrupt, "IHDR must be 13 bytes");
      img.width = static_cast<int>(getU32(data));
      img.height = static_cast<int>(getU32(data + 4));
      img.bitDepth = data[8];
      img.channels = channelsForColorType(data[9]);
      if (img.width <= 0 || img.height <= 0) throw Error(ErrorCode::kCorrupt, "PNG dimensions must be positive");
      if (img.bitDepth != 8 && img.bitDepth != 16) {
        throw Error(ErrorCode::kUnsupported, "unsupported PNG bit depth " + std::to_string(img.bitDepth));
      }
      if (data[10] != 0 || data[11] != 0) throw Error(ErrorCode::kCorrupt, "unknown PNG compression/filter method");
      if (data[12] != 0) throw Error(ErrorCode::kUnsupported, "interlaced PNG is not supported");
      haveHeader = true;
    } else if (name == "IDAT") {
      if (!haveHeader) throw Error(ErrorCode::kCorrupt, "IDAT before IHDR");
      z.insert(z.end(), data, data + len);
    } else if (name == "IEND") {
      haveEnd = true;
    } else if (!(type[0] & 0x20)) {
      throw Error(ErrorCode::kUnsupported, "unknown critical PNG chunk " + name);
    }
    pos += 12 + std::size_t(len);
  }
  if (!haveHeader || !haveEnd) throw Error(ErrorCode::kTruncated, "PNG stream ended without IHDR/IEND");

  const std::size_t bpp = std::size_t(img.channels) * (img.bitDepth / 8);
  const std::size_t rowLen = bpp * img.width;
  std::vector<uint8_t> raw((rowLen + 1) * img.height);
  uLongf rawLen = static_cast<uLongf>(raw.size());
  int rc = uncompress(raw.data(), &rawLen, z.data(), static_cast<uLong>(z.size()));
  if (rc != Z_OK || rawLen != raw.size()) throw Error(ErrorCode::kCorrupt, "PNG image data failed to inflate");

  img.samples.resize(img.sampleCount());
  std::vector<uint8_t> prev(rowLen, 0);
  for (int y = 0; y < img.height; ++y) {
    uint8_t *row = &raw[std::size_t(y) * (rowLen + 1)];
    unfilterRow(row[0], row + 1, prev.data(), rowLen, bpp);
    uint16_t *dst = &img.samples[std::size_t(y) * img.width * img.channels];
    const std::size_t n = std::size_t(img.width) * img.channels;
    if (img.bitDepth == 8) {
      for (std::size_t i = 0; i < n; ++i) dst[i] = row[1 + i];
    } else {
      for (std::size_t i = 0; i < n; ++i) dst[i] = uint16_t((row[1 + 2 * i] << 8) | row[2 + 2 * i]);
    }
    std::memcpy(prev.data(), row + 1, rowLen);
  }
  return img;
}

}  // namespace gsc
