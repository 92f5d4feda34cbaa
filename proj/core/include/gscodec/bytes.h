#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace gsc {

// Little-endian serializer used by the container and model tables.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) { putLe(v, 2); }
  void u32(uint32_t v) { putLe(v, 4); }
  void u64(uint64_t v) { putLe(v, 8); }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void varint(uint64_t v);
  void str(const std::string &s);  // u16 length + bytes
  void bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  std::size_t size() const { return buf_.size(); }
  std::vector<uint8_t> &buffer() { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  void putLe(uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
  }
  std::vector<uint8_t> buf_;
};

// Bounds-checked reader; every overrun throws kTruncated naming `what`.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data, std::string what = "stream") : data_(data), what_(std::move(what)) {}

  uint8_t u8() { return uint8_t(getLe(1)); }
  uint16_t u16() { return uint16_t(getLe(2)); }
  uint32_t u32() { return uint32_t(getLe(4)); }
  uint64_t u64() { return getLe(8); }
  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  uint64_t varint();
  std::string str();
  std::span<const uint8_t> bytes(std::size_t n);

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const;
  uint64_t getLe(int n) {
    need(n);
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= uint64_t(data_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const uint8_t> data_;
  std::size_t pos_ = 0;
  std::string what_;
};

// zlib helpers (level 9). inflateBytes throws kCorrupt on malformed input or a
// size mismatch against `expectedSize`.
std::vector<uint8_t> deflateBytes(std::span<const uint8_t> data);
std::vector<uint8_t> inflateBytes(std::span<const uint8_t> data, std::size_t expectedSize);

uint32_t crc32Of(std::span<const uint8_t> data);

}  // namespace gsc
