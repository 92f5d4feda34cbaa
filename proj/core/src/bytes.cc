#include "gscodec/bytes.h"

#include <zlib.h>

#include "gscodec/error.h"

namespace gsc {

void ByteWriter::varint(uint64_t v) {
  while (v >= 0x80) {
    buf_.push_back(uint8_t(v | 0x80));
    v >>= 7;
  }
  buf_.push_back(uint8_t(v));
}

void ByteWriter::str(const std::string &s) {
  if (s.size() > 0xffff) throw Error(ErrorCode::kInvalidArgument, "string too long to serialize");
  u16(static_cast<uint16_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteReader::need(std::size_t n) const {
  if (n > data_.size() - pos_) {
    throw Error(ErrorCode::kTruncated, what_ + " truncated at byte " + std::to_string(pos_) + " (needed " +
                                           std::to_string(n) + " more)");
  }
}

uint64_t ByteReader::varint() {
  uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    uint8_t b = u8();
    v |= uint64_t(b & 0x7f) << shift;
    if (!(b & 0x80)) return v;
  }
  throw Error(ErrorCode::kCorrupt, what_ + ": varint too long at byte " + std::to_string(pos_));
}

std::string ByteReader::str() {
  const uint16_t n = u16();
  auto b = bytes(n);
  return std::string(b.begin(), b.end());
}

std::span<const uint8_t> ByteReader::bytes(std::size_t n) {
  need(n);
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::vector<uint8_t> deflateBytes(std::span<const uint8_t> data) {
  uLongf len = compressBound(static_cast<uLong>(data.size()));
  std::vector<uint8_t> out(len);
  if (compress2(out.data(), &len, data.data(), static_cast<uLong>(data.size()), 9) != Z_OK) {
    throw Error(ErrorCode::kIo, "zlib compression failed");
  }
  out.resize(len);
  return out;
}

std::vector<uint8_t> inflateBytes(std::span<const uint8_t> data, std::size_t expectedSize) {
  std::vector<uint8_t> out(expectedSize);
  uLongf len = static_cast<uLongf>(expectedSize);
  // uncompress rejects a zero-capacity destination even for empty payloads.
  uint8_t dummy = 0;
  int rc = uncompress(expectedSize ? out.data() : &dummy, &len, data.data(), static_cast<uLong>(data.size()));
  if (rc != Z_OK || len != expectedSize) throw Error(ErrorCode::kCorrupt, "deflate payload failed to inflate");
  return out;
}

uint32_t crc32Of(std::span<const uint8_t> data) {
  return static_cast<uint32_t>(crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

}  // namespace gsc
