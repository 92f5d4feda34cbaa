#include "gscodec/ans.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gscodec/error.h"

namespace gsc {

namespace {

constexpr uint64_t kStateLow = 1ull << 31;  // L: state lives in [L, L * 2^32)

}  // namespace

CdfTable CdfTable::fromCumulative(uint32_t symbolCount, const std::function<double(uint32_t)> &cdf) {
  if (symbolCount < 1 || symbolCount > kAnsMaxSymbols) {
    throw Error(ErrorCode::kInvalidArgument, "coding alphabet must hold 1.." + std::to_string(kAnsMaxSymbols) +
                                                 " symbols, got " + std::to_string(symbolCount));
  }
  CdfTable t;
  t.cum_.resize(symbolCount + 1);
  const double spread = double(kAnsTotal - symbolCount);
  t.cum_[0] = 0;
  for (uint32_t s = 1; s < symbolCount; ++s) {
    double f = std::clamp(cdf(s), 0.0, 1.0);
    uint32_t c = s + static_cast<uint32_t>(std::floor(f * spread));
    // Guard against a non-monotone F from floating-point noise.
    t.cum_[s] = std::max(c, t.cum_[s - 1] + 1);
  }
  t.cum_[symbolCount] = kAnsTotal;
  for (uint32_t s = symbolCount; s-- > 1;) {
    // Keep freq >= 1 at the top end if clamping pushed entries up.
    t.cum_[s] = std::min(t.cum_[s], t.cum_[s + 1] - 1);
  }
  return t;
}

CdfTable CdfTable::fromProbabilities(std::span<const double> probs) {
  std::vector<double> prefix(probs.size() + 1, 0.0);
  for (std::size_t s = 0; s < probs.size(); ++s) prefix[s + 1] = prefix[s] + probs[s];
  const double total = prefix.back();
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "probabilities must have positive mass");
  return fromCumulative(static_cast<uint32_t>(probs.size()), [&](uint32_t s) { return prefix[s] / total; });
}

uint32_t CdfTable::lookup(uint32_t slot) const {
  auto it = std::upper_bound(cum_.begin(), cum_.end(), slot);
  return static_cast<uint32_t>(it - cum_.begin()) - 1;
}

TableAnsModel::TableAnsModel(std::vector<const CdfTable *> tables) : tables_(std::move(tables)) {
  if (tables_.empty()) throw Error(ErrorCode::kInvalidArgument, "table model needs at least one table");
}

uint32_t TableAnsModel::lookup(std::size_t i, uint32_t slot, AnsInterval *iv) const {
  const CdfTable &t = table(i);
  uint32_t s = t.lookup(slot);
  *iv = t.interval(s);
  return s;
}

std::vector<uint8_t> ansEncode(std::span<const uint32_t> symbols, const AnsModel &model) {
  std::vector<uint32_t> words;
  words.reserve(symbols.size() / 4 + 4);
  uint64_t x = kStateLow;
  for (std::size_t i = symbols.size(); i-- > 0;) {
    const uint32_t s = symbols[i];
    if (s >= model.symbolCount(i)) {
      throw Error(ErrorCode::kOutOfRange, "symbol " + std::to_string(s) + " at position " + std::to_string(i) +
                                              " is outside the coding alphabet");
    }
    const AnsInterval iv = model.interval(i, s);
    if (iv.freq == 0) {
      throw Error(ErrorCode::kOutOfRange, "symbol " + std::to_string(s) + " has zero coding mass");
    }
    const uint64_t xMax = ((kStateLow >> kAnsPrecisionBits) << 32) * iv.freq;
    if (x >= xMax) {
      words.push_back(static_cast<uint32_t>(x));
      x >>= 32;
    }
    x = ((x / iv.freq) << kAnsPrecisionBits) + (x % iv.freq) + iv.start;
  }
  std::vector<uint8_t> out;
  out.reserve(8 + 4 * words.size());
  for (int b = 0; b < 8; ++b) out.push_back(uint8_t(x >> (8 * b)));
  for (std::size_t k = words.size(); k-- > 0;) {
    for (int b = 0; b < 4; ++b) out.push_back(uint8_t(words[k] >> (8 * b)));
  }
  return out;
}

std::vector<uint32_t> ansDecode(std::span<const uint8_t> bytes, const AnsModel &model, std::size_t count) {
  if (bytes.size() < 8) throw Error(ErrorCode::kTruncated, "ANS stream shorter than its 8-byte state");
  if ((bytes.size() - 8) % 4 != 0) throw Error(ErrorCode::kCorrupt, "ANS stream length is not word aligned");
  uint64_t x = 0;
  for (int b = 0; b < 8; ++b) x |= uint64_t(bytes[b]) << (8 * b);
  std::size_t pos = 8;
  std::vector<uint32_t> out(count);
  const uint32_t mask = kAnsTotal - 1;
  for (std::size_t i = 0; i < count; ++i) {
    if (x < kStateLow) throw Error(ErrorCode::kCorrupt, "ANS state underflow at symbol " + std::to_string(i));
    AnsInterval iv;
    const uint32_t slot = static_cast<uint32_t>(x & mask);
    out[i] = model.lookup(i, slot, &iv);
    x = uint64_t(iv.freq) * (x >> kAnsPrecisionBits) + slot - iv.start;
    if (x < kStateLow) {
      if (pos + 4 > bytes.size()) {
        throw Error(ErrorCode::kTruncated, "ANS stream truncated at symbol " + std::to_string(i));
      }
      uint32_t w = 0;
      for (int b = 0; b < 4; ++b) w |= uint32_t(bytes[pos + b]) << (8 * b);
      pos += 4;
      x = (x << 32) | w;
    }
  }
  if (x != kStateLow || pos != bytes.size()) {
    throw Error(ErrorCode::kCorrupt, "ANS stream did not end in the initial state");
  }
  return out;
}

std::vector<uint8_t> ansEncode(std::span<const uint32_t> symbols, const CdfTable &table) {
  return ansEncode(symbols, TableAnsModel({&table}));
}

std::vector<uint32_t> ansDecode(std::span<const uint8_t> bytes, const CdfTable &table, std::size_t count) {
  return ansDecode(bytes, TableAnsModel({&table}), count);
}

}  // namespace gsc
