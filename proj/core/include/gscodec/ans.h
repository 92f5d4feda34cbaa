#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gsc {

// Fixed-point precision of every coding distribution: frequencies sum to 2^24.
constexpr int kAnsPrecisionBits = 24;
constexpr uint32_t kAnsTotal = 1u << kAnsPrecisionBits;
// Largest alphabet a coding table may hold (each symbol needs mass >= 1).
constexpr uint32_t kAnsMaxSymbols = 1u << 20;

struct AnsInterval {
  uint32_t start = 0;
  uint32_t freq = 0;
};

// Quantized CDF: cum[0] = 0, cum[S] = 2^24, every symbol has freq >= 1.
class CdfTable {
 public:
  CdfTable() = default;

  // cum(s) = s + floor(F(s) * (2^24 - S)) for a non-decreasing F with F(0) = 0
  // and F(S) = 1 (forced exactly). The +s term guarantees codability.
  static CdfTable fromCumulative(uint32_t symbolCount, const std::function<double(uint32_t)> &cdf);
  // Same mapping from a probability vector (cumulated left to right).
  static CdfTable fromProbabilities(std::span<const double> probs);

  uint32_t symbolCount() const { return cum_.empty() ? 0 : static_cast<uint32_t>(cum_.size() - 1); }
  AnsInterval interval(uint32_t s) const { return {cum_[s], cum_[s + 1] - cum_[s]}; }
  uint32_t lookup(uint32_t slot) const;  // symbol whose interval contains slot
  const std::vector<uint32_t> &cumulative() const { return cum_; }

 private:
  std::vector<uint32_t> cum_;
};

// Per-position coding distribution. Position i of a stream may use a
// different distribution (e.g. per channel or per spatial context).
class AnsModel {
 public:
  virtual ~AnsModel() = default;
  virtual uint32_t symbolCount(std::size_t i) const = 0;
  virtual AnsInterval interval(std::size_t i, uint32_t symbol) const = 0;
  virtual uint32_t lookup(std::size_t i, uint32_t slot, AnsInterval *iv) const = 0;
};

// Position i uses tables[i % tables.size()] (point-major interleaved channels).
class TableAnsModel : public AnsModel {
 public:
  explicit TableAnsModel(std::vector<const CdfTable *> tables);
  uint32_t symbolCount(std::size_t i) const override { return table(i).symbolCount(); }
  AnsInterval interval(std::size_t i, uint32_t s) const override { return table(i).interval(s); }
  uint32_t lookup(std::size_t i, uint32_t slot, AnsInterval *iv) const override;

 private:
  const CdfTable &table(std::size_t i) const { return *tables_[i % tables_.size()]; }
  std::vector<const CdfTable *> tables_;
};

// rANS with a 64-bit state and 32-bit renormalization words. Layout: the final
// encoder state (u64 LE) followed by the words in decode order (u32 LE). An
// empty stream is the 8-byte initial state.
std::vector<uint8_t> ansEncode(std::span<const uint32_t> symbols, const AnsModel &model);
std::vector<uint32_t> ansDecode(std::span<const uint8_t> bytes, const AnsModel &model, std::size_t count);

// Convenience overloads for a single table.
std::vector<uint8_t> ansEncode(std::span<const uint32_t> symbols, const CdfTable &table);
std::vector<uint32_t> ansDecode(std::span<const uint8_t> bytes, const CdfTable &table, std::size_t count);

}  // namespace gsc
