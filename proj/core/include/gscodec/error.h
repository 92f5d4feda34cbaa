#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsc {

enum class ErrorCode {
  kInvalidArgument,
  kMalformedHeader,
  kTruncated,
  kMissingProperty,
  kUnsupported,
  kEmptyCloud,
  kZeroQuaternion,
  kNonFinite,
  kDegenerateRange,
  kOutOfRange,
  kDimensionMismatch,
  kRankDeficient,
  kBadMagic,
  kBadVersion,
  kChecksum,
  kCorrupt,
  kIo,
};

std::string_view errorCodeName(ErrorCode code);

// Single exception type for the library. The code distinguishes failure
// classes; the stage (if any) names the codec stage that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message, std::string stage = {});

  ErrorCode code() const { return code_; }
  const std::string &stage() const { return stage_; }
  const std::string &detail() const { return detail_; }

  // Returns a copy tagged with an outer stage, e.g. "encode/prune".
  Error withStage(std::string stage) const;

 private:
  ErrorCode code_;
  std::string stage_;
  std::string detail_;
};

}  // namespace gsc
