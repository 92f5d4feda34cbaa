#include "gscodec/error.h"

namespace gsc {

namespace {

std::string format(ErrorCode code, const std::string &message, const std::string &stage) {
  std::string out;
  if (!stage.empty()) out += "[" + stage + "] ";
  out += std::string(errorCodeName(code));
  out += ": ";
  out += message;
  return out;
}

}  // namespace

std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kMissingProperty: return "missing property";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kEmptyCloud: return "empty cloud";
    case ErrorCode::kZeroQuaternion: return "zero quaternion";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kDegenerateRange: return "degenerate range";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kRankDeficient: return "rank deficient";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kBadVersion: return "bad version";
    case ErrorCode::kChecksum: return "checksum mismatch";
    case ErrorCode::kCorrupt: return "corrupt data";
    case ErrorCode::kIo: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorCode code, const std::string &message, std::string stage)
    : std::runtime_error(format(code, message, stage)),
      code_(code),
      stage_(std::move(stage)),
      detail_(message) {}

Error Error::withStage(std::string stage) const {
  if (!stage_.empty()) stage += "/" + stage_;
  return Error(code_, detail_, std::move(stage));
}

}  // namespace gsc
