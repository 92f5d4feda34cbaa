#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gscodec/config.h"
#include "gscodec/plas.h"
#include "gscodec/preprocess.h"
#include "gscodec/quantize.h"
#include "gscodec/splat.h"

namespace gsc {

constexpr char kContainerMagic[4] = {'G', 'S', 'C', 'S'};
constexpr uint16_t kContainerVersion = 1;

enum class Flavor : uint8_t { kStatic = 0, kDynamic = 1 };

struct GofInfo {
  uint32_t index = 0;
  uint32_t frameStart = 0;
  uint32_t frameEnd = 1;
  uint32_t pointCount = 0;
  uint32_t width = 0;
  uint32_t height = 0;
  float timeStart = 0.0f;
  float timeEnd = 1.0f;
  MotionVariant variant = MotionVariant::kNone;
  uint8_t positionDegree = 0;
  uint8_t rotationDegree = 0;
  uint16_t basisCount = 0;
  uint16_t controlCount = 0;
  bool temporalOpacity = false;
};

struct ChunkInfo {
  uint32_t gof = 0;
  std::string name;
  Codec codec = Codec::kRaw;
  Transform transform = Transform::kIdentity;
  uint8_t bits = 0;
  uint16_t channels = 0;
  std::vector<float> rangeMin;  // per channel, quantized routes only
  std::vector<float> rangeMax;
  EntropyModelKind entropyModel = EntropyModelKind::kFactorized;
  uint64_t offset = 0;  // absolute file offset
  uint64_t length = 0;
  uint32_t crc = 0;

  QuantizationScheme scheme(int channel) const;
};

struct ContainerInfo {
  uint16_t version = kContainerVersion;
  Flavor flavor = Flavor::kStatic;
  uint8_t shDegree = 0;
  uint16_t featureDim = 0;
  uint32_t frameCount = 1;
  float fps = 0.0f;
  std::vector<GofInfo> gofs;
  std::vector<ChunkInfo> chunks;
  uint32_t headerLength = 0;
  uint64_t payloadOffset = 0;  // first chunk byte
  uint64_t fileSize = 0;

  std::vector<const ChunkInfo *> chunksOf(uint32_t gof) const;
};

// Parses and checks magic, version, header and chunk ranges; does not read
// chunk payloads. Throws kBadMagic, kBadVersion, kTruncated, kCorrupt.
ContainerInfo readContainerInfo(std::span<const uint8_t> bytes);

// Per-attribute symbols as coded, point-major in decoded order. Entries the
// codec skips (masked-out points on ans / vq routes) read as 0.
struct AttributeSymbols {
  Codec codec = Codec::kRaw;
  int channels = 0;
  int bits = 0;
  std::vector<QuantizationScheme> schemes;  // per channel, quantized routes only
  std::vector<uint32_t> symbols;
};

struct GofTrace {
  PruneReport prune;
  // order[k]: index (into the pruned, canonicalized input) of decoded point k.
  std::vector<uint32_t> order;
  PlaneGrid grid;  // in decoded order: perm[k] is the k-th valid cell
  PlasStats plas;
  std::optional<AttributeMask> shMask;      // decoded order
  std::optional<AttributeMask> staticMask;  // decoded order
  std::map<std::string, AttributeSymbols> attributes;
  DynamicGaussianCloud reconstruction;  // what the decoder will return
};

struct EncodeResult {
  std::vector<uint8_t> bytes;
  std::vector<GofTrace> gofs;
};

// prune -> canonicalize -> masks -> PLAS sort -> per-attribute coding.
// Errors carry a stage tag such as "encode/prune" or "encode/shN".
EncodeResult encodeStatic(const GaussianCloud &cloud, const EncodeConfig &config);
GaussianCloud decodeStatic(std::span<const uint8_t> bytes, GofTrace *trace = nullptr);

// Every GOF is coded from its own chunks only.
EncodeResult encodeDynamic(const DynamicSequence &sequence, const EncodeConfig &config);
DynamicSequence decodeDynamic(std::span<const uint8_t> bytes, std::vector<GofTrace> *traces = nullptr);
// Reads only GOF `gof`'s chunks (others may be damaged).
DynamicGaussianCloud decodeGof(std::span<const uint8_t> bytes, uint32_t gof, GofTrace *trace = nullptr);

struct BreakdownRow {
  std::string label;
  uint64_t bytes = 0;
  double kilobytes = 0.0;  // bytes / 1024
  double percent = 0.0;    // of the chunk payload
};

// Compressed size per attribute group. Rows: Mean, Quat., Scale, Opa., SH 0,
// SH N, then any of Features, Motion, Temporal Opa., Meta that are present.
struct MemoryBreakdownReport {
  std::vector<BreakdownRow> rows;
  uint64_t payloadBytes = 0;  // sum of all chunks == sum of rows
  uint64_t headerBytes = 0;   // fixed prefix plus header
  uint64_t fileBytes = 0;

  std::string toCsv() const;
  std::string toTable() const;
};

MemoryBreakdownReport inspect(std::span<const uint8_t> bytes);

// Inspect row a chunk name is charged to.
std::string breakdownLabel(const std::string &chunkName);

// Dumps every PNG plane of a container as <dir>/<plane>.png (GOF k > 0 is
// prefixed with gof<k>_). Returns the file names written.
std::vector<std::string> exportPlanes(std::span<const uint8_t> bytes, const std::string &dir);

}  // namespace gsc
