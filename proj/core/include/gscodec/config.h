#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gscodec/preprocess.h"

namespace gsc {

// How an attribute's symbols are stored.
enum class Codec : uint8_t {
  kPngPlane = 0,     // PLAS-sorted 8-bit PNG planes (hi/lo split above 8 bits)
  kAns = 1,          // fitted entropy model + rANS stream
  kVqAns = 2,        // k-means codebook + rANS-coded indices
  kRawConstant = 3,  // one value per channel
  kRaw = 4,          // deflated bytes (grid, masks, flags, basis curves)
};

const char *codecName(Codec c);

enum class EntropyModelKind : uint8_t { kFactorized = 0, kSpatialGaussian = 1 };

struct AttributeRoute {
  Codec codec = Codec::kPngPlane;
  int bits = 8;
};

// Attribute names used in routes and container chunks. Static: means,
// rotations, scales, opacity, sh0, shN, features. Dynamic additions:
// motion_pos, motion_rot, motion_center, basis_coef, t_center, t_scale.
struct EncodeConfig {
  std::string preset = "static-gscodec";
  PruneConfig prune;
  std::map<std::string, AttributeRoute> routes;
  double clipPct = 0.0;

  bool plasEnabled = true;
  int plasProposals = 16;  // per point and radius pass
  uint64_t seed = 0;

  int vqSize = 4096;
  int vqIterations = 20;

  bool shMaskEnabled = false;
  double shMaskThreshold = 0.0;
  bool staticMaskEnabled = false;
  double staticMaskThreshold = 0.0;
  int staticMaskSamples = 16;

  EntropyModelKind entropyModel = EntropyModelKind::kFactorized;
  double entropyAlpha = 1.0;
  double pointsPerVoxel = 64.0;  // spatial Gaussian context resolution

  int gofLength = 50;

  // Route for an attribute, defaulting to 8-bit PNG planes.
  AttributeRoute route(const std::string &attribute) const;
};

// "static-gscodec" or "dynamic-gscodec". Throws kInvalidArgument otherwise.
EncodeConfig presetConfig(const std::string &name);

// Applies one `key = value` setting (see README for the key list).
void applyConfigValue(EncodeConfig &config, const std::string &key, const std::string &value);

// Parses key = value lines ('#' comments). A `preset` key, if present, resets
// the config to that preset before the remaining keys apply.
EncodeConfig parseConfig(const std::string &text, const EncodeConfig &base = presetConfig("static-gscodec"));

struct NamedConfig {
  std::string name;
  EncodeConfig config;
};

// Sweep files: `[name]` sections of key = value lines; keys before the first
// section are shared defaults.
std::vector<NamedConfig> parseSweepConfigs(const std::string &text);

}  // namespace gsc
