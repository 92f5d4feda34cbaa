#include "gscodec/config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "gscodec/error.h"
#include "gscodec/quantize.h"

namespace gsc {

namespace {

std::string trim(const std::string &s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> splitList(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double toDouble(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "' expects a number, got '" + v + "'");
  }
}

long long toInt(const std::string &key, const std::string &v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool toBool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "' expects a boolean, got '" + v + "'");
}

Codec toCodec(const std::string &key, const std::string &v) {
  if (v == "png") return Codec::kPngPlane;
  if (v == "ans") return Codec::kAns;
  if (v == "vq") return Codec::kVqAns;
  throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "' expects png|ans|vq, got '" + v + "'");
}

const std::vector<std::string> &knownAttributes() {
  static const std::vector<std::string> names = {"means",     "rotations",     "scales",     "opacity",
                                                 "sh0",       "shN",           "features",   "motion_pos",
                                                 "motion_rot", "motion_center", "basis_coef", "t_center",
                                                 "t_scale"};
  return names;
}

}  // namespace

const char *codecName(Codec c) {
  switch (c) {
    case Codec::kPngPlane: return "png-plane";
    case Codec::kAns: return "ans";
    case Codec::kVqAns: return "vq+ans";
    case Codec::kRawConstant: return "raw-constant";
    case Codec::kRaw: return "raw";
  }
  return "?";
}

AttributeRoute EncodeConfig::route(const std::string &attribute) const {
  auto it = routes.find(attribute);
  return it == routes.end() ? AttributeRoute{} : it->second;
}

EncodeConfig presetConfig(const std::string &name) {
  EncodeConfig c;
  c.preset = name;
  c.routes["means"] = {Codec::kPngPlane, 16};
  for (const char *a : {"rotations", "scales", "opacity", "sh0", "features"}) c.routes[a] = {Codec::kPngPlane, 8};
  c.routes["shN"] = {Codec::kVqAns, 8};
  if (name == "static-gscodec") return c;
  if (name == "dynamic-gscodec") {
    c.routes["motion_pos"] = {Codec::kPngPlane, 16};
    c.routes["motion_rot"] = {Codec::kPngPlane, 8};
    c.routes["motion_center"] = {Codec::kPngPlane, 16};
    c.routes["basis_coef"] = {Codec::kPngPlane, 16};
    c.routes["t_center"] = {Codec::kPngPlane, 16};
    c.routes["t_scale"] = {Codec::kPngPlane, 8};
    return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + name + "' (static-gscodec|dynamic-gscodec)");
}

void applyConfigValue(EncodeConfig &c, const std::string &rawKey, const std::string &rawValue) {
  const std::string key = trim(rawKey), v = trim(rawValue);
  if (key == "preset") {
    c = presetConfig(v);
    return;
  }
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string head = key.substr(0, dot), tail = key.substr(dot + 1);
    const auto &attrs = knownAttributes();
    if (std::find(attrs.begin(), attrs.end(), head) != attrs.end()) {
      AttributeRoute r = c.route(head);
      if (tail == "route") r.codec = toCodec(key, v);
      else if (tail == "bits") r.bits = static_cast<int>(toInt(key, v));
      else throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
      if (r.bits < kMinBits || r.bits > kMaxBits) {
        throw Error(ErrorCode::kInvalidArgument, "'" + key + "' must be 5-16 bits");
      }
      c.routes[head] = r;
      return;
    }
  }
  if (key == "bits") {
    // Shorthand: every 8-bit-by-default attribute.
    const int bits = static_cast<int>(toInt(key, v));
    if (bits < kMinBits || bits > kMaxBits) throw Error(ErrorCode::kInvalidArgument, "'bits' must be 5-16");
    for (const char *a : {"rotations", "scales", "opacity", "sh0", "features", "motion_rot", "t_scale"}) {
      AttributeRoute r = c.route(a);
      r.bits = bits;
      c.routes[a] = r;
    }
  } else if (key == "prune.opacity") {
    c.prune.opacityEnabled = v != "off";
    if (c.prune.opacityEnabled) c.prune.minOpacity = toDouble(key, v);
  } else if (key == "prune.scale") {
    c.prune.scaleEnabled = v != "off";
    if (c.prune.scaleEnabled) {
      auto parts = splitList(v);
      if (parts.size() != 2) throw Error(ErrorCode::kInvalidArgument, "prune.scale expects min,max");
      c.prune.minScale = toDouble(key, parts[0]);
      c.prune.maxScale = toDouble(key, parts[1]);
    }
  } else if (key == "prune.outliers") {
    c.prune.outliersEnabled = v != "off";
    if (c.prune.outliersEnabled) {
      auto parts = splitList(v);
      if (parts.size() != 2) throw Error(ErrorCode::kInvalidArgument, "prune.outliers expects k,m");
      c.prune.outlierNeighbors = static_cast<int>(toInt(key, parts[0]));
      c.prune.outlierStdMultiplier = toDouble(key, parts[1]);
    }
  } else if (key == "mask.sh") {
    c.shMaskEnabled = v != "off";
    if (c.shMaskEnabled) c.shMaskThreshold = toDouble(key, v);
  } else if (key == "mask.static") {
    c.staticMaskEnabled = v != "off";
    if (c.staticMaskEnabled) {
      auto parts = splitList(v);
      c.staticMaskThreshold = toDouble(key, parts[0]);
      if (parts.size() > 1) c.staticMaskSamples = static_cast<int>(toInt(key, parts[1]));
    }
  } else if (key == "clip_pct") {
    c.clipPct = toDouble(key, v);
  } else if (key == "plas") {
    c.plasEnabled = toBool(key, v);
  } else if (key == "plas.proposals") {
    c.plasProposals = static_cast<int>(toInt(key, v));
  } else if (key == "seed") {
    c.seed = static_cast<uint64_t>(toInt(key, v));
  } else if (key == "vq.size") {
    c.vqSize = static_cast<int>(toInt(key, v));
  } else if (key == "vq.iterations") {
    c.vqIterations = static_cast<int>(toInt(key, v));
  } else if (key == "entropy.model") {
    if (v == "factorized") c.entropyModel = EntropyModelKind::kFactorized;
    else if (v == "gaussian") c.entropyModel = EntropyModelKind::kSpatialGaussian;
    else throw Error(ErrorCode::kInvalidArgument, "entropy.model expects factorized|gaussian");
  } else if (key == "entropy.alpha") {
    c.entropyAlpha = toDouble(key, v);
  } else if (key == "entropy.points_per_voxel") {
    c.pointsPerVoxel = toDouble(key, v);
  } else if (key == "gof_len") {
    c.gofLength = static_cast<int>(toInt(key, v));
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }
}

namespace {

void applyLine(EncodeConfig &config, const std::string &line, int lineNo) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "config line " + std::to_string(lineNo) + " is not key = value");
  }
  applyConfigValue(config, line.substr(0, eq), line.substr(eq + 1));
}

std::string stripComment(const std::string &line) { return trim(line.substr(0, line.find('#'))); }

}  // namespace

EncodeConfig parseConfig(const std::string &text, const EncodeConfig &base) {
  EncodeConfig config = base;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    line = stripComment(line);
    if (!line.empty()) applyLine(config, line, lineNo);
  }
  return config;
}

std::vector<NamedConfig> parseSweepConfigs(const std::string &text) {
  std::vector<std::pair<std::string, std::vector<std::pair<int, std::string>>>> sections;
  std::vector<std::pair<int, std::string>> shared;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    line = stripComment(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw Error(ErrorCode::kInvalidArgument, "bad section header on line " + std::to_string(lineNo));
      }
      sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
    } else if (sections.empty()) {
      shared.push_back({lineNo, line});
    } else {
      sections.back().second.push_back({lineNo, line});
    }
  }
  if (sections.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep file defines no [config] sections");
  std::vector<NamedConfig> out;
  for (const auto &[name, lines] : sections) {
    EncodeConfig c = presetConfig("static-gscodec");
    for (const auto &[no, l] : shared) applyLine(c, l, no);
    for (const auto &[no, l] : lines) applyLine(c, l, no);
    out.push_back({name, c});
  }
  return out;
}

}  // namespace gsc
