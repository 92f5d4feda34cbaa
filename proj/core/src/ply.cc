#include "gscodec/ply.h"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>

#include "gscodec/error.h"

namespace gsc {

namespace {

enum class PlyFormat { kAscii, kBinaryLE, kBinaryBE };

enum class ScalarType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

std::optional<ScalarType> parseType(std::string_view t) {
  if (t == "char" || t == "int8") return ScalarType::kInt8;
  if (t == "uchar" || t == "uint8") return ScalarType::kUInt8;
  if (t == "short" || t == "int16") return ScalarType::kInt16;
  if (t == "ushort" || t == "uint16") return ScalarType::kUInt16;
  if (t == "int" || t == "int32") return ScalarType::kInt32;
  if (t == "uint" || t == "uint32") return ScalarType::kUInt32;
  if (t == "float" || t == "float32") return ScalarType::kFloat32;
  if (t == "double" || t == "float64") return ScalarType::kFloat64;
  return std::nullopt;
}

std::size_t typeSize(ScalarType t) {
  switch (t) {
    case ScalarType::kInt8:
    case ScalarType::kUInt8: return 1;
    case ScalarType::kInt16:
    case ScalarType::kUInt16: return 2;
    case ScalarType::kInt32:
    case ScalarType::kUInt32:
    case ScalarType::kFloat32: return 4;
    case ScalarType::kFloat64: return 8;
  }
  return 0;
}

template <typename T>
T readLE(const uint8_t *p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

float readScalar(const uint8_t *p, ScalarType t) {
  switch (t) {
    case ScalarType::kInt8: return static_cast<float>(static_cast<int8_t>(*p));
    case ScalarType::kUInt8: return static_cast<float>(*p);
    case ScalarType::kInt16: return static_cast<float>(readLE<int16_t>(p));
    case ScalarType::kUInt16: return static_cast<float>(readLE<uint16_t>(p));
    case ScalarType::kInt32: return static_cast<float>(readLE<int32_t>(p));
    case ScalarType::kUInt32: return static_cast<float>(readLE<uint32_t>(p));
    case ScalarType::kFloat32: return readLE<float>(p);
    case ScalarType::kFloat64: return static_cast<float>(readLE<double>(p));
  }
  return 0.0f;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat32;
  bool isList = false;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  PlyFormat format = PlyFormat::kBinaryLE;
  std::vector<Element> elements;
  std::vector<std::string> comments;
  std::size_t dataOffset = 0;
};

[[noreturn]] void malformed(std::size_t offset, const std::string &what) {
  throw Error(ErrorCode::kMalformedHeader, what + " (byte offset " + std::to_string(offset) + ")");
}

Header parseHeader(std::span<const uint8_t> bytes) {
  Header h;
  std::size_t pos = 0;
  bool sawFormat = false;
  bool first = true;
  for (;;) {
    std::size_t lineStart = pos;
    while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    if (pos >= bytes.size()) malformed(lineStart, "header not terminated by end_header");
    std::string line(reinterpret_cast<const char *>(bytes.data()) + lineStart, pos - lineStart);
    ++pos;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (first) {
      if (keyword != "ply") malformed(lineStart, "missing 'ply' magic");
      first = false;
      continue;
    }
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") h.format = PlyFormat::kAscii;
      else if (fmt == "binary_little_endian") h.format = PlyFormat::kBinaryLE;
      else if (fmt == "binary_big_endian") h.format = PlyFormat::kBinaryBE;
      else malformed(lineStart, "unknown format '" + fmt + "'");
      sawFormat = true;
    } else if (keyword == "comment" || keyword == "obj_info") {
      std::string rest;
      std::getline(ls, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
      if (keyword == "comment") h.comments.push_back(rest);
    } else if (keyword == "element") {
      Element e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || count < 0 || ls.fail()) malformed(lineStart, "bad element line '" + line + "'");
      e.count = static_cast<std::size_t>(count);
      h.elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (h.elements.empty()) malformed(lineStart, "property before any element");
      std::string type;
      ls >> type;
      Property p;
      if (type == "list") {
        std::string countType, itemType;
        ls >> countType >> itemType >> p.name;
        if (!parseType(countType) || !parseType(itemType)) malformed(lineStart, "bad list property types");
        p.isList = true;
      } else {
        auto t = parseType(type);
        if (!t) malformed(lineStart, "unknown property type '" + type + "'");
        p.type = *t;
        ls >> p.name;
      }
      if (p.name.empty()) malformed(lineStart, "property without name");
      h.elements.back().properties.push_back(p);
    } else if (keyword == "end_header") {
      break;
    } else if (keyword.empty()) {
      continue;
    } else {
      malformed(lineStart, "unexpected header keyword '" + keyword + "'");
    }
  }
  if (!sawFormat) malformed(0, "missing format line");
  h.dataOffset = pos;
  return h;
}

// Column-major view of the vertex element, every property widened to float.
struct VertexTable {
  std::size_t count = 0;
  std::map<std::string, std::vector<float>> columns;
  std::vector<std::string> comments;

  const std::vector<float> *find(const std::string &name) const {
    auto it = columns.find(name);
    return it == columns.end() ? nullptr : &it->second;
  }
  const std::vector<float> &require(const std::string &name) const {
    auto *c = find(name);
    if (!c) throw Error(ErrorCode::kMissingProperty, "required vertex property '" + name + "' not found");
    return *c;
  }
};

VertexTable readVertexTable(std::span<const uint8_t> bytes) {
  Header h = parseHeader(bytes);
  if (h.format == PlyFormat::kBinaryBE) {
    throw Error(ErrorCode::kUnsupported, "binary_big_endian PLY is not supported");
  }
  VertexTable table;
  table.comments = h.comments;

  std::size_t pos = h.dataOffset;
  for (const Element &e : h.elements) {
    const bool isVertex = e.name == "vertex";
    for (const Property &p : e.properties) {
      if (p.isList && isVertex) {
        throw Error(ErrorCode::kUnsupported, "list property '" + p.name + "' in vertex element");
      }
    }
    if (isVertex) {
      table.count = e.count;
      for (const Property &p : e.properties) table.columns[p.name].resize(e.count);
    }
    if (h.format == PlyFormat::kBinaryLE) {
      bool hasList = false;
      std::size_t stride = 0;
      for (const Property &p : e.properties) {
        hasList |= p.isList;
        stride += typeSize(p.type);
      }
      if (hasList) {
        // Only elements after the vertex data may carry lists; we never read them.
        if (table.count > 0 || isVertex) break;
        throw Error(ErrorCode::kUnsupported, "list-valued element '" + e.name + "' precedes vertex data");
      }
      const std::size_t need = stride * e.count;
      if (bytes.size() - pos < need) {
        throw Error(ErrorCode::kTruncated, "element '" + e.name + "' needs " + std::to_string(need) +
                                               " bytes at offset " + std::to_string(pos) + ", file has " +
                                               std::to_string(bytes.size() - pos));
      }
      if (isVertex) {
        std::vector<std::pair<std::vector<float> *, std::size_t>> cols;
        std::size_t off = 0;
        for (const Property &p : e.properties) {
          cols.emplace_back(&table.columns[p.name], off);
          off += typeSize(p.type);
        }
        for (std::size_t i = 0; i < e.count; ++i) {
          const uint8_t *row = bytes.data() + pos + i * stride;
          for (std::size_t k = 0; k < cols.size(); ++k) {
            (*cols[k].first)[i] = readScalar(row + cols[k].second, e.properties[k].type);
          }
        }
      }
      pos += need;
    } else {
      for (std::size_t i = 0; i < e.count; ++i) {
        std::size_t lineStart = pos;
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        if (lineStart >= bytes.size()) {
          throw Error(ErrorCode::kTruncated, "element '" + e.name + "' row " + std::to_string(i) +
                                                 " missing at offset " + std::to_string(lineStart));
        }
        const char *b = reinterpret_cast<const char *>(bytes.data()) + lineStart;
        const char *end = reinterpret_cast<const char *>(bytes.data()) + pos;
        if (pos < bytes.size()) ++pos;
        if (!isVertex) continue;
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          while (b < end && (*b == ' ' || *b == '\t' || *b == '\r')) ++b;
          float v = 0.0f;
          auto [ptr, ec] = std::from_chars(b, end, v);
          if (ec != std::errc()) {
            throw Error(ErrorCode::kTruncated, "cannot read property '" + e.properties[k].name + "' of vertex " +
                                                   std::to_string(i) + " at offset " +
                                                   std::to_string(b - reinterpret_cast<const char *>(bytes.data())));
          }
          table.columns[e.properties[k].name][i] = v;
          b = ptr;
        }
      }
    }
    if (isVertex) break;
  }
  if (table.count == 0) throw Error(ErrorCode::kEmptyCloud, "PLY has no vertices");
  return table;
}

int countIndexed(const VertexTable &t, const std::string &prefix) {
  int k = 0;
  while (t.find(prefix + std::to_string(k))) ++k;
  return k;
}

GaussianCloud cloudFromTable(const VertexTable &t) {
  const std::size_t n = t.count;
  const int rest = countIndexed(t, "f_rest_");
  int degree = -1;
  for (int d = 0; d <= 3; ++d) {
    if (rest == 3 * shCoeffsForDegree(d)) degree = d;
  }
  if (degree < 0) {
    throw Error(ErrorCode::kUnsupported, "f_rest count " + std::to_string(rest) +
                                             " does not correspond to an SH degree in 0..3");
  }
  const int features = countIndexed(t, "feat_");
  GaussianCloud c = GaussianCloud::zeros(n, degree, features);
  const int m = c.shCoeffs();

  auto fill = [&](std::vector<float> &dst, int width, int component, const std::string &name) {
    const auto &col = t.require(name);
    for (std::size_t i = 0; i < n; ++i) dst[i * width + component] = col[i];
  };
  const char *xyz[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) fill(c.means, 3, a, xyz[a]);
  for (int a = 0; a < 4; ++a) fill(c.rotations, 4, a, "rot_" + std::to_string(a));
  for (int a = 0; a < 3; ++a) fill(c.logScales, 3, a, "scale_" + std::to_string(a));
  fill(c.opacityLogits, 1, 0, "opacity");
  for (int a = 0; a < 3; ++a) fill(c.sh0, 3, a, "f_dc_" + std::to_string(a));
  // f_rest is channel-major on disk: f_rest[ch * M + k].
  for (int ch = 0; ch < 3; ++ch) {
    for (int k = 0; k < m; ++k) fill(c.shN, m * 3, k * 3 + ch, "f_rest_" + std::to_string(ch * m + k));
  }
  for (int f = 0; f < features; ++f) fill(c.features, features, f, "feat_" + std::to_string(f));
  if (const auto *flags = t.find("flags")) {
    c.flags.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.flags[i] = static_cast<uint8_t>(std::clamp((*flags)[i], 0.0f, 255.0f));
  }
  return c;
}

// Writes a binary little-endian vertex table from named float columns.
class PlyWriter {
 public:
  explicit PlyWriter(std::size_t count) : count_(count) {}

  void comment(const std::string &text) { comments_.push_back(text); }

  void column(std::string name, std::vector<float> values) {
    floats_.emplace_back(std::move(name), std::move(values));
  }

  void byteColumn(std::string name, std::vector<uint8_t> values) {
    bytes_.emplace_back(std::move(name), std::move(values));
  }

  std::vector<uint8_t> finish() const {
    std::ostringstream hs;
    hs << "ply\nformat binary_little_endian 1.0\n";
    for (const auto &c : comments_) hs << "comment " << c << "\n";
    hs << "element vertex " << count_ << "\n";
    for (const auto &[name, _] : floats_) hs << "property float " << name << "\n";
    for (const auto &[name, _] : bytes_) hs << "property uchar " << name << "\n";
    hs << "end_header\n";
    std::string header = hs.str();

    const std::size_t stride = floats_.size() * 4 + bytes_.size();
    std::vector<uint8_t> out(header.size() + stride * count_);
    std::memcpy(out.data(), header.data(), header.size());
    uint8_t *p = out.data() + header.size();
    for (std::size_t i = 0; i < count_; ++i) {
      for (const auto &[_, col] : floats_) {
        std::memcpy(p, &col[i], 4);
        p += 4;
      }
      for (const auto &[_, col] : bytes_) *p++ = col[i];
    }
    return out;
  }

 private:
  std::size_t count_;
  std::vector<std::string> comments_;
  std::vector<std::pair<std::string, std::vector<float>>> floats_;
  std::vector<std::pair<std::string, std::vector<uint8_t>>> bytes_;
};

std::vector<float> strided(const std::vector<float> &src, std::size_t n, std::size_t width, std::size_t component) {
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = src[i * width + component];
  return out;
}

void addCloudColumns(PlyWriter &w, const GaussianCloud &c) {
  const std::size_t n = c.size();
  const int m = c.shCoeffs();
  const char *xyz[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) w.column(xyz[a], strided(c.means, n, 3, a));
  for (int a = 0; a < 4; ++a) w.column("rot_" + std::to_string(a), strided(c.rotations, n, 4, a));
  for (int a = 0; a < 3; ++a) w.column("scale_" + std::to_string(a), strided(c.logScales, n, 3, a));
  w.column("opacity", c.opacityLogits);
  for (int a = 0; a < 3; ++a) w.column("f_dc_" + std::to_string(a), strided(c.sh0, n, 3, a));
  for (int ch = 0; ch < 3; ++ch) {
    for (int k = 0; k < m; ++k) {
      w.column("f_rest_" + std::to_string(ch * m + k), strided(c.shN, n, m * 3, k * 3 + ch));
    }
  }
  for (int f = 0; f < c.featureDim; ++f) {
    w.column("feat_" + std::to_string(f), strided(c.features, n, c.featureDim, f));
  }
  if (!c.flags.empty()) w.byteColumn("flags", c.flags);
}

void requireSaveable(const GaussianCloud &c) {
  if (c.empty()) throw Error(ErrorCode::kEmptyCloud, "cannot save a cloud with zero points");
  ValidationReport r = validate(c);
  for (const auto &f : r.findings) {
    if (f.kind == "dimension mismatch" || f.kind == "unsupported") {
      throw Error(ErrorCode::kDimensionMismatch, "cloud is inconsistent: " + r.toString());
    }
  }
}

std::vector<std::string> splitWords(const std::string &s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

}  // namespace

GaussianCloud loadPly(std::span<const uint8_t> bytes) { return cloudFromTable(readVertexTable(bytes)); }

std::vector<uint8_t> savePly(const GaussianCloud &cloud) {
  requireSaveable(cloud);
  PlyWriter w(cloud.size());
  addCloudColumns(w, cloud);
  return w.finish();
}

DynamicGaussianCloud loadDynamicPly(std::span<const uint8_t> bytes, GofSegment *segment) {
  VertexTable t = readVertexTable(bytes);
  DynamicGaussianCloud d;
  d.base = cloudFromTable(t);
  const std::size_t n = t.count;

  GofSegment seg;
  bool sawSegment = false;
  for (const std::string &c : t.comments) {
    auto w = splitWords(c);
    if (w.size() < 2 || w[0] != "gsc") continue;
    if (w[1] == "time_range" && w.size() == 4) {
      d.timeStart = std::stof(w[2]);
      d.timeEnd = std::stof(w[3]);
    } else if (w[1] == "gof" && w.size() == 5) {
      seg.index = std::stoi(w[2]);
      seg.frameStart = std::stoi(w[3]);
      seg.frameEnd = std::stoi(w[4]);
      d.gofIndex = seg.index;
      sawSegment = true;
    } else if (w[1] == "basis" && w.size() >= 4) {
      d.motion.basisCount = std::stoi(w[2]);
      d.motion.controlCount = std::stoi(w[3]);
      const std::size_t need = static_cast<std::size_t>(d.motion.basisCount) * d.motion.controlCount;
      if (w.size() != 4 + need) throw Error(ErrorCode::kMalformedHeader, "basis comment has wrong value count");
      for (std::size_t k = 0; k < need; ++k) d.motion.basisCurves.push_back(std::stof(w[4 + k]));
    }
  }
  if (segment) *segment = sawSegment ? seg : GofSegment{d.gofIndex, 0, 1};

  MotionModel &m = d.motion;
  const int posCoeffs = countIndexed(t, "motion_");
  const int rotCoeffs = countIndexed(t, "omega_");
  const int basisCoeffs = countIndexed(t, "basis_coef_");
  if (basisCoeffs > 0) {
    m.variant = MotionVariant::kBasis;
    if (basisCoeffs != 3 * m.basisCount) {
      throw Error(ErrorCode::kMissingProperty, "basis_coef_* count does not match basis comment");
    }
    m.basisCoeffs.resize(n * basisCoeffs);
    for (int k = 0; k < basisCoeffs; ++k) {
      const auto &col = t.require("basis_coef_" + std::to_string(k));
      for (std::size_t i = 0; i < n; ++i) m.basisCoeffs[i * basisCoeffs + k] = col[i];
    }
  } else if (posCoeffs > 0 || rotCoeffs > 0 || t.find("motion_center")) {
    m.variant = MotionVariant::kPolynomial;
    if (posCoeffs % 3 != 0 || rotCoeffs % 4 != 0) {
      throw Error(ErrorCode::kUnsupported, "motion_*/omega_* counts must be multiples of 3/4");
    }
    m.positionDegree = posCoeffs / 3;
    m.rotationDegree = rotCoeffs / 4;
    m.timeCenter = t.require("motion_center");
    m.positionCoeffs.resize(n * posCoeffs);
    for (int k = 0; k < posCoeffs; ++k) {
      const auto &col = t.require("motion_" + std::to_string(k));
      for (std::size_t i = 0; i < n; ++i) m.positionCoeffs[i * posCoeffs + k] = col[i];
    }
    m.rotationCoeffs.resize(n * rotCoeffs);
    for (int k = 0; k < rotCoeffs; ++k) {
      const auto &col = t.require("omega_" + std::to_string(k));
      for (std::size_t i = 0; i < n; ++i) m.rotationCoeffs[i * rotCoeffs + k] = col[i];
    }
  }
  if (t.find("t_center")) {
    d.temporalOpacity.center = t.require("t_center");
    d.temporalOpacity.scale = t.require("t_scale");
  }
  return d;
}

std::vector<uint8_t> saveDynamicPly(const DynamicGaussianCloud &cloud, const GofSegment &segment) {
  requireSaveable(cloud.base);
  const std::size_t n = cloud.size();
  PlyWriter w(n);
  {
    std::ostringstream os;
    os.precision(9);
    os << "gsc time_range " << cloud.timeStart << " " << cloud.timeEnd;
    w.comment(os.str());
  }
  w.comment("gsc gof " + std::to_string(segment.index) + " " + std::to_string(segment.frameStart) + " " +
            std::to_string(segment.frameEnd));
  const MotionModel &m = cloud.motion;
  if (m.variant == MotionVariant::kBasis) {
    std::ostringstream os;
    os.precision(9);
    os << "gsc basis " << m.basisCount << " " << m.controlCount;
    for (float v : m.basisCurves) os << " " << v;
    w.comment(os.str());
  }
  addCloudColumns(w, cloud.base);
  if (m.variant == MotionVariant::kPolynomial) {
    w.column("motion_center", m.timeCenter);
    const int pc = m.positionDegree * 3;
    for (int k = 0; k < pc; ++k) w.column("motion_" + std::to_string(k), strided(m.positionCoeffs, n, pc, k));
    const int rc = m.rotationDegree * 4;
    for (int k = 0; k < rc; ++k) w.column("omega_" + std::to_string(k), strided(m.rotationCoeffs, n, rc, k));
  } else if (m.variant == MotionVariant::kBasis) {
    const int bc = m.basisCount * 3;
    for (int k = 0; k < bc; ++k) w.column("basis_coef_" + std::to_string(k), strided(m.basisCoeffs, n, bc, k));
  }
  if (!cloud.temporalOpacity.empty()) {
    w.column("t_center", cloud.temporalOpacity.center);
    w.column("t_scale", cloud.temporalOpacity.scale);
  }
  return w.finish();
}

std::vector<uint8_t> readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void writeFile(const std::string &path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace gsc
