#include "gscodec/container.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "gscodec/ans.h"
#include "gscodec/bytes.h"
#include "gscodec/entropy.h"
#include "gscodec/error.h"
#include "gscodec/parallel.h"
#include "gscodec/ply.h"
#include "gscodec/png.h"

namespace gsc {

namespace {

constexpr std::size_t kPrefixBytes = 4 + 2 + 1 + 4;
constexpr double kSymbolSigmaFloor = 0.25;  // a quarter step, in symbol units

enum class MaskKind { kNone, kSh, kMotion };

struct AttrField {
  std::string name;
  int channels = 0;
  Transform transform = Transform::kIdentity;
  MaskKind mask = MaskKind::kNone;
  std::vector<float> *data = nullptr;
};

// Coded attributes of a cloud, in coding order (means first: the spatial
// entropy model reads reconstructed positions).
std::vector<AttrField> attributeFields(DynamicGaussianCloud &c) {
  GaussianCloud &b = c.base;
  std::vector<AttrField> f = {
      {"means", 3, Transform::kIdentity, MaskKind::kNone, &b.means},
      {"rotations", 4, Transform::kUnitNormalize, MaskKind::kNone, &b.rotations},
      {"scales", 3, Transform::kIdentity, MaskKind::kNone, &b.logScales},
      {"opacity", 1, Transform::kIdentity, MaskKind::kNone, &b.opacityLogits},
      {"sh0", 3, Transform::kIdentity, MaskKind::kNone, &b.sh0},
  };
  if (b.shCoeffs() > 0) f.push_back({"shN", 3 * b.shCoeffs(), Transform::kIdentity, MaskKind::kSh, &b.shN});
  if (b.featureDim > 0) f.push_back({"features", b.featureDim, Transform::kIdentity, MaskKind::kNone, &b.features});
  MotionModel &m = c.motion;
  if (m.variant == MotionVariant::kPolynomial) {
    if (m.positionDegree > 0) {
      f.push_back({"motion_pos", 3 * m.positionDegree, Transform::kIdentity, MaskKind::kMotion, &m.positionCoeffs});
    }
    if (m.rotationDegree > 0) {
      f.push_back({"motion_rot", 4 * m.rotationDegree, Transform::kIdentity, MaskKind::kMotion, &m.rotationCoeffs});
    }
    f.push_back({"motion_center", 1, Transform::kIdentity, MaskKind::kNone, &m.timeCenter});
  } else if (m.variant == MotionVariant::kBasis) {
    f.push_back({"basis_coef", 3 * m.basisCount, Transform::kIdentity, MaskKind::kMotion, &m.basisCoeffs});
  }
  if (!c.temporalOpacity.empty()) {
    f.push_back({"t_center", 1, Transform::kIdentity, MaskKind::kNone, &c.temporalOpacity.center});
    f.push_back({"t_scale", 1, Transform::kLog, MaskKind::kNone, &c.temporalOpacity.scale});
  }
  return f;
}

// ---------------------------------------------------------------------------
// Header serialization

void writeHeader(const ContainerInfo &info, ByteWriter &w) {
  w.u8(info.shDegree);
  w.u16(info.featureDim);
  w.u32(info.frameCount);
  w.f32(info.fps);
  w.u32(static_cast<uint32_t>(info.gofs.size()));
  for (const GofInfo &g : info.gofs) {
    w.u32(g.index);
    w.u32(g.frameStart);
    w.u32(g.frameEnd);
    w.u32(g.pointCount);
    w.u32(g.width);
    w.u32(g.height);
    w.f32(g.timeStart);
    w.f32(g.timeEnd);
    w.u8(static_cast<uint8_t>(g.variant));
    w.u8(g.positionDegree);
    w.u8(g.rotationDegree);
    w.u16(g.basisCount);
    w.u16(g.controlCount);
    w.u8(g.temporalOpacity ? 1 : 0);
  }
  w.u32(static_cast<uint32_t>(info.chunks.size()));
  for (const ChunkInfo &c : info.chunks) {
    w.u32(c.gof);
    w.str(c.name);
    w.u8(static_cast<uint8_t>(c.codec));
    w.u8(static_cast<uint8_t>(c.transform));
    w.u8(c.bits);
    w.u16(c.channels);
    w.u8(c.rangeMin.empty() ? 0 : 1);
    for (std::size_t k = 0; k < c.rangeMin.size(); ++k) {
      w.f32(c.rangeMin[k]);
      w.f32(c.rangeMax[k]);
    }
    w.u8(static_cast<uint8_t>(c.entropyModel));
    w.u64(c.offset);
    w.u64(c.length);
    w.u32(c.crc);
  }
}

void readHeader(ByteReader &r, ContainerInfo &info) {
  info.shDegree = r.u8();
  info.featureDim = r.u16();
  info.frameCount = r.u32();
  info.fps = r.f32();
  if (info.shDegree > 3) throw Error(ErrorCode::kCorrupt, "header SH degree out of range");
  const uint32_t gofCount = r.u32();
  if (gofCount == 0 || gofCount > r.remaining()) throw Error(ErrorCode::kCorrupt, "header GOF count is invalid");
  info.gofs.resize(gofCount);
  for (GofInfo &g : info.gofs) {
    g.index = r.u32();
    g.frameStart = r.u32();
    g.frameEnd = r.u32();
    g.pointCount = r.u32();
    g.width = r.u32();
    g.height = r.u32();
    g.timeStart = r.f32();
    g.timeEnd = r.f32();
    const uint8_t variant = r.u8();
    if (variant > 2) throw Error(ErrorCode::kCorrupt, "unknown motion variant in GOF table");
    g.variant = static_cast<MotionVariant>(variant);
    g.positionDegree = r.u8();
    g.rotationDegree = r.u8();
    g.basisCount = r.u16();
    g.controlCount = r.u16();
    g.temporalOpacity = r.u8() != 0;
    if (g.pointCount == 0 || uint64_t(g.width) * g.height < g.pointCount || g.width > (1u << 16) ||
        g.height > (1u << 16)) {
      throw Error(ErrorCode::kCorrupt, "GOF " + std::to_string(g.index) + " has an invalid grid");
    }
  }
  const uint32_t chunkCount = r.u32();
  if (chunkCount > r.remaining()) throw Error(ErrorCode::kCorrupt, "header chunk count is invalid");
  info.chunks.resize(chunkCount);
  for (ChunkInfo &c : info.chunks) {
    c.gof = r.u32();
    c.name = r.str();
    const uint8_t codec = r.u8();
    if (codec > 4) throw Error(ErrorCode::kCorrupt, "chunk '" + c.name + "' has an unknown codec");
    c.codec = static_cast<Codec>(codec);
    const uint8_t transform = r.u8();
    if (transform > 3) throw Error(ErrorCode::kCorrupt, "chunk '" + c.name + "' has an unknown transform");
    c.transform = static_cast<Transform>(transform);
    c.bits = r.u8();
    c.channels = r.u16();
    if (r.u8()) {
      c.rangeMin.resize(c.channels);
      c.rangeMax.resize(c.channels);
      for (int k = 0; k < c.channels; ++k) {
        c.rangeMin[k] = r.f32();
        c.rangeMax[k] = r.f32();
      }
    }
    const uint8_t model = r.u8();
    if (model > 1) throw Error(ErrorCode::kCorrupt, "chunk '" + c.name + "' has an unknown entropy model");
    c.entropyModel = static_cast<EntropyModelKind>(model);
    c.offset = r.u64();
    c.length = r.u64();
    c.crc = r.u32();
    if (c.gof >= info.gofs.size()) throw Error(ErrorCode::kCorrupt, "chunk '" + c.name + "' names a missing GOF");
  }
}

std::vector<uint8_t> assemble(ContainerInfo &info, std::vector<std::vector<uint8_t>> &bodies) {
  ByteWriter probe;
  writeHeader(info, probe);
  info.headerLength = static_cast<uint32_t>(probe.size());
  uint64_t offset = kPrefixBytes + info.headerLength;
  for (std::size_t k = 0; k < info.chunks.size(); ++k) {
    info.chunks[k].offset = offset;
    info.chunks[k].length = bodies[k].size();
    info.chunks[k].crc = crc32Of(bodies[k]);
    offset += bodies[k].size();
  }
  ByteWriter w;
  w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t *>(kContainerMagic), 4));
  w.u16(kContainerVersion);
  w.u8(static_cast<uint8_t>(info.flavor));
  w.u32(info.headerLength);
  writeHeader(info, w);
  for (auto &b : bodies) w.bytes(b);
  info.fileSize = w.size();
  return w.take();
}

// ---------------------------------------------------------------------------
// Chunk bodies

std::vector<uint8_t> packBits(std::span<const uint8_t> bits) {
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= uint8_t(1u << (i % 8));
  }
  return out;
}

std::vector<uint8_t> unpackBits(std::span<const uint8_t> packed, std::size_t n) {
  if (packed.size() != (n + 7) / 8) throw Error(ErrorCode::kCorrupt, "bit mask has the wrong length");
  std::vector<uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (packed[i / 8] >> (i % 8)) & 1u;
  return out;
}

std::vector<uint8_t> rawBody(std::span<const uint8_t> raw) {
  ByteWriter w;
  std::vector<uint8_t> z = deflateBytes(raw);
  w.u32(static_cast<uint32_t>(raw.size()));
  w.u32(static_cast<uint32_t>(z.size()));
  w.bytes(z);
  return w.take();
}

std::vector<uint8_t> readRawBody(std::span<const uint8_t> body) {
  ByteReader r(body, "raw chunk");
  const uint32_t rawLen = r.u32();
  const uint32_t zLen = r.u32();
  return inflateBytes(r.bytes(zLen), rawLen);
}

struct ChunkSink {
  ContainerInfo *info;
  std::vector<std::vector<uint8_t>> *bodies;
  uint32_t gof;

  ChunkInfo &add(std::string name, Codec codec, std::vector<uint8_t> body) {
    ChunkInfo c;
    c.gof = gof;
    c.name = std::move(name);
    c.codec = codec;
    info->chunks.push_back(std::move(c));
    bodies->push_back(std::move(body));
    return info->chunks.back();
  }
};

struct CodingContext {
  const EncodeConfig *config = nullptr;
  const PlaneGrid *grid = nullptr;         // decoded order
  const std::vector<float> *means = nullptr;  // reconstructed, decoded order
};

template <typename T>
T stageGuard(const std::string &stage, const std::function<T()> &fn) {
  try {
    return fn();
  } catch (const Error &e) {
    throw e.withStage(stage);
  }
}

// Quantization scheme for one channel of coded values; constant channels get
// a unit-width range so they still code as symbol 0.
QuantizationScheme channelScheme(std::span<const float> values, int bits, double clipPct, Transform transform,
                                 const std::string &attr, bool *constant) {
  double lo = INFINITY, hi = -INFINITY;
  for (float v : values) {
    double t = applyTransform(transform, v);
    if (!std::isfinite(t)) throw Error(ErrorCode::kNonFinite, "attribute '" + attr + "' has a non-finite value");
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  *constant = float(lo) == float(hi);
  if (*constant) {
    QuantizationScheme s;
    s.attribute = attr;
    s.transform = transform;
    s.bits = bits;
    s.vMin = float(lo);
    s.vMax = s.vMin + std::max(1.0f, std::abs(s.vMin) * 0x1.0p-20f);
    return s;
  }
  return fitScheme(values, bits, clipPct, transform, attr);
}

struct EncodedAttribute {
  AttributeSymbols trace;
  std::vector<float> recon;
};

void writeAnsStream(ByteWriter &w, std::span<const uint32_t> coded, std::span<const uint32_t> pointsCoded, int channels,
                    uint32_t symbolCount, EntropyModelKind kind, const CodingContext &ctx, const std::string &attr) {
  w.u32(static_cast<uint32_t>(coded.size()));
  if (coded.empty()) return;
  std::vector<uint8_t> stream;
  if (kind == EntropyModelKind::kFactorized) {
    FactorizedHistogramModel model = fitFactorized(coded, channels, symbolCount, ctx.config->entropyAlpha);
    for (const auto &h : model.channels) serializeHistogram(h, w);
    stream = ansEncode(coded, model.coder());
  } else {
    if (!ctx.means) throw Error(ErrorCode::kInvalidArgument, "'" + attr + "' cannot use the spatial model");
    std::vector<float> pos(pointsCoded.size() * 3), vals(coded.size());
    for (std::size_t k = 0; k < pointsCoded.size(); ++k) {
      for (int a = 0; a < 3; ++a) pos[k * 3 + a] = (*ctx.means)[std::size_t(pointsCoded[k]) * 3 + a];
    }
    for (std::size_t k = 0; k < coded.size(); ++k) vals[k] = float(coded[k]);
    SpatialGaussianModel model = fitSpatialGaussian(pos, vals, channels, suggestVoxelSize(pos, ctx.config->pointsPerVoxel),
                                                    kSymbolSigmaFloor);
    snapToStorage(model, symbolCount);
    serializeSpatialGaussian(model, symbolCount, w);
    std::vector<uint32_t> voxels(pointsCoded.size());
    for (std::size_t k = 0; k < pointsCoded.size(); ++k) voxels[k] = model.voxelOf(&pos[k * 3]);
    stream = ansEncode(coded, GaussianAnsModel(model, std::move(voxels), symbolCount));
  }
  w.u64(stream.size());
  w.bytes(stream);
}

std::vector<uint32_t> readAnsStream(ByteReader &r, std::span<const uint32_t> pointsCoded, int channels,
                                    uint32_t symbolCount, EntropyModelKind kind, const CodingContext &ctx) {
  const uint32_t count = r.u32();
  if (count != pointsCoded.size() * channels) throw Error(ErrorCode::kCorrupt, "ANS symbol count disagrees with header");
  if (count == 0) return {};
  if (kind == EntropyModelKind::kFactorized) {
    FactorizedHistogramModel model;
    for (int c = 0; c < channels; ++c) {
      model.channels.push_back(deserializeHistogram(r));
      if (model.channels.back().symbolCount != symbolCount) throw Error(ErrorCode::kCorrupt, "histogram alphabet mismatch");
    }
    const uint64_t len = r.u64();
    return ansDecode(r.bytes(len), model.coder(), count);
  }
  if (!ctx.means) throw Error(ErrorCode::kCorrupt, "spatial model without decoded positions");
  SpatialGaussianModel model = deserializeSpatialGaussian(r, symbolCount);
  if (model.channels != channels) throw Error(ErrorCode::kCorrupt, "spatial model channel count mismatch");
  std::vector<uint32_t> voxels(pointsCoded.size());
  for (std::size_t k = 0; k < pointsCoded.size(); ++k) voxels[k] = model.voxelOf(&(*ctx.means)[std::size_t(pointsCoded[k]) * 3]);
  const uint64_t len = r.u64();
  return ansDecode(r.bytes(len), GaussianAnsModel(model, std::move(voxels), symbolCount), count);
}

// Points whose entries the codec stores: all for image planes, active ones
// for entropy-coded routes under a mask.
std::vector<uint32_t> codedPoints(std::size_t n, const std::vector<uint8_t> *mask, Codec codec) {
  std::vector<uint32_t> pts;
  pts.reserve(n);
  const bool useMask = mask && codec != Codec::kPngPlane;
  for (std::size_t i = 0; i < n; ++i) {
    if (!useMask || (*mask)[i]) pts.push_back(static_cast<uint32_t>(i));
  }
  return pts;
}

void finishRecon(EncodedAttribute &out, std::size_t n, int channels, const std::vector<uint8_t> *mask) {
  if (!mask) return;
  for (std::size_t i = 0; i < n; ++i) {
    if ((*mask)[i]) continue;
    std::fill_n(out.recon.begin() + i * channels, channels, 0.0f);
  }
}

// VQ codebook entries are stored as per-dimension 8-bit codes over the
// centroid range; coding uses the snapped centroids.
struct StoredCodebook {
  std::vector<float> lo, hi;
  std::vector<uint8_t> codes;
};

StoredCodebook snapCodebook(VQCodebook &cb) {
  StoredCodebook s;
  const int d = cb.dimension;
  s.lo.assign(d, INFINITY);
  s.hi.assign(d, -INFINITY);
  for (int k = 0; k < cb.size; ++k) {
    for (int j = 0; j < d; ++j) {
      s.lo[j] = std::min(s.lo[j], cb.centroid(k)[j]);
      s.hi[j] = std::max(s.hi[j], cb.centroid(k)[j]);
    }
  }
  for (int j = 0; j < d; ++j) {
    if (!(s.hi[j] > s.lo[j])) s.hi[j] = s.lo[j] + 1.0f;
  }
  s.codes.resize(std::size_t(cb.size) * d);
  for (int k = 0; k < cb.size; ++k) {
    for (int j = 0; j < d; ++j) {
      QuantizationScheme q{"codebook", Transform::kIdentity, 8, s.lo[j], s.hi[j]};
      const uint32_t code = quantizeValue(cb.centroids[std::size_t(k) * d + j], q);
      s.codes[std::size_t(k) * d + j] = uint8_t(code);
      cb.centroids[std::size_t(k) * d + j] = float(dequantizeValue(code, q));
    }
  }
  return s;
}

VQCodebook unsnapCodebook(int size, int d, const std::vector<float> &lo, const std::vector<float> &hi,
                          std::span<const uint8_t> codes) {
  VQCodebook cb;
  cb.size = size;
  cb.dimension = d;
  cb.centroids.resize(std::size_t(size) * d);
  for (int k = 0; k < size; ++k) {
    for (int j = 0; j < d; ++j) {
      QuantizationScheme q{"codebook", Transform::kIdentity, 8, lo[j], hi[j]};
      cb.centroids[std::size_t(k) * d + j] = float(dequantizeValue(codes[std::size_t(k) * d + j], q));
    }
  }
  return cb;
}

EncodedAttribute encodeAttribute(const AttrField &field, const std::vector<uint8_t> *mask, const CodingContext &ctx,
                                 ChunkSink &sink) {
  const EncodeConfig &config = *ctx.config;
  const std::vector<float> &values = *field.data;
  const int C = field.channels;
  const std::size_t n = values.size() / C;
  AttributeRoute route = config.route(field.name);
  if (route.codec == Codec::kVqAns && field.name != "shN") route.codec = Codec::kAns;
  const std::vector<uint32_t> pts = codedPoints(n, mask, route.codec);

  EncodedAttribute out;
  out.recon.assign(values.size(), 0.0f);
  out.trace.channels = C;
  out.trace.codec = route.codec;

  // A route whose coded entries never vary stores one value per channel.
  bool allConstant = true;
  for (int c = 0; c < C && allConstant; ++c) {
    for (std::size_t k = 1; k < pts.size(); ++k) {
      if (values[std::size_t(pts[k]) * C + c] != values[std::size_t(pts[0]) * C + c]) {
        allConstant = false;
        break;
      }
    }
  }
  if (allConstant) {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(pts.size()));
    for (int c = 0; c < C; ++c) w.f32(pts.empty() ? 0.0f : values[std::size_t(pts[0]) * C + c]);
    ChunkInfo &ci = sink.add(field.name, Codec::kRawConstant, w.take());
    ci.channels = static_cast<uint16_t>(C);
    ci.transform = field.transform;
    for (uint32_t p : pts) {
      for (int c = 0; c < C; ++c) out.recon[std::size_t(p) * C + c] = values[std::size_t(pts[0]) * C + c];
    }
    out.trace.codec = Codec::kRawConstant;
    out.trace.symbols.assign(values.size(), 0);
    finishRecon(out, n, C, mask);
    return out;
  }

  if (route.codec == Codec::kVqAns) {
    std::vector<float> vecs(pts.size() * C);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      std::copy_n(values.begin() + std::size_t(pts[k]) * C, C, vecs.begin() + k * C);
    }
    VQFitOptions opt;
    opt.codebookSize = std::max(1, std::min<int>(config.vqSize, static_cast<int>(pts.size())));
    opt.iterations = config.vqIterations;
    opt.seed = config.seed;
    VQCodebook cb = fitVQCodebook(vecs, C, opt).codebook;
    StoredCodebook stored = snapCodebook(cb);
    std::vector<uint32_t> idx = vqEncode(vecs, cb);
    const uint32_t symbolCount = std::max(2, cb.size);

    ByteWriter w;
    w.u32(static_cast<uint32_t>(cb.size));
    for (int j = 0; j < C; ++j) {
      w.f32(stored.lo[j]);
      w.f32(stored.hi[j]);
    }
    std::vector<uint8_t> z = deflateBytes(stored.codes);
    w.u32(static_cast<uint32_t>(z.size()));
    w.bytes(z);
    writeAnsStream(w, idx, pts, 1, symbolCount, EntropyModelKind::kFactorized, ctx, field.name);
    ChunkInfo &ci = sink.add(field.name, Codec::kVqAns, w.take());
    ci.channels = static_cast<uint16_t>(C);
    ci.bits = static_cast<uint8_t>(std::ceil(std::log2(double(symbolCount))));

    out.trace.channels = 1;
    out.trace.bits = ci.bits;
    out.trace.symbols.assign(n, 0);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      out.trace.symbols[pts[k]] = idx[k];
      std::copy_n(cb.centroid(static_cast<int>(idx[k])), C, out.recon.begin() + std::size_t(pts[k]) * C);
    }
    finishRecon(out, n, C, mask);
    return out;
  }

  // Scalar quantization, one scheme per channel.
  const int bits = route.bits;
  std::vector<QuantizationScheme> schemes(C);
  std::vector<float> column(pts.size());
  for (int c = 0; c < C; ++c) {
    for (std::size_t k = 0; k < pts.size(); ++k) column[k] = values[std::size_t(pts[k]) * C + c];
    bool constant = false;
    schemes[c] = channelScheme(column, bits, config.clipPct, field.transform, field.name, &constant);
  }
  std::vector<uint32_t> symbols(values.size(), 0);
  for (uint32_t p : pts) {
    for (int c = 0; c < C; ++c) {
      const std::size_t k = std::size_t(p) * C + c;
      symbols[k] = quantizeValue(values[k], schemes[c]);
      out.recon[k] = float(invertTransform(field.transform, dequantizeValue(symbols[k], schemes[c])));
    }
  }
  ByteWriter w;
  if (route.codec == Codec::kPngPlane) {
    SymbolPlane plane{field.name, C, bits, symbols};
    std::vector<AttributePlane> planes = packPlanes(plane, *ctx.grid);
    w.u16(static_cast<uint16_t>(planes.size()));
    for (const AttributePlane &p : planes) {
      std::vector<uint8_t> png = encodePng(p.image);
      w.u32(static_cast<uint32_t>(png.size()));
      w.bytes(png);
    }
  } else {
    std::vector<uint32_t> coded(pts.size() * C);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      std::copy_n(symbols.begin() + std::size_t(pts[k]) * C, C, coded.begin() + k * C);
    }
    const EntropyModelKind kind = field.name == "means" ? EntropyModelKind::kFactorized : config.entropyModel;
    w.u8(static_cast<uint8_t>(kind));
    writeAnsStream(w, coded, pts, C, 1u << bits, kind, ctx, field.name);
  }
  ChunkInfo &ci = sink.add(field.name, route.codec, w.take());
  ci.channels = static_cast<uint16_t>(C);
  ci.bits = static_cast<uint8_t>(bits);
  ci.transform = field.transform;
  for (const auto &s : schemes) {
    ci.rangeMin.push_back(s.vMin);
    ci.rangeMax.push_back(s.vMax);
  }
  if (route.codec == Codec::kAns) {
    ci.entropyModel = field.name == "means" ? EntropyModelKind::kFactorized : config.entropyModel;
  }
  out.trace.bits = bits;
  out.trace.schemes = schemes;
  out.trace.symbols = std::move(symbols);
  finishRecon(out, n, C, mask);
  return out;
}

AttributeSymbols decodeAttribute(const ChunkInfo &ci, std::span<const uint8_t> body, const AttrField &field,
                                 std::size_t n, const std::vector<uint8_t> *mask, const CodingContext &ctx,
                                 std::vector<float> &recon) {
  const int C = field.channels;
  if (ci.channels != C) {
    throw Error(ErrorCode::kCorrupt, "chunk '" + ci.name + "' has " + std::to_string(ci.channels) + " channels, expected " +
                                         std::to_string(C));
  }
  recon.assign(n * C, 0.0f);
  AttributeSymbols trace;
  trace.codec = ci.codec;
  trace.channels = C;
  trace.bits = ci.bits;
  const std::vector<uint32_t> pts = codedPoints(n, mask, ci.codec);
  ByteReader r(body, "chunk '" + ci.name + "'");

  if (ci.codec == Codec::kRawConstant) {
    const uint32_t count = r.u32();
    if (count != pts.size()) throw Error(ErrorCode::kCorrupt, "constant chunk '" + ci.name + "' has the wrong count");
    std::vector<float> v(C);
    for (int c = 0; c < C; ++c) v[c] = r.f32();
    for (uint32_t p : pts) std::copy(v.begin(), v.end(), recon.begin() + std::size_t(p) * C);
    trace.symbols.assign(n * C, 0);
    trace.bits = 0;
  } else if (ci.codec == Codec::kVqAns) {
    const uint32_t size = r.u32();
    if (size == 0 || size > pts.size() + 1 || size > kAnsMaxSymbols) {
      throw Error(ErrorCode::kCorrupt, "codebook size of '" + ci.name + "' is invalid");
    }
    std::vector<float> lo(C), hi(C);
    for (int j = 0; j < C; ++j) {
      lo[j] = r.f32();
      hi[j] = r.f32();
      if (!(lo[j] < hi[j])) throw Error(ErrorCode::kCorrupt, "codebook range of '" + ci.name + "' is invalid");
    }
    const uint32_t zLen = r.u32();
    std::vector<uint8_t> codes = inflateBytes(r.bytes(zLen), std::size_t(size) * C);
    VQCodebook cb = unsnapCodebook(static_cast<int>(size), C, lo, hi, codes);
    const uint32_t symbolCount = std::max<uint32_t>(2, size);
    std::vector<uint32_t> idx = readAnsStream(r, pts, 1, symbolCount, EntropyModelKind::kFactorized, ctx);
    trace.channels = 1;
    trace.symbols.assign(n, 0);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (idx[k] >= size) throw Error(ErrorCode::kCorrupt, "VQ index out of range in '" + ci.name + "'");
      trace.symbols[pts[k]] = idx[k];
      std::copy_n(cb.centroid(static_cast<int>(idx[k])), C, recon.begin() + std::size_t(pts[k]) * C);
    }
  } else if (ci.codec == Codec::kPngPlane || ci.codec == Codec::kAns) {
    if (ci.rangeMin.size() != std::size_t(C) || ci.bits < 1 || ci.bits > 16) {
      throw Error(ErrorCode::kCorrupt, "chunk '" + ci.name + "' lacks valid quantization schemes");
    }
    for (int c = 0; c < C; ++c) {
      trace.schemes.push_back(ci.scheme(c));
      trace.schemes.back().attribute = field.name;
    }
    for (const auto &s : trace.schemes) {
      if (!(s.vMin < s.vMax)) throw Error(ErrorCode::kCorrupt, "chunk '" + ci.name + "' has an empty range");
    }
    if (ci.codec == Codec::kPngPlane) {
      const uint16_t count = r.u16();
      std::vector<AttributePlane> layout = planeLayout(field.name, C, ci.bits);
      if (count != layout.size()) throw Error(ErrorCode::kCorrupt, "chunk '" + ci.name + "' has the wrong plane count");
      for (AttributePlane &p : layout) {
        const uint32_t len = r.u32();
        p.image = decodePng(r.bytes(len));
      }
      trace.symbols = unpackPlanes(layout, *ctx.grid, field.name, C, ci.bits).symbols;
    } else {
      const uint8_t kind = r.u8();
      if (kind != static_cast<uint8_t>(ci.entropyModel)) throw Error(ErrorCode::kCorrupt, "entropy model tag mismatch");
      std::vector<uint32_t> coded = readAnsStream(r, pts, C, 1u << ci.bits, ci.entropyModel, ctx);
      trace.symbols.assign(n * C, 0);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        std::copy_n(coded.begin() + k * C, C, trace.symbols.begin() + std::size_t(pts[k]) * C);
      }
    }
    const uint32_t top = (1u << ci.bits) - 1u;
    for (uint32_t p : pts) {
      for (int c = 0; c < C; ++c) {
        const std::size_t k = std::size_t(p) * C + c;
        if (trace.symbols[k] > top) throw Error(ErrorCode::kCorrupt, "symbol out of range in '" + ci.name + "'");
        recon[k] = float(invertTransform(ci.transform, dequantizeValue(trace.symbols[k], trace.schemes[c])));
      }
    }
  } else {
    throw Error(ErrorCode::kCorrupt, "chunk '" + ci.name + "' has a codec that cannot hold an attribute");
  }
  if (mask) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(*mask)[i]) std::fill_n(recon.begin() + i * C, C, 0.0f);
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// GOF encode / decode

// Prepared GOF: pruned, canonicalized, masked and sorted into decoded order.
GofTrace encodeGof(DynamicGaussianCloud cloud, const EncodeConfig &config, ChunkSink &sink, GofInfo &info) {
  GofTrace trace;
  const bool dynamic = cloud.motion.variant != MotionVariant::kNone || !cloud.temporalOpacity.empty();

  stageGuard<int>("encode/validate", [&] {
    ValidationReport report = dynamic ? validate(cloud) : validate(cloud.base);
    // Non-unit quaternions are repaired by canonicalization; anything else is fatal.
    for (const auto &f : report.findings) {
      if (f.kind == "non-finite") throw Error(ErrorCode::kNonFinite, report.toString());
      if (f.kind == "dimension mismatch") throw Error(ErrorCode::kDimensionMismatch, report.toString());
    }
    for (const auto &f : report.findings) {
      if (f.kind != "non-unit quaternion") throw Error(ErrorCode::kInvalidArgument, report.toString());
    }
    return 0;
  });

  stageGuard<int>("encode/prune", [&] {
    PruneResult pr = applyPruning(cloud.base, config.prune);
    trace.prune = pr.report;
    if (pr.report.kept == 0) throw Error(ErrorCode::kEmptyCloud, "no points survive pruning");
    if (pr.report.totalRemoved() > 0) cloud = cloud.select(pr.report.indicesKept);
    return 0;
  });

  stageGuard<int>("encode/canonicalize", [&] {
    const std::size_t n = cloud.size();
    std::vector<double> factor(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const float *q = &cloud.base.rotations[i * 4];
      double norm = std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] + double(q[2]) * q[2] + double(q[3]) * q[3]);
      if (norm > 0.0) factor[i] = (q[0] < 0 ? -1.0 : 1.0) / norm;
    }
    const GaussianCloud before = cloud.base;
    cloud.base = canonicalize(cloud.base);
    // Rotation coefficients follow the base quaternion's scale and sign so
    // the normalized trajectory is unchanged.
    MotionModel &m = cloud.motion;
    if (m.variant == MotionVariant::kPolynomial && m.rotationDegree > 0) {
      const std::size_t w = std::size_t(m.rotationDegree) * 4;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::equal(before.rotations.begin() + i * 4, before.rotations.begin() + i * 4 + 4,
                       cloud.base.rotations.begin() + i * 4)) {
          continue;
        }
        for (std::size_t j = 0; j < w; ++j) m.rotationCoeffs[i * w + j] = float(m.rotationCoeffs[i * w + j] * factor[i]);
      }
    }
    return 0;
  });

  std::optional<AttributeMask> shMask, staticMask;
  stageGuard<int>("encode/mask", [&] {
    if (config.shMaskEnabled && cloud.base.shCoeffs() > 0) {
      shMask = deriveShMask(cloud.base, config.shMaskThreshold);
      cloud = applyMask(cloud, *shMask);
    }
    if (config.staticMaskEnabled && cloud.motion.variant != MotionVariant::kNone) {
      staticMask = deriveStaticMask(cloud, config.staticMaskThreshold, config.staticMaskSamples);
      cloud = applyMask(cloud, *staticMask);
    }
    return 0;
  });

  // Sort, then reorder so decoded point k sits in the k-th valid cell.
  stageGuard<int>("encode/plas", [&] {
    const std::size_t n = cloud.size();
    PlaneGrid grid;
    if (config.plasEnabled) {
      PlasOptions opt;
      opt.seed = config.seed;
      opt.proposalsPerPoint = config.plasProposals;
      grid = sortPlas(plasFeatures(cloud.base), 7, n, opt, &trace.plas);
    } else {
      grid = makeSquareGrid(n);
    }
    const std::vector<uint32_t> cells = grid.cellToPoint();
    trace.order.reserve(n);
    for (uint32_t c = 0; c < cells.size(); ++c) {
      if (cells[c] != UINT32_MAX) trace.order.push_back(cells[c]);
    }
    std::vector<uint32_t> validCells;
    for (uint32_t c = 0; c < grid.cellCount(); ++c) {
      if (grid.validity[c]) validCells.push_back(c);
    }
    grid.perm = validCells;
    trace.grid = std::move(grid);
    cloud = cloud.select(trace.order);
    auto reorder = [&](std::optional<AttributeMask> &m) {
      if (!m) return;
      std::vector<uint8_t> bits(n);
      for (std::size_t k = 0; k < n; ++k) bits[k] = m->bits[trace.order[k]];
      m->bits = std::move(bits);
    };
    reorder(shMask);
    reorder(staticMask);
    return 0;
  });
  trace.shMask = shMask;
  trace.staticMask = staticMask;

  const std::size_t n = cloud.size();
  info.pointCount = static_cast<uint32_t>(n);
  info.width = static_cast<uint32_t>(trace.grid.width);
  info.height = static_cast<uint32_t>(trace.grid.height);
  info.timeStart = cloud.timeStart;
  info.timeEnd = cloud.timeEnd;
  info.variant = cloud.motion.variant;
  info.positionDegree = static_cast<uint8_t>(cloud.motion.positionDegree);
  info.rotationDegree = static_cast<uint8_t>(cloud.motion.rotationDegree);
  info.basisCount = static_cast<uint16_t>(cloud.motion.basisCount);
  info.controlCount = static_cast<uint16_t>(cloud.motion.controlCount);
  info.temporalOpacity = !cloud.temporalOpacity.empty();

  sink.add("grid", Codec::kRaw, rawBody(packBits(trace.grid.validity)));
  if (shMask) sink.add("mask_shN", Codec::kRaw, rawBody(packBits(shMask->bits)));
  if (staticMask) sink.add("mask_motion", Codec::kRaw, rawBody(packBits(staticMask->bits)));
  if (!cloud.base.flags.empty()) sink.add("flags", Codec::kRaw, rawBody(cloud.base.flags));
  if (cloud.motion.variant == MotionVariant::kBasis) {
    std::vector<uint8_t> raw(cloud.motion.basisCurves.size() * 4);
    std::memcpy(raw.data(), cloud.motion.basisCurves.data(), raw.size());
    sink.add("basis_curves", Codec::kRaw, rawBody(raw));
  }

  DynamicGaussianCloud recon = cloud;
  std::vector<AttrField> fields = attributeFields(cloud);
  std::vector<AttrField> reconFields = attributeFields(recon);
  CodingContext ctx;
  ctx.config = &config;
  ctx.grid = &trace.grid;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const AttrField &field = fields[f];
    const std::vector<uint8_t> *mask = field.mask == MaskKind::kSh && shMask         ? &shMask->bits
                                       : field.mask == MaskKind::kMotion && staticMask ? &staticMask->bits
                                                                                       : nullptr;
    EncodedAttribute enc = stageGuard<EncodedAttribute>("encode/" + field.name, [&] {
      return encodeAttribute(field, mask, ctx, sink);
    });
    *reconFields[f].data = std::move(enc.recon);
    trace.attributes[field.name] = std::move(enc.trace);
    if (field.name == "means") ctx.means = &recon.base.means;
  }
  trace.reconstruction = std::move(recon);
  return trace;
}

const ChunkInfo *findChunk(const std::vector<const ChunkInfo *> &chunks, const std::string &name) {
  for (const ChunkInfo *c : chunks) {
    if (c->name == name) return c;
  }
  return nullptr;
}

std::span<const uint8_t> chunkBody(std::span<const uint8_t> bytes, const ChunkInfo &c) {
  std::span<const uint8_t> body = bytes.subspan(c.offset, c.length);
  if (crc32Of(body) != c.crc) {
    throw Error(ErrorCode::kChecksum, "checksum mismatch in chunk '" + c.name + "' of GOF " + std::to_string(c.gof));
  }
  return body;
}

DynamicGaussianCloud decodeGofImpl(std::span<const uint8_t> bytes, const ContainerInfo &info, uint32_t gofIdx,
                                   GofTrace *trace) {
  const GofInfo &g = info.gofs.at(gofIdx);
  const std::vector<const ChunkInfo *> chunks = info.chunksOf(gofIdx);
  const std::size_t n = g.pointCount;

  DynamicGaussianCloud out;
  out.gofIndex = static_cast<int>(g.index);
  out.timeStart = g.timeStart;
  out.timeEnd = g.timeEnd;
  out.base.shDegree = info.shDegree;
  out.base.featureDim = info.featureDim;
  out.base.opacityLogits.resize(n);
  MotionModel &m = out.motion;
  m.variant = g.variant;
  if (g.variant == MotionVariant::kPolynomial) {
    m.positionDegree = g.positionDegree;
    m.rotationDegree = g.rotationDegree;
  } else if (g.variant == MotionVariant::kBasis) {
    m.basisCount = g.basisCount;
    m.controlCount = g.controlCount;
  }
  if (g.temporalOpacity) out.temporalOpacity.center.resize(n);

  auto need = [&](const std::string &name) -> const ChunkInfo & {
    const ChunkInfo *c = findChunk(chunks, name);
    if (!c) throw Error(ErrorCode::kCorrupt, "GOF " + std::to_string(g.index) + " lacks chunk '" + name + "'");
    return *c;
  };

  GofTrace local;
  local.grid.width = static_cast<int>(g.width);
  local.grid.height = static_cast<int>(g.height);
  local.grid.validity = unpackBits(readRawBody(chunkBody(bytes, need("grid"))), local.grid.cellCount());
  for (uint32_t c = 0; c < local.grid.cellCount(); ++c) {
    if (local.grid.validity[c]) local.grid.perm.push_back(c);
  }
  if (local.grid.perm.size() != n) throw Error(ErrorCode::kCorrupt, "grid valid-cell count differs from GOF size");

  auto readMask = [&](const std::string &name, const char *attr) -> std::optional<AttributeMask> {
    const ChunkInfo *c = findChunk(chunks, name);
    if (!c) return std::nullopt;
    AttributeMask mask;
    mask.attribute = attr;
    mask.bits = unpackBits(readRawBody(chunkBody(bytes, *c)), n);
    mask.ratio = double(mask.activeCount()) / double(n);
    return mask;
  };
  local.shMask = readMask("mask_shN", "shN");
  local.staticMask = readMask("mask_motion", "motion");
  if (const ChunkInfo *c = findChunk(chunks, "flags")) {
    out.base.flags = readRawBody(chunkBody(bytes, *c));
    if (out.base.flags.size() != n) throw Error(ErrorCode::kCorrupt, "flags chunk has the wrong length");
  }
  if (g.variant == MotionVariant::kBasis) {
    std::vector<uint8_t> raw = readRawBody(chunkBody(bytes, need("basis_curves")));
    if (raw.size() != std::size_t(g.basisCount) * g.controlCount * 4) {
      throw Error(ErrorCode::kCorrupt, "basis curve chunk has the wrong size");
    }
    m.basisCurves.resize(raw.size() / 4);
    std::memcpy(m.basisCurves.data(), raw.data(), raw.size());
  }

  CodingContext ctx;
  ctx.grid = &local.grid;
  std::vector<AttrField> fields = attributeFields(out);
  for (const AttrField &field : fields) {
    const ChunkInfo &ci = need(field.name);
    const std::vector<uint8_t> *mask = field.mask == MaskKind::kSh && local.shMask         ? &local.shMask->bits
                                       : field.mask == MaskKind::kMotion && local.staticMask ? &local.staticMask->bits
                                                                                             : nullptr;
    std::vector<float> recon;
    AttributeSymbols sym = stageGuard<AttributeSymbols>("decode/" + field.name, [&] {
      return decodeAttribute(ci, chunkBody(bytes, ci), field, n, mask, ctx, recon);
    });
    *field.data = std::move(recon);
    local.attributes[field.name] = std::move(sym);
    if (field.name == "means") ctx.means = &out.base.means;
  }
  if (trace) {
    local.order.resize(n);
    for (std::size_t i = 0; i < n; ++i) local.order[i] = static_cast<uint32_t>(i);
    local.reconstruction = out;
    *trace = std::move(local);
  }
  return out;
}

}  // namespace

QuantizationScheme ChunkInfo::scheme(int channel) const {
  QuantizationScheme s;
  s.attribute = name;
  s.transform = transform;
  s.bits = bits;
  s.vMin = rangeMin.at(channel);
  s.vMax = rangeMax.at(channel);
  return s;
}

std::vector<const ChunkInfo *> ContainerInfo::chunksOf(uint32_t gof) const {
  std::vector<const ChunkInfo *> out;
  for (const ChunkInfo &c : chunks) {
    if (c.gof == gof) out.push_back(&c);
  }
  return out;
}

ContainerInfo readContainerInfo(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kContainerMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a GSCS container (bad magic)");
  }
  ByteReader r(bytes, "container");
  r.bytes(4);
  ContainerInfo info;
  info.version = r.u16();
  if (info.version != kContainerVersion) {
    throw Error(ErrorCode::kBadVersion, "unsupported container version " + std::to_string(info.version));
  }
  const uint8_t flavor = r.u8();
  if (flavor > 1) throw Error(ErrorCode::kCorrupt, "unknown container flavor");
  info.flavor = static_cast<Flavor>(flavor);
  info.headerLength = r.u32();
  std::span<const uint8_t> header = r.bytes(info.headerLength);
  ByteReader hr(header, "container header");
  readHeader(hr, info);
  if (hr.remaining() != 0) throw Error(ErrorCode::kCorrupt, "container header has trailing bytes");
  info.payloadOffset = kPrefixBytes + info.headerLength;
  info.fileSize = bytes.size();
  uint64_t expect = info.payloadOffset;
  for (const ChunkInfo &c : info.chunks) {
    if (c.offset != expect || c.length > bytes.size() || c.offset > bytes.size() - c.length) {
      throw Error(c.offset + c.length > bytes.size() ? ErrorCode::kTruncated : ErrorCode::kCorrupt,
                  "chunk '" + c.name + "' lies outside the file or overlaps another");
    }
    expect += c.length;
  }
  if (expect != bytes.size()) {
    throw Error(expect > bytes.size() ? ErrorCode::kTruncated : ErrorCode::kCorrupt, "container has trailing bytes");
  }
  return info;
}

EncodeResult encodeStatic(const GaussianCloud &cloud, const EncodeConfig &config) {
  if (cloud.empty()) throw Error(ErrorCode::kEmptyCloud, "cannot encode an empty cloud", "encode");
  ContainerInfo info;
  info.flavor = Flavor::kStatic;
  info.shDegree = static_cast<uint8_t>(cloud.shDegree);
  info.featureDim = static_cast<uint16_t>(cloud.featureDim);
  info.frameCount = 1;
  info.gofs.resize(1);
  std::vector<std::vector<uint8_t>> bodies;
  ChunkSink sink{&info, &bodies, 0};
  DynamicGaussianCloud dyn;
  dyn.base = cloud;
  EncodeResult result;
  result.gofs.push_back(encodeGof(std::move(dyn), config, sink, info.gofs[0]));
  result.bytes = assemble(info, bodies);
  return result;
}

GaussianCloud decodeStatic(std::span<const uint8_t> bytes, GofTrace *trace) {
  ContainerInfo info = readContainerInfo(bytes);
  if (info.flavor != Flavor::kStatic) {
    throw Error(ErrorCode::kUnsupported, "container holds a dynamic sequence; use the dynamic decoder");
  }
  return decodeGofImpl(bytes, info, 0, trace).base;
}

EncodeResult encodeDynamic(const DynamicSequence &sequence, const EncodeConfig &config) {
  if (sequence.gofs.empty()) throw Error(ErrorCode::kEmptyCloud, "sequence has no GOFs", "encode");
  if (sequence.segments.size() != sequence.gofs.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "sequence needs one segment per GOF", "encode");
  }
  ContainerInfo info;
  info.flavor = Flavor::kDynamic;
  info.shDegree = static_cast<uint8_t>(sequence.gofs[0].base.shDegree);
  info.featureDim = static_cast<uint16_t>(sequence.gofs[0].base.featureDim);
  info.frameCount = static_cast<uint32_t>(sequence.frameCount);
  info.fps = sequence.fps;
  info.gofs.resize(sequence.gofs.size());
  std::vector<std::vector<uint8_t>> bodies;
  EncodeResult result;
  for (std::size_t k = 0; k < sequence.gofs.size(); ++k) {
    const DynamicGaussianCloud &gof = sequence.gofs[k];
    const GofSegment &seg = sequence.segments[k];
    if (gof.base.shDegree != info.shDegree || gof.base.featureDim != info.featureDim) {
      throw Error(ErrorCode::kDimensionMismatch, "GOFs must share SH degree and feature width", "encode");
    }
    if (gof.base.empty()) throw Error(ErrorCode::kEmptyCloud, "GOF " + std::to_string(k) + " is empty", "encode");
    GofInfo &g = info.gofs[k];
    g.index = static_cast<uint32_t>(k);
    g.frameStart = static_cast<uint32_t>(seg.frameStart);
    g.frameEnd = static_cast<uint32_t>(seg.frameEnd);
    ChunkSink sink{&info, &bodies, static_cast<uint32_t>(k)};
    try {
      result.gofs.push_back(encodeGof(gof, config, sink, g));
    } catch (const Error &e) {
      throw e.withStage("gof" + std::to_string(k));
    }
    result.gofs.back().reconstruction.gofIndex = static_cast<int>(k);
  }
  result.bytes = assemble(info, bodies);
  return result;
}

DynamicSequence decodeDynamic(std::span<const uint8_t> bytes, std::vector<GofTrace> *traces) {
  ContainerInfo info = readContainerInfo(bytes);
  DynamicSequence seq;
  seq.frameCount = static_cast<int>(info.frameCount);
  seq.fps = info.fps;
  if (traces) traces->clear();
  for (uint32_t k = 0; k < info.gofs.size(); ++k) {
    const GofInfo &g = info.gofs[k];
    seq.segments.push_back({static_cast<int>(g.index), static_cast<int>(g.frameStart), static_cast<int>(g.frameEnd)});
    GofTrace t;
    seq.gofs.push_back(decodeGofImpl(bytes, info, k, traces ? &t : nullptr));
    if (traces) traces->push_back(std::move(t));
  }
  return seq;
}

DynamicGaussianCloud decodeGof(std::span<const uint8_t> bytes, uint32_t gof, GofTrace *trace) {
  ContainerInfo info = readContainerInfo(bytes);
  if (gof >= info.gofs.size()) {
    throw Error(ErrorCode::kOutOfRange, "container has " + std::to_string(info.gofs.size()) + " GOFs, asked for " +
                                            std::to_string(gof));
  }
  return decodeGofImpl(bytes, info, gof, trace);
}

std::string breakdownLabel(const std::string &name) {
  if (name == "means") return "Mean";
  if (name == "rotations") return "Quat.";
  if (name == "scales") return "Scale";
  if (name == "opacity") return "Opa.";
  if (name == "sh0") return "SH 0";
  if (name == "shN" || name == "mask_shN") return "SH N";
  if (name == "features") return "Features";
  if (name == "motion_pos" || name == "motion_rot" || name == "motion_center" || name == "basis_coef" ||
      name == "basis_curves" || name == "mask_motion") {
    return "Motion";
  }
  if (name == "t_center" || name == "t_scale") return "Temporal Opa.";
  return "Meta";
}

MemoryBreakdownReport inspect(std::span<const uint8_t> bytes) {
  const ContainerInfo info = readContainerInfo(bytes);
  MemoryBreakdownReport report;
  const std::vector<std::string> order = {"Mean", "Quat.", "Scale", "Opa.", "SH 0", "SH N",
                                          "Features", "Motion", "Temporal Opa.", "Meta"};
  std::map<std::string, uint64_t> sums;
  for (const ChunkInfo &c : info.chunks) {
    chunkBody(bytes, c);  // verify
    sums[breakdownLabel(c.name)] += c.length;
    report.payloadBytes += c.length;
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    const uint64_t b = sums.count(order[k]) ? sums[order[k]] : 0;
    if (k >= 6 && b == 0) continue;
    BreakdownRow row;
    row.label = order[k];
    row.bytes = b;
    row.kilobytes = double(b) / 1024.0;
    row.percent = report.payloadBytes ? 100.0 * double(b) / double(report.payloadBytes) : 0.0;
    report.rows.push_back(row);
  }
  report.headerBytes = info.payloadOffset;
  report.fileBytes = bytes.size();
  return report;
}

std::string MemoryBreakdownReport::toCsv() const {
  std::ostringstream os;
  os << "attribute,bytes,kb,percent\n";
  os << std::fixed;
  for (const auto &r : rows) {
    os << r.label << ',' << r.bytes << ',' << std::setprecision(3) << r.kilobytes << ',' << std::setprecision(3)
       << r.percent << '\n';
  }
  os << "Total," << payloadBytes << ',' << std::setprecision(3) << double(payloadBytes) / 1024.0 << ",100.000\n";
  return os.str();
}

std::string MemoryBreakdownReport::toTable() const {
  std::ostringstream os;
  os << std::left << std::setw(15) << "Attribute" << std::right << std::setw(14) << "Size (KB)" << std::setw(12)
     << "Share" << '\n';
  os << std::fixed;
  for (const auto &r : rows) {
    os << std::left << std::setw(15) << r.label << std::right << std::setw(14) << std::setprecision(1) << r.kilobytes
       << std::setw(11) << std::setprecision(1) << r.percent << "%\n";
  }
  os << std::left << std::setw(15) << "Total" << std::right << std::setw(14) << std::setprecision(1)
     << double(payloadBytes) / 1024.0 << std::setw(11) << "100.0" << "%\n";
  os << "(header " << headerBytes << " B, file " << fileBytes << " B)\n";
  return os.str();
}

std::vector<std::string> exportPlanes(std::span<const uint8_t> bytes, const std::string &dir) {
  const ContainerInfo info = readContainerInfo(bytes);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  for (const ChunkInfo &c : info.chunks) {
    if (c.codec != Codec::kPngPlane) continue;
    ByteReader r(chunkBody(bytes, c), "chunk '" + c.name + "'");
    const uint16_t count = r.u16();
    std::vector<AttributePlane> layout = planeLayout(c.name, c.channels, c.bits);
    if (count != layout.size()) throw Error(ErrorCode::kCorrupt, "chunk '" + c.name + "' has the wrong plane count");
    for (const AttributePlane &p : layout) {
      const uint32_t len = r.u32();
      auto png = r.bytes(len);
      std::string file = (c.gof > 0 ? "gof" + std::to_string(c.gof) + "_" : std::string()) + p.name + ".png";
      writeFile((std::filesystem::path(dir) / file).string(), png);
      written.push_back(file);
    }
  }
  return written;
}

}  // namespace gsc
