#include "gscodec/plas.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gscodec/error.h"
#include "random_util.h"

namespace gsc {

std::vector<uint32_t> PlaneGrid::cellToPoint() const {
  std::vector<uint32_t> cells(cellCount(), UINT32_MAX);
  for (std::size_t i = 0; i < perm.size(); ++i) cells[perm[i]] = static_cast<uint32_t>(i);
  return cells;
}

void PlaneGrid::check(std::size_t pointCount) const {
  if (width <= 0 || height <= 0 || validity.size() != cellCount()) {
    throw Error(ErrorCode::kDimensionMismatch, "grid validity mask does not match its dimensions");
  }
  if (perm.size() != pointCount) {
    throw Error(ErrorCode::kDimensionMismatch, "grid holds " + std::to_string(perm.size()) + " points, expected " +
                                                   std::to_string(pointCount));
  }
  std::vector<uint8_t> used(cellCount(), 0);
  std::size_t valid = 0;
  for (uint8_t v : validity) valid += v ? 1 : 0;
  if (valid != pointCount) throw Error(ErrorCode::kCorrupt, "grid valid-cell count differs from point count");
  for (uint32_t c : perm) {
    if (c >= cellCount() || !validity[c] || used[c]) throw Error(ErrorCode::kCorrupt, "grid permutation is not injective into valid cells");
    used[c] = 1;
  }
}

PlaneGrid makeSquareGrid(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kEmptyCloud, "cannot lay out an empty cloud");
  std::size_t w = static_cast<std::size_t>(std::ceil(std::sqrt(double(n))));
  while (w * w < n) ++w;
  while (w > 1 && (w - 1) * (w - 1) >= n) --w;
  PlaneGrid g;
  g.width = g.height = static_cast<int>(w);
  g.validity.assign(w * w, 0);
  std::fill_n(g.validity.begin(), n, 1);
  g.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.perm[i] = static_cast<uint32_t>(i);
  return g;
}

std::vector<float> normalizeChannels(std::span<const float> values, int channels) {
  const std::size_t n = values.size() / channels;
  std::vector<float> out(values.size(), 0.0f);
  for (int c = 0; c < channels; ++c) {
    float lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, values[i * channels + c]);
      hi = std::max(hi, values[i * channels + c]);
    }
    if (!(hi > lo)) continue;
    const double inv = 1.0 / (double(hi) - double(lo));
    for (std::size_t i = 0; i < n; ++i) {
      out[i * channels + c] = static_cast<float>((double(values[i * channels + c]) - lo) * inv);
    }
  }
  return out;
}

std::vector<float> plasFeatures(const GaussianCloud &cloud) {
  const std::size_t n = cloud.size();
  std::vector<float> raw(n * 7);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) raw[i * 7 + a] = cloud.means[i * 3 + a];
    for (int a = 0; a < 3; ++a) raw[i * 7 + 3 + a] = cloud.sh0[i * 3 + a];
    raw[i * 7 + 6] = cloud.opacityLogits[i];
  }
  return normalizeChannels(raw, 7);
}

namespace {

class CostModel {
 public:
  CostModel(const PlaneGrid &grid, std::span<const float> features, int channels, std::span<const float> weights)
      : grid_(grid), features_(features), channels_(channels), weights_(weights), cells_(grid.cellToPoint()) {
    if (!weights_.empty() && weights_.size() != static_cast<std::size_t>(channels)) {
      throw Error(ErrorCode::kDimensionMismatch, "one weight per sorting channel is required");
    }
  }

  double pair(uint32_t p, uint32_t q) const {
    const float *a = &features_[std::size_t(p) * channels_];
    const float *b = &features_[std::size_t(q) * channels_];
    double s = 0.0;
    for (int c = 0; c < channels_; ++c) {
      double d = double(a[c]) - double(b[c]);
      s += (weights_.empty() ? 1.0 : double(weights_[c])) * d * d;
    }
    return s;
  }

  double total() const {
    double sum = 0.0;
    for (int y = 0; y < grid_.height; ++y) {
      for (int x = 0; x < grid_.width; ++x) {
        uint32_t p = cells_[std::size_t(y) * grid_.width + x];
        if (p == UINT32_MAX) continue;
        if (x + 1 < grid_.width) {
          uint32_t q = cells_[std::size_t(y) * grid_.width + x + 1];
          if (q != UINT32_MAX) sum += pair(p, q);
        }
        if (y + 1 < grid_.height) {
          uint32_t q = cells_[std::size_t(y + 1) * grid_.width + x];
          if (q != UINT32_MAX) sum += pair(p, q);
        }
      }
    }
    return sum;
  }

  // Cost of the edges around `cell` if it held point p, skipping `skipCell`.
  double local(uint32_t cell, uint32_t p, uint32_t skipCell) const {
    const int x = int(cell % grid_.width), y = int(cell / grid_.width);
    double s = 0.0;
    auto visit = [&](int nx, int ny) {
      if (nx < 0 || ny < 0 || nx >= grid_.width || ny >= grid_.height) return;
      uint32_t c = uint32_t(ny) * grid_.width + nx;
      if (c == skipCell) return;
      uint32_t q = cells_[c];
      if (q != UINT32_MAX) s += pair(p, q);
    };
    visit(x - 1, y);
    visit(x + 1, y);
    visit(x, y - 1);
    visit(x, y + 1);
    return s;
  }

  // Cost change from swapping the points of two valid cells.
  double swapDelta(uint32_t a, uint32_t b) const {
    const uint32_t pa = cells_[a], pb = cells_[b];
    const double before = local(a, pa, b) + local(b, pb, a);
    const double after = local(a, pb, b) + local(b, pa, a);
    return after - before;
  }

  void swap(uint32_t a, uint32_t b) { std::swap(cells_[a], cells_[b]); }
  const std::vector<uint32_t> &cells() const { return cells_; }

 private:
  const PlaneGrid &grid_;
  std::span<const float> features_;
  int channels_;
  std::span<const float> weights_;
  std::vector<uint32_t> cells_;
};

}  // namespace

double smoothnessCost(const PlaneGrid &grid, std::span<const float> features, int channels,
                      std::span<const float> weights) {
  if (channels <= 0) throw Error(ErrorCode::kInvalidArgument, "smoothness cost needs at least one channel");
  grid.check(features.size() / channels);
  return CostModel(grid, features, channels, weights).total();
}

PlaneGrid sortPlas(std::span<const float> features, int channels, std::size_t pointCount,
                   const PlasOptions &options, PlasStats *stats) {
  if (pointCount == 0) throw Error(ErrorCode::kEmptyCloud, "cannot sort an empty cloud");
  if (channels <= 0 || features.size() != pointCount * channels) {
    throw Error(ErrorCode::kDimensionMismatch, "sorting features must be N x channels");
  }
  PlaneGrid grid = makeSquareGrid(pointCount);
  std::mt19937_64 rng(options.seed);

  // Seeded random initial placement over the valid cells.
  std::vector<uint32_t> validCells;
  for (uint32_t c = 0; c < grid.cellCount(); ++c) {
    if (grid.validity[c]) validCells.push_back(c);
  }
  for (std::size_t i = validCells.size(); i > 1; --i) {
    std::swap(validCells[i - 1], validCells[uniformIndex(rng, i)]);
  }
  for (std::size_t i = 0; i < pointCount; ++i) grid.perm[i] = validCells[i];

  CostModel model(grid, features, channels, options.weights);
  PlasStats local;
  local.initialCost = model.total();

  const int w = grid.width, h = grid.height;
  const uint64_t proposals = uint64_t(std::max(options.proposalsPerPoint, 0)) * pointCount;
  for (int r = std::max(w / 2, 1);; r /= 2) {
    const int span = 2 * r + 1;
    for (uint64_t k = 0; k < proposals; ++k) {
      const uint32_t a = validCells[uniformIndex(rng, validCells.size())];
      const int dx = int(uniformIndex(rng, span)) - r;
      const int dy = int(uniformIndex(rng, span)) - r;
      const int bx = int(a % w) + dx, by = int(a / w) + dy;
      if ((dx == 0 && dy == 0) || bx < 0 || by < 0 || bx >= w || by >= h) continue;
      const uint32_t b = uint32_t(by) * w + bx;
      if (!grid.validity[b]) continue;
      if (model.swapDelta(a, b) < 0.0) {
        model.swap(a, b);
        ++local.acceptedSwaps;
      }
    }
    local.passCosts.push_back(model.total());
    if (r == 1) break;
  }

  const auto &cells = model.cells();
  for (uint32_t c = 0; c < cells.size(); ++c) {
    if (cells[c] != UINT32_MAX) grid.perm[cells[c]] = c;
  }
  local.finalCost = local.passCosts.empty() ? local.initialCost : local.passCosts.back();
  if (stats) *stats = std::move(local);
  return grid;
}

std::vector<AttributePlane> planeLayout(const std::string &attribute, int channels, int bits) {
  if (channels <= 0) throw Error(ErrorCode::kInvalidArgument, "attribute '" + attribute + "' has no channels");
  if (bits < 1 || bits > 16) throw Error(ErrorCode::kInvalidArgument, "plane bit depth must be 1-16");
  std::vector<AttributePlane> out;
  const int groups = (channels + 3) / 4;
  for (int g = 0; g < groups; ++g) {
    const std::string base = groups == 1 ? attribute : attribute + "_" + std::to_string(g);
    const int width = std::min(4, channels - 4 * g);
    for (int part = 0; part < (bits > 8 ? 2 : 1); ++part) {
      AttributePlane p;
      p.attribute = attribute;
      p.firstChannel = 4 * g;
      p.lowByte = part == 1;
      p.name = bits > 8 ? base + (part == 0 ? "_hi" : "_lo") : base;
      p.image.channels = width;
      p.image.bitDepth = 8;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<AttributePlane> packPlanes(const SymbolPlane &symbols, const PlaneGrid &grid) {
  const std::size_t n = grid.perm.size();
  if (symbols.symbols.size() != n * symbols.channels) {
    throw Error(ErrorCode::kDimensionMismatch, "symbols for '" + symbols.attribute + "' do not match the grid");
  }
  std::vector<AttributePlane> planes = planeLayout(symbols.attribute, symbols.channels, symbols.bits);
  const uint32_t limit = symbols.bits >= 32 ? UINT32_MAX : (1u << symbols.bits) - 1u;
  for (uint32_t s : symbols.symbols) {
    if (s > limit) throw Error(ErrorCode::kOutOfRange, "symbol exceeds bit depth of '" + symbols.attribute + "'");
  }
  for (AttributePlane &p : planes) {
    PngImage &img = p.image;
    img.width = grid.width;
    img.height = grid.height;
    img.samples.assign(img.sampleCount(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < img.channels; ++c) {
        uint32_t s = symbols.symbols[i * symbols.channels + p.firstChannel + c];
        uint16_t v = symbols.bits > 8 ? uint16_t(p.lowByte ? (s & 0xff) : (s >> 8)) : uint16_t(s);
        img.samples[std::size_t(grid.perm[i]) * img.channels + c] = v;
      }
    }
  }
  return planes;
}

SymbolPlane unpackPlanes(std::span<const AttributePlane> planes, const PlaneGrid &grid, const std::string &attribute,
                         int channels, int bits) {
  const std::vector<AttributePlane> layout = planeLayout(attribute, channels, bits);
  if (planes.size() != layout.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "attribute '" + attribute + "' expects " + std::to_string(layout.size()) +
                                                   " planes, got " + std::to_string(planes.size()));
  }
  const std::size_t n = grid.perm.size();
  SymbolPlane out;
  out.attribute = attribute;
  out.channels = channels;
  out.bits = bits;
  out.symbols.assign(n * channels, 0);
  for (std::size_t k = 0; k < planes.size(); ++k) {
    const AttributePlane &p = planes[k];
    const AttributePlane &expect = layout[k];
    if (p.image.width != grid.width || p.image.height != grid.height || p.image.channels != expect.image.channels ||
        p.image.bitDepth != 8 || p.image.samples.size() != p.image.sampleCount()) {
      throw Error(ErrorCode::kDimensionMismatch, "plane '" + expect.name + "' does not match the grid");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < expect.image.channels; ++c) {
        uint32_t v = p.image.samples[std::size_t(grid.perm[i]) * expect.image.channels + c];
        uint32_t &s = out.symbols[i * channels + expect.firstChannel + c];
        if (bits > 8) s |= expect.lowByte ? v : (v << 8);
        else s = v;
      }
    }
  }
  return out;
}

}  // namespace gsc
