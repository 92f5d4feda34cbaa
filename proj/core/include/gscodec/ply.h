#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gscodec/splat.h"

namespace gsc {

// Reads the community 3DGS vertex layout (x,y,z, rot_0..3, scale_0..2,
// opacity, f_dc_0..2, optional f_rest_*). Binary little-endian and ASCII are
// accepted. Extra scalar properties are ignored except `feat_*` (features) and
// `flags`.
GaussianCloud loadPly(std::span<const uint8_t> bytes);

// Binary little-endian PLY. Throws kEmptyCloud for N = 0.
std::vector<uint8_t> savePly(const GaussianCloud &cloud);

// Dynamic clouds use the same vertex layout plus motion and temporal-opacity
// properties; time range and GOF tags travel in `comment gsc ...` lines.
DynamicGaussianCloud loadDynamicPly(std::span<const uint8_t> bytes, GofSegment *segment = nullptr);
std::vector<uint8_t> saveDynamicPly(const DynamicGaussianCloud &cloud, const GofSegment &segment);

std::vector<uint8_t> readFile(const std::string &path);
void writeFile(const std::string &path, std::span<const uint8_t> bytes);

}  // namespace gsc
