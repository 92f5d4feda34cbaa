#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "gscodec/png.h"
#include "gscodec/splat.h"

namespace gsc {

// Pinhole camera, OpenCV convention: x right, y down, z forward. `rotation`
// (row-major) and `translation` map world points into camera space.
struct Camera {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  int width = 1, height = 1;
  std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 3> translation = {0, 0, 0};
  double near = 0.01;
  double far = 1000.0;

  // Throws kInvalidArgument when an invariant fails.
  void check() const;
  std::array<double, 3> toCamera(const std::array<double, 3> &world) const;
  std::array<double, 3> center() const;  // camera position in world space

  // Camera at `eye` looking at `target`; vertical field of view in radians.
  static Camera lookAt(const std::array<double, 3> &eye, const std::array<double, 3> &target,
                       const std::array<double, 3> &up, double fovY, int width, int height);
};

// JSON with keys fx, fy, cx, cy, width, height, rotation (9 numbers, row-major),
// translation (3 numbers), near, far.
Camera cameraFromJson(const std::string &text);
std::string cameraToJson(const Camera &camera);
Camera loadCamera(const std::string &path);

// H x W x 3 linear RGB, row-major.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, std::array<float, 3> fill = {0, 0, 0});
  float &at(int x, int y, int c) { return pixels[(std::size_t(y) * width + x) * 3 + c]; }
  float at(int x, int y, int c) const { return pixels[(std::size_t(y) * width + x) * 3 + c]; }
};

// 8-bit RGB with rounding after clamping to [0, 1].
PngImage toPng(const ImageBuffer &image);
ImageBuffer fromPng(const PngImage &png);

struct ProjectedGaussian {
  bool visible = false;  // false: outside the near/far range
  double mean[2] = {0, 0};
  double cov[3] = {0, 0, 0};  // xx, xy, yy in pixels^2, dilated
  double depth = 0.0;
};

// Screen-space low-pass dilation added to every projected covariance.
constexpr double kDilation = 0.3;
constexpr double kMaxAlpha = 0.999;
constexpr double kMinAlpha = 1.0 / 255.0;

ProjectedGaussian projectGaussian(const float *mean, const float *rotation, const float *logScales,
                                  const Camera &camera);

// View-dependent color for a unit view direction: 0.5 + SH expansion, clamped
// to [0, 1]. `shN` holds shCoeffsForDegree(degree) RGB triples.
std::array<double, 3> evalSh(int degree, const float *sh0, const float *shN, const std::array<double, 3> &dir);

struct RenderStats {
  std::size_t visible = 0;
  // Per pixel: sum of splat weights plus the background weight.
  std::vector<double> weightSum;
};

// Front-to-back alpha compositing of depth-sorted splats (index tie-break).
ImageBuffer render(const GaussianCloud &cloud, const Camera &camera, std::array<float, 3> background = {0, 0, 0},
                   RenderStats *stats = nullptr);
ImageBuffer renderAtTime(const DynamicGaussianCloud &cloud, const Camera &camera, double t,
                         std::array<float, 3> background = {0, 0, 0});

// Cameras on a circle around the cloud's bounding box, looking at its center.
std::vector<Camera> orbitCameras(const GaussianCloud &cloud, int count, int width, int height, double fovY = 0.9);

}  // namespace gsc
