#include "gscodec/render.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "gscodec/dynamic.h"
#include "gscodec/error.h"
#include "gscodec/parallel.h"

namespace gsc {

namespace {

constexpr int kTile = 16;

using Vec3 = std::array<double, 3>;

Vec3 normalized(const Vec3 &v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(const Vec3 &a, const Vec3 &b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct Splat {
  double mean[2];
  double conic[3];  // inverse covariance: xx, xy, yy
  double opacity;
  double depth;
  std::array<double, 3> color;
  int x0, x1, y0, y1;  // inclusive pixel bounds
  bool live = false;
};

}  // namespace

void Camera::check() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw Error(ErrorCode::kInvalidArgument, "camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kInvalidArgument, "camera image size must be positive");
  if (!(near > 0.0) || !(near < far)) throw Error(ErrorCode::kInvalidArgument, "camera needs 0 < near < far");
  for (double v : rotation) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "camera rotation is not finite");
  }
  for (double v : translation) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "camera translation is not finite");
  }
}

std::array<double, 3> Camera::toCamera(const std::array<double, 3> &p) const {
  const auto &r = rotation;
  return {r[0] * p[0] + r[1] * p[1] + r[2] * p[2] + translation[0],
          r[3] * p[0] + r[4] * p[1] + r[5] * p[2] + translation[1],
          r[6] * p[0] + r[7] * p[1] + r[8] * p[2] + translation[2]};
}

std::array<double, 3> Camera::center() const {
  const auto &r = rotation;
  const auto &t = translation;
  return {-(r[0] * t[0] + r[3] * t[1] + r[6] * t[2]), -(r[1] * t[0] + r[4] * t[1] + r[7] * t[2]),
          -(r[2] * t[0] + r[5] * t[1] + r[8] * t[2])};
}

Camera Camera::lookAt(const std::array<double, 3> &eye, const std::array<double, 3> &target,
                      const std::array<double, 3> &up, double fovY, int width, int height) {
  const Vec3 z = normalized({target[0] - eye[0], target[1] - eye[1], target[2] - eye[2]});
  const Vec3 x = normalized(cross(z, up));
  const Vec3 y = cross(z, x);
  Camera cam;
  cam.width = width;
  cam.height = height;
  cam.fy = 0.5 * height / std::tan(0.5 * fovY);
  cam.fx = cam.fy;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.rotation = {x[0], x[1], x[2], y[0], y[1], y[2], z[0], z[1], z[2]};
  for (int r = 0; r < 3; ++r) {
    cam.translation[r] = -(cam.rotation[r * 3] * eye[0] + cam.rotation[r * 3 + 1] * eye[1] +
                           cam.rotation[r * 3 + 2] * eye[2]);
  }
  cam.check();
  return cam;
}

Camera cameraFromJson(const std::string &text) {
  Camera cam;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    cam.rotation = j.at("rotation").get<std::array<double, 9>>();
    cam.translation = j.at("translation").get<std::array<double, 3>>();
    cam.near = j.value("near", cam.near);
    cam.far = j.value("far", cam.far);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("camera JSON: ") + e.what());
  }
  cam.check();
  return cam;
}

std::string cameraToJson(const Camera &cam) {
  nlohmann::json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  j["width"] = cam.width;
  j["height"] = cam.height;
  j["rotation"] = cam.rotation;
  j["translation"] = cam.translation;
  j["near"] = cam.near;
  j["far"] = cam.far;
  return j.dump(2);
}

Camera loadCamera(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open camera file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return cameraFromJson(ss.str());
}

ImageBuffer::ImageBuffer(int w, int h, std::array<float, 3> fill) : width(w), height(h) {
  pixels.resize(std::size_t(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) std::copy(fill.begin(), fill.end(), pixels.begin() + i);
}

PngImage toPng(const ImageBuffer &image) {
  PngImage png;
  png.width = image.width;
  png.height = image.height;
  png.channels = 3;
  png.bitDepth = 8;
  png.samples.resize(image.pixels.size());
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const float v = std::isfinite(image.pixels[i]) ? std::clamp(image.pixels[i], 0.0f, 1.0f) : 0.0f;
    png.samples[i] = static_cast<uint16_t>(std::lround(v * 255.0f));
  }
  return png;
}

ImageBuffer fromPng(const PngImage &png) {
  ImageBuffer image(png.width, png.height);
  const double scale = png.bitDepth == 16 ? 65535.0 : 255.0;
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int src = png.channels >= 3 ? c : 0;
        image.at(x, y, c) = float(png.at(x, y, src) / scale);
      }
    }
  }
  return image;
}

ProjectedGaussian projectGaussian(const float *mean, const float *rotation, const float *logScales,
                                  const Camera &camera) {
  ProjectedGaussian out;
  const Vec3 p = camera.toCamera({mean[0], mean[1], mean[2]});
  out.depth = p[2];
  if (!(p[2] >= camera.near && p[2] <= camera.far)) return out;

  Eigen::Quaterniond q(rotation[0], rotation[1], rotation[2], rotation[3]);
  if (q.norm() == 0.0) return out;
  q.normalize();
  const Eigen::Matrix3d R = q.toRotationMatrix();
  const Eigen::Vector3d s(std::exp(double(logScales[0])), std::exp(double(logScales[1])),
                          std::exp(double(logScales[2])));
  const Eigen::Matrix3d M = R * s.asDiagonal();
  const Eigen::Matrix3d sigma = M * M.transpose();

  Eigen::Matrix3d W;
  W << camera.rotation[0], camera.rotation[1], camera.rotation[2], camera.rotation[3], camera.rotation[4],
      camera.rotation[5], camera.rotation[6], camera.rotation[7], camera.rotation[8];
  const double z = p[2];
  Eigen::Matrix<double, 2, 3> J;
  J << camera.fx / z, 0.0, -camera.fx * p[0] / (z * z), 0.0, camera.fy / z, -camera.fy * p[1] / (z * z);
  const Eigen::Matrix<double, 2, 3> T = J * W;
  const Eigen::Matrix2d cov = T * sigma * T.transpose();

  out.visible = true;
  out.mean[0] = camera.fx * p[0] / z + camera.cx;
  out.mean[1] = camera.fy * p[1] / z + camera.cy;
  out.cov[0] = cov(0, 0) + kDilation;
  out.cov[1] = 0.5 * (cov(0, 1) + cov(1, 0));
  out.cov[2] = cov(1, 1) + kDilation;
  return out;
}

std::array<double, 3> evalSh(int degree, const float *sh0, const float *shN, const std::array<double, 3> &dir) {
  static constexpr double kC0 = 0.28209479177387814;
  static constexpr double kC1 = 0.4886025119029199;
  static constexpr double kC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                                   -1.0925484305920792, 0.5462742152960396};
  static constexpr double kC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                                   0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                                   -0.5900435899266435};
  const double x = dir[0], y = dir[1], z = dir[2];
  double basis[15];
  int m = 0;
  if (degree >= 1) {
    basis[m++] = -kC1 * y;
    basis[m++] = kC1 * z;
    basis[m++] = -kC1 * x;
  }
  if (degree >= 2) {
    const double xx = x * x, yy = y * y, zz = z * z;
    basis[m++] = kC2[0] * x * y;
    basis[m++] = kC2[1] * y * z;
    basis[m++] = kC2[2] * (2.0 * zz - xx - yy);
    basis[m++] = kC2[3] * x * z;
    basis[m++] = kC2[4] * (xx - yy);
    if (degree >= 3) {
      basis[m++] = kC3[0] * y * (3.0 * xx - yy);
      basis[m++] = kC3[1] * x * y * z;
      basis[m++] = kC3[2] * y * (4.0 * zz - xx - yy);
      basis[m++] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
      basis[m++] = kC3[4] * x * (4.0 * zz - xx - yy);
      basis[m++] = kC3[5] * z * (xx - yy);
      basis[m++] = kC3[6] * x * (xx - 3.0 * yy);
    }
  }
  std::array<double, 3> rgb;
  for (int c = 0; c < 3; ++c) {
    double v = kC0 * sh0[c];
    for (int k = 0; k < m; ++k) v += basis[k] * shN[k * 3 + c];
    rgb[c] = std::clamp(v + 0.5, 0.0, 1.0);
  }
  return rgb;
}

ImageBuffer render(const GaussianCloud &cloud, const Camera &camera, std::array<float, 3> background,
                   RenderStats *stats) {
  camera.check();
  const std::size_t n = cloud.size();
  const int W = camera.width, H = camera.height;
  const Vec3 eye = camera.center();
  const int M = cloud.shCoeffs();
  const bool hasShN = M > 0 && cloud.shN.size() == n * std::size_t(M) * 3;

  std::vector<Splat> splats(n);
  parallelFor(0, n, 1024, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Splat &s = splats[i];
      const double opacity = 1.0 / (1.0 + std::exp(-double(cloud.opacityLogits[i])));
      if (!(opacity >= kMinAlpha)) continue;
      const ProjectedGaussian g =
          projectGaussian(&cloud.means[i * 3], &cloud.rotations[i * 4], &cloud.logScales[i * 3], camera);
      if (!g.visible) continue;
      const double det = g.cov[0] * g.cov[2] - g.cov[1] * g.cov[1];
      if (!(det > 0.0) || !std::isfinite(det)) continue;
      // Pixels farther than this Mahalanobis radius have alpha below the cull
      // threshold; the box bounds that ellipse exactly.
      const double q = 2.0 * std::log(opacity / kMinAlpha);
      const double ex = std::sqrt(q * g.cov[0]), ey = std::sqrt(q * g.cov[2]);
      const double fx0 = std::ceil(g.mean[0] - ex), fx1 = std::floor(g.mean[0] + ex);
      const double fy0 = std::ceil(g.mean[1] - ey), fy1 = std::floor(g.mean[1] + ey);
      if (fx1 < 0.0 || fy1 < 0.0 || fx0 > W - 1 || fy0 > H - 1 || fx0 > fx1 || fy0 > fy1) continue;
      s.x0 = int(std::max(0.0, fx0));
      s.x1 = int(std::min(double(W - 1), fx1));
      s.y0 = int(std::max(0.0, fy0));
      s.y1 = int(std::min(double(H - 1), fy1));
      s.mean[0] = g.mean[0];
      s.mean[1] = g.mean[1];
      s.conic[0] = g.cov[2] / det;
      s.conic[1] = -g.cov[1] / det;
      s.conic[2] = g.cov[0] / det;
      s.opacity = opacity;
      s.depth = g.depth;
      const Vec3 dir = normalized({cloud.means[i * 3] - eye[0], cloud.means[i * 3 + 1] - eye[1],
                                   cloud.means[i * 3 + 2] - eye[2]});
      s.color = evalSh(hasShN ? cloud.shDegree : 0, &cloud.sh0[i * 3], hasShN ? &cloud.shN[i * M * 3] : nullptr, dir);
      s.live = true;
    }
  });

  std::vector<uint32_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (splats[i].live) order.push_back(static_cast<uint32_t>(i));
  }
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (splats[a].depth != splats[b].depth) return splats[a].depth < splats[b].depth;
    return a < b;
  });

  const int tilesX = (W + kTile - 1) / kTile, tilesY = (H + kTile - 1) / kTile;
  std::vector<std::vector<uint32_t>> tiles(std::size_t(tilesX) * tilesY);
  for (uint32_t i : order) {
    const Splat &s = splats[i];
    for (int ty = s.y0 / kTile; ty <= s.y1 / kTile; ++ty) {
      for (int tx = s.x0 / kTile; tx <= s.x1 / kTile; ++tx) tiles[std::size_t(ty) * tilesX + tx].push_back(i);
    }
  }

  ImageBuffer image(W, H);
  if (stats) {
    stats->visible = order.size();
    stats->weightSum.assign(std::size_t(W) * H, 0.0);
  }
  parallelFor(0, tiles.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const int tx = int(t % tilesX), ty = int(t / tilesX);
      const auto &list = tiles[t];
      for (int y = ty * kTile; y < std::min(H, (ty + 1) * kTile); ++y) {
        for (int x = tx * kTile; x < std::min(W, (tx + 1) * kTile); ++x) {
          double transmittance = 1.0, weights = 0.0;
          double rgb[3] = {0.0, 0.0, 0.0};
          for (uint32_t i : list) {
            const Splat &s = splats[i];
            if (x < s.x0 || x > s.x1 || y < s.y0 || y > s.y1) continue;
            const double dx = x - s.mean[0], dy = y - s.mean[1];
            const double power = -0.5 * (s.conic[0] * dx * dx + 2.0 * s.conic[1] * dx * dy + s.conic[2] * dy * dy);
            const double alpha = std::min(kMaxAlpha, s.opacity * std::exp(power));
            if (alpha < kMinAlpha) continue;
            const double w = alpha * transmittance;
            for (int c = 0; c < 3; ++c) rgb[c] += w * s.color[c];
            weights += w;
            transmittance *= 1.0 - alpha;
          }
          for (int c = 0; c < 3; ++c) image.at(x, y, c) = float(rgb[c] + transmittance * background[c]);
          if (stats) stats->weightSum[std::size_t(y) * W + x] = weights + transmittance;
        }
      }
    }
  });
  return image;
}

ImageBuffer renderAtTime(const DynamicGaussianCloud &cloud, const Camera &camera, double t,
                         std::array<float, 3> background) {
  return render(sliceAtTime(cloud, t), camera, background);
}

std::vector<Camera> orbitCameras(const GaussianCloud &cloud, int count, int width, int height, double fovY) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one camera");
  Vec3 lo = {INFINITY, INFINITY, INFINITY}, hi = {-INFINITY, -INFINITY, -INFINITY};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], double(cloud.means[i * 3 + a]));
      hi[a] = std::max(hi[a], double(cloud.means[i * 3 + a]));
    }
  }
  if (cloud.empty()) lo = hi = {0, 0, 0};
  const Vec3 center = {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
  const double half = 0.5 * std::sqrt((hi[0] - lo[0]) * (hi[0] - lo[0]) + (hi[1] - lo[1]) * (hi[1] - lo[1]) +
                                      (hi[2] - lo[2]) * (hi[2] - lo[2]));
  const double radius = std::max(1e-3, half / std::tan(0.5 * fovY) * 1.1);
  std::vector<Camera> cams;
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * M_PI * k / count;
    const Vec3 eye = {center[0] + radius * std::cos(a), center[1] - 0.35 * radius, center[2] + radius * std::sin(a)};
    Camera cam = Camera::lookAt(eye, center, {0.0, -1.0, 0.0}, fovY, width, height);
    cam.near = std::max(1e-4, 0.01 * radius);
    cam.far = 10.0 * radius + 10.0;
    cams.push_back(cam);
  }
  return cams;
}

}  // namespace gsc
