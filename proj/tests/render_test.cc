#include "gscodec/render.h"

#include <cmath>
#include <numeric>

#include "gscodec/dynamic.h"
#include "gscodec/parallel.h"
#include "gscodec/synthetic.h"
#include "test_util.h"

namespace gsc {
namespace {

using test::expectError;

constexpr double kC0 = 0.28209479177387814;

Camera axisCamera(int w = 64, int h = 48, double f = 50.0) {
  Camera cam;
  cam.fx = cam.fy = f;
  cam.width = w;
  cam.height = h;
  cam.cx = 0.5 * (w - 1);
  cam.cy = 0.5 * (h - 1);
  return cam;
}

GaussianCloud oneSplat(float x, float y, float z, float logScale, float logit, std::array<float, 3> sh0) {
  GaussianCloud c = GaussianCloud::zeros(1);
  c.means = {x, y, z};
  c.logScales = {logScale, logScale, logScale};
  c.opacityLogits = {logit};
  c.sh0 = {sh0[0], sh0[1], sh0[2]};
  return c;
}

GaussianCloud concat(const GaussianCloud &a, const GaussianCloud &b) {
  GaussianCloud c = a;
  auto app = [](std::vector<float> &dst, const std::vector<float> &src) { dst.insert(dst.end(), src.begin(), src.end()); };
  app(c.means, b.means);
  app(c.rotations, b.rotations);
  app(c.logScales, b.logScales);
  app(c.opacityLogits, b.opacityLogits);
  app(c.sh0, b.sh0);
  app(c.shN, b.shN);
  return c;
}

TEST(RenderTest, ProjectsOnAxisPointToPrincipalPoint) {
  const Camera cam = axisCamera();
  const float mean[3] = {0, 0, 2};
  const float rot[4] = {1, 0, 0, 0};
  const float ls[3] = {std::log(0.1f), std::log(0.1f), std::log(0.1f)};
  const ProjectedGaussian g = projectGaussian(mean, rot, ls, cam);
  ASSERT_TRUE(g.visible);
  EXPECT_DOUBLE_EQ(g.mean[0], cam.cx);
  EXPECT_DOUBLE_EQ(g.mean[1], cam.cy);
  EXPECT_DOUBLE_EQ(g.depth, 2.0);
  // Isotropic sigma s at depth z: (f s / z)^2 plus dilation.
  const double expect = std::pow(50.0 * std::exp(double(ls[0])) / 2.0, 2) + kDilation;
  EXPECT_NEAR(g.cov[0], expect, 1e-9);
  EXPECT_NEAR(g.cov[2], expect, 1e-9);
  EXPECT_NEAR(g.cov[1], 0.0, 1e-12);

  Camera wide = cam;
  wide.fx *= 2;
  const ProjectedGaussian g2 = projectGaussian(mean, rot, ls, wide);
  EXPECT_NEAR(g2.cov[0] - kDilation, 4.0 * (g.cov[0] - kDilation), 1e-9);
  EXPECT_NEAR(g2.cov[2], g.cov[2], 1e-12);

  const float behind[3] = {0, 0, -1};
  EXPECT_FALSE(projectGaussian(behind, rot, ls, cam).visible);
}

TEST(RenderTest, ProjectedCovarianceIsDilated) {
  const GaussianCloud c = randomCloud(500, 0, 3);
  const Camera cam = Camera::lookAt({0, 0, -4}, {0, 0, 0}, {0, -1, 0}, 0.9, 64, 64);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const ProjectedGaussian g = projectGaussian(&c.means[i * 3], &c.rotations[i * 4], &c.logScales[i * 3], cam);
    if (!g.visible) continue;
    const double tr = g.cov[0] + g.cov[2], det = g.cov[0] * g.cov[2] - g.cov[1] * g.cov[1];
    const double lmin = 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    EXPECT_GE(lmin, kDilation * (1 - 1e-9));
  }
}

TEST(RenderTest, EmptyCloudRendersBackground) {
  const ImageBuffer img = render(GaussianCloud{}, axisCamera(), {0.1f, 0.2f, 0.3f});
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      EXPECT_FLOAT_EQ(img.at(x, y, 0), 0.1f);
      EXPECT_FLOAT_EQ(img.at(x, y, 2), 0.3f);
    }
  }
}

TEST(RenderTest, TwoSplatCompositingMatchesClosedForm) {
  const Camera cam = axisCamera(33, 33);
  const GaussianCloud front = oneSplat(0, 0, 2, std::log(0.05f), 0.0f, {1.0f, 0.0f, 0.0f});
  const GaussianCloud back = oneSplat(0, 0, 3, std::log(0.05f), 1.0f, {0.0f, 1.0f, 0.0f});
  const std::array<float, 3> bg = {0.2f, 0.2f, 0.9f};
  RenderStats stats;
  // Back splat first in memory: depth order must decide.
  const ImageBuffer img = render(concat(back, front), cam, bg, &stats);
  EXPECT_EQ(stats.visible, 2u);
  const double a1 = 0.5, a2 = 1.0 / (1.0 + std::exp(-1.0));
  const double c1[3] = {kC0 * 1.0 + 0.5, 0.5, 0.5}, c2[3] = {0.5, kC0 + 0.5, 0.5};
  for (int c = 0; c < 3; ++c) {
    const double expect = a1 * c1[c] + (1 - a1) * a2 * c2[c] + (1 - a1) * (1 - a2) * bg[c];
    EXPECT_NEAR(img.at(16, 16, c), expect, 1e-6) << c;
  }
}

TEST(RenderTest, OpaqueSplatCoversCenter) {
  const Camera cam = axisCamera(33, 33);
  const ImageBuffer img = render(oneSplat(0, 0, 2, std::log(0.2f), 20.0f, {0, 0, 0}), cam, {1, 1, 1});
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(img.at(16, 16, c), kMaxAlpha * 0.5 + (1 - kMaxAlpha), 1e-6);
}

TEST(RenderTest, ShDegreeZeroAndParity) {
  const float sh0[3] = {0, 0, 0};
  const auto rgb = evalSh(0, sh0, nullptr, {0, 0, 1});
  for (double v : rgb) EXPECT_DOUBLE_EQ(v, 0.5);
  // Degree-1 terms are odd in the direction.
  std::vector<float> shN(3 * 3, 0.0f);
  shN[0] = 0.3f;
  shN[4] = -0.2f;
  const float zero[3] = {0, 0, 0};
  const auto p = evalSh(1, zero, shN.data(), {0.6, 0.0, 0.8});
  const auto m = evalSh(1, zero, shN.data(), {-0.6, 0.0, -0.8});
  for (int c = 0; c < 3; ++c) EXPECT_NEAR((p[c] - 0.5) + (m[c] - 0.5), 0.0, 1e-12);
}

TEST(RenderTest, WeightsSumToOne) {
  const GaussianCloud c = proceduralScene(3000, 1, 4);
  const Camera cam = orbitCameras(c, 1, 48, 40)[0];
  RenderStats stats;
  render(c, cam, {0, 0, 0}, &stats);
  ASSERT_EQ(stats.weightSum.size(), 48u * 40u);
  for (double w : stats.weightSum) EXPECT_NEAR(w, 1.0, 1e-6);
}

TEST(RenderTest, PermutationInvariantAndThreadDeterministic) {
  const GaussianCloud c = proceduralScene(4000, 2, 5);
  const Camera cam = orbitCameras(c, 3, 64, 48)[1];
  setThreadCount(1);
  const ImageBuffer a = render(c, cam);
  setThreadCount(4);
  const ImageBuffer b = render(c, cam);
  setThreadCount(0);
  EXPECT_EQ(a.pixels, b.pixels);

  std::vector<uint32_t> perm(c.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::reverse(perm.begin(), perm.end());
  const ImageBuffer r = render(c.select(perm), cam);
  EXPECT_EQ(a.pixels, r.pixels);
}

TEST(RenderTest, CameraJsonRoundTrip) {
  const Camera cam = Camera::lookAt({1, 2, -3}, {0, 0, 0}, {0, -1, 0}, 0.8, 100, 60);
  const Camera back = cameraFromJson(cameraToJson(cam));
  EXPECT_EQ(back.rotation, cam.rotation);
  EXPECT_EQ(back.translation, cam.translation);
  EXPECT_EQ(back.width, 100);
  const auto ctr = back.center();
  EXPECT_NEAR(ctr[0], 1, 1e-12);
  EXPECT_NEAR(ctr[2], -3, 1e-12);
  const auto p = back.toCamera({0, 0, 0});
  EXPECT_NEAR(p[0], 0, 1e-12);
  EXPECT_GT(p[2], 0);
  expectError(ErrorCode::kInvalidArgument, [] { cameraFromJson("{\"fx\": 1}"); });
  expectError(ErrorCode::kInvalidArgument, [] { cameraFromJson("not json"); });
}

TEST(RenderTest, PngConversionRounds) {
  ImageBuffer img(2, 1);
  img.pixels = {0.0f, 0.5f, 1.5f, -1.0f, 0.2f, 1.0f};
  const PngImage png = toPng(img);
  EXPECT_EQ(png.samples, (std::vector<uint16_t>{0, 128, 255, 0, 51, 255}));
}

// The renderer sees the same cloud whether it slices first or is handed the
// dynamic cloud directly.
TEST(RenderTest, TwoPathRenderAtTimeIsBitExact) {
  const SyntheticMotion m = syntheticMotion(2000, 10, 0.5, 1, 8);
  const DynamicSequence seq = sequenceFromMotion(m, 10, 3);
  const Camera cam = orbitCameras(m.appearance, 2, 48, 48)[0];
  for (double t : {0.0, 0.37, 1.0}) {
    const ImageBuffer a = renderAtTime(seq.gofs[0], cam, t);
    const ImageBuffer b = render(sliceAtTime(seq.gofs[0], t), cam);
    EXPECT_EQ(a.pixels, b.pixels) << t;
  }
}

}  // namespace
}  // namespace gsc
