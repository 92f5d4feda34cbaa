#include "gscodec/synthetic.h"

#include <cmath>
#include <random>

#include "gscodec/dynamic.h"
#include "gscodec/error.h"
#include "random_util.h"

namespace gsc {

namespace {

double gaussian(std::mt19937_64 &rng) {
  // Box-Muller on the portable uniform so streams match across standard libraries.
  const double u1 = 1.0 - uniform01(rng), u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double uniform(std::mt19937_64 &rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

void randomQuaternion(std::mt19937_64 &rng, float *q) {
  double v[4], n = 0.0;
  do {
    n = 0.0;
    for (double &x : v) {
      x = gaussian(rng);
      n += x * x;
    }
  } while (n < 1e-12);
  n = std::sqrt(n);
  const double sign = v[0] < 0 ? -1.0 : 1.0;
  for (int k = 0; k < 4; ++k) q[k] = float(sign * v[k] / n);
}

// Quaternion (w, x, y, z) whose local z axis maps onto the unit normal.
void alignToNormal(const double *nrm, float *q) {
  const double z[3] = {0.0, 0.0, 1.0};
  const double d = z[0] * nrm[0] + z[1] * nrm[1] + z[2] * nrm[2];
  double axis[3] = {z[1] * nrm[2] - z[2] * nrm[1], z[2] * nrm[0] - z[0] * nrm[2], z[0] * nrm[1] - z[1] * nrm[0]};
  double w = 1.0 + d;
  if (w < 1e-9) {
    w = 0.0;
    axis[0] = 1.0;
    axis[1] = axis[2] = 0.0;
  }
  const double n = std::sqrt(w * w + axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  q[0] = float(w / n);
  q[1] = float(axis[0] / n);
  q[2] = float(axis[1] / n);
  q[3] = float(axis[2] / n);
}

}  // namespace

GaussianCloud randomCloud(std::size_t n, int shDegree, uint64_t seed, int featureDim) {
  std::mt19937_64 rng(seed);
  GaussianCloud c = GaussianCloud::zeros(n, shDegree, featureDim);
  const int M = c.shCoeffs();
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) c.means[i * 3 + a] = float(uniform(rng, -1.0, 1.0));
    randomQuaternion(rng, &c.rotations[i * 4]);
    for (int a = 0; a < 3; ++a) c.logScales[i * 3 + a] = float(uniform(rng, -5.0, -2.0));
    c.opacityLogits[i] = float(2.0 * gaussian(rng));
    for (int a = 0; a < 3; ++a) c.sh0[i * 3 + a] = float(0.8 * gaussian(rng));
    for (int k = 0; k < M * 3; ++k) c.shN[i * M * 3 + k] = float(0.1 * gaussian(rng));
    for (int k = 0; k < featureDim; ++k) c.features[i * featureDim + k] = float(gaussian(rng));
  }
  return c;
}

GaussianCloud clusteredCloud(std::size_t n, int clusters, int shDegree, uint64_t seed) {
  if (clusters < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one cluster");
  std::mt19937_64 rng(seed);
  struct Cluster {
    double center[3], color[3], scale, logit, spread;
  };
  std::vector<Cluster> cs(clusters);
  for (Cluster &k : cs) {
    for (double &v : k.center) v = uniform(rng, -1.0, 1.0);
    for (double &v : k.color) v = uniform(rng, -1.5, 1.5);
    k.scale = uniform(rng, -5.0, -2.5);
    k.logit = uniform(rng, -1.0, 3.0);
    k.spread = uniform(rng, 0.03, 0.12);
  }
  GaussianCloud c = GaussianCloud::zeros(n, shDegree);
  const int M = c.shCoeffs();
  for (std::size_t i = 0; i < n; ++i) {
    const Cluster &k = cs[uniformIndex(rng, clusters)];
    for (int a = 0; a < 3; ++a) c.means[i * 3 + a] = float(k.center[a] + k.spread * gaussian(rng));
    randomQuaternion(rng, &c.rotations[i * 4]);
    for (int a = 0; a < 3; ++a) c.logScales[i * 3 + a] = float(k.scale + 0.1 * gaussian(rng));
    c.opacityLogits[i] = float(k.logit + 0.1 * gaussian(rng));
    for (int a = 0; a < 3; ++a) c.sh0[i * 3 + a] = float(k.color[a] + 0.03 * gaussian(rng));
    for (int j = 0; j < M * 3; ++j) c.shN[i * M * 3 + j] = float(0.02 * gaussian(rng));
  }
  return c;
}

GaussianCloud proceduralScene(std::size_t n, int shDegree, uint64_t seed) {
  std::mt19937_64 rng(seed);
  GaussianCloud c = GaussianCloud::zeros(n, shDegree);
  const int M = c.shCoeffs();
  for (std::size_t i = 0; i < n; ++i) {
    double p[3], nrm[3];
    const double pick = uniform01(rng);
    if (pick < 0.4) {  // sphere of radius 0.6 at the origin
      double v[3], len = 0.0;
      do {
        len = 0.0;
        for (double &x : v) {
          x = gaussian(rng);
          len += x * x;
        }
      } while (len < 1e-12);
      len = std::sqrt(len);
      for (int a = 0; a < 3; ++a) {
        nrm[a] = v[a] / len;
        p[a] = 0.6 * nrm[a];
      }
    } else if (pick < 0.75) {  // ground plane y = 0.7 (y points down in view)
      p[0] = uniform(rng, -2.0, 2.0);
      p[1] = 0.7;
      p[2] = uniform(rng, -2.0, 2.0);
      nrm[0] = 0.0;
      nrm[1] = -1.0;
      nrm[2] = 0.0;
    } else {  // two axis-aligned boxes
      const bool first = uniform01(rng) < 0.5;
      const double cx = first ? 1.1 : -1.1, cz = first ? 0.4 : -0.6, h = first ? 0.35 : 0.25;
      const int face = int(uniformIndex(rng, 6));
      const int axis = face / 2;
      const double side = face % 2 ? 1.0 : -1.0;
      const double ctr[3] = {cx, 0.7 - h, cz};
      for (int a = 0; a < 3; ++a) {
        p[a] = ctr[a] + (a == axis ? side * h : uniform(rng, -h, h));
        nrm[a] = a == axis ? side : 0.0;
      }
    }
    for (int a = 0; a < 3; ++a) c.means[i * 3 + a] = float(p[a] + 0.002 * gaussian(rng));
    alignToNormal(nrm, &c.rotations[i * 4]);
    const double tangent = std::log(0.012 + 0.01 * uniform01(rng));
    c.logScales[i * 3 + 0] = float(tangent);
    c.logScales[i * 3 + 1] = float(tangent + 0.2 * gaussian(rng));
    c.logScales[i * 3 + 2] = float(std::log(0.002));
    c.opacityLogits[i] = float(2.5 + 0.5 * gaussian(rng));
    const double r = 0.9 * std::sin(2.1 * p[0] + 0.3) + 0.4 * std::cos(3.0 * p[2]);
    const double g = 0.8 * std::cos(1.7 * p[1] - 0.5 * p[0]) - 0.2;
    const double b = 0.7 * std::sin(2.5 * p[2] + 1.1 * p[1]);
    c.sh0[i * 3 + 0] = float(r + 0.05 * gaussian(rng));
    c.sh0[i * 3 + 1] = float(g + 0.05 * gaussian(rng));
    c.sh0[i * 3 + 2] = float(b + 0.05 * gaussian(rng));
    for (int j = 0; j < M * 3; ++j) c.shN[i * M * 3 + j] = float(0.05 * std::sin(3.0 * p[j % 3] + j) + 0.01 * gaussian(rng));
  }
  return c;
}

SyntheticMotion syntheticMotion(std::size_t n, int frameCount, double staticFraction, int shDegree, uint64_t seed,
                                float fps) {
  if (frameCount < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one frame");
  SyntheticMotion m;
  m.appearance = proceduralScene(n, shDegree, seed);
  m.frameCount = frameCount;
  m.fps = fps;
  m.moving.assign(n, 0);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  struct Path {
    double amp[3], freq[3], phase[3];
  };
  std::vector<Path> paths(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.moving[i] = uniform01(rng) >= staticFraction ? 1 : 0;
    for (int a = 0; a < 3; ++a) {
      paths[i].amp[a] = uniform(rng, 0.05, 0.2);
      paths[i].freq[a] = uniform(rng, 0.5, 1.5);
      paths[i].phase[a] = uniform(rng, 0.0, 2.0 * M_PI);
    }
  }
  m.framePositions.resize(std::size_t(frameCount) * n * 3);
  for (int f = 0; f < frameCount; ++f) {
    const double s = frameCount > 1 ? double(f) / (frameCount - 1) : 0.0;  // sequence time in [0, 1]
    for (std::size_t i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) {
        double v = m.appearance.means[i * 3 + a];
        if (m.moving[i]) {
          const Path &p = paths[i];
          v += p.amp[a] * (std::sin(2.0 * M_PI * p.freq[a] * s + p.phase[a]) - std::sin(p.phase[a]));
        }
        m.framePositions[(std::size_t(f) * n + i) * 3 + a] = v;
      }
    }
  }
  return m;
}

DynamicSequence sequenceFromFrames(const GaussianCloud &appearance, const std::vector<double> &framePositions,
                                   int frameCount, float fps, int gofLen, int degree) {
  DynamicSequence seq;
  seq.frameCount = frameCount;
  seq.fps = fps;
  seq.segments = segmentGof(frameCount, gofLen);
  for (const GofSegment &seg : seq.segments) {
    seq.gofs.push_back(fitSegment(appearance, framePositions, appearance.size(), seg, degree));
  }
  return seq;
}

DynamicSequence sequenceFromMotion(const SyntheticMotion &motion, int gofLen, int degree) {
  return sequenceFromFrames(motion.appearance, motion.framePositions, motion.frameCount, motion.fps, gofLen, degree);
}

}  // namespace gsc
