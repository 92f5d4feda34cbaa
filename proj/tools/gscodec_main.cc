// gscodec: command-line front end for the Gaussian splat codec.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gscodec/config.h"
#include "gscodec/container.h"
#include "gscodec/dynamic.h"
#include "gscodec/error.h"
#include "gscodec/metrics.h"
#include "gscodec/parallel.h"
#include "gscodec/ply.h"
#include "gscodec/png.h"
#include "gscodec/rd_sweep.h"
#include "gscodec/render.h"
#include "gscodec/synthetic.h"

namespace fs = std::filesystem;

namespace {

std::string readText(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw gsc::Error(gsc::ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool isContainer(const std::vector<uint8_t> &bytes) {
  return bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, gsc::kContainerMagic);
}

std::vector<fs::path> sortedFiles(const fs::path &dir, const std::string &prefix, const std::string &ext) {
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind(prefix, 0) == 0 && e.path().extension() == ext) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// A dynamic input is a directory of per-GOF dynamic PLYs (gof_*.ply) or of
// per-frame static PLYs (frame_*.ply) that share point order.
gsc::DynamicSequence loadSequence(const fs::path &path, float fps, int gofLen, int degree) {
  gsc::DynamicSequence seq;
  seq.fps = fps;
  if (fs::is_regular_file(path)) {
    gsc::GofSegment seg;
    seq.gofs.push_back(gsc::loadDynamicPly(gsc::readFile(path.string()), &seg));
    seq.segments.push_back(seg);
    seq.frameCount = seg.frameEnd;
    return seq;
  }
  std::vector<fs::path> gofs = sortedFiles(path, "gof_", ".ply");
  if (!gofs.empty()) {
    for (const auto &f : gofs) {
      gsc::GofSegment seg;
      seq.gofs.push_back(gsc::loadDynamicPly(gsc::readFile(f.string()), &seg));
      seq.segments.push_back(seg);
      seq.frameCount = std::max(seq.frameCount, seg.frameEnd);
    }
    return seq;
  }
  std::vector<fs::path> frames = sortedFiles(path, "frame_", ".ply");
  if (frames.empty()) {
    throw gsc::Error(gsc::ErrorCode::kIo, "'" + path.string() + "' holds neither gof_*.ply nor frame_*.ply files");
  }
  gsc::GaussianCloud appearance = gsc::loadPly(gsc::readFile(frames[0].string()));
  const std::size_t n = appearance.size();
  std::vector<double> positions(frames.size() * n * 3);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    gsc::GaussianCloud frame = f == 0 ? appearance : gsc::loadPly(gsc::readFile(frames[f].string()));
    if (frame.size() != n) {
      throw gsc::Error(gsc::ErrorCode::kDimensionMismatch, "frame '" + frames[f].string() + "' has a different point count");
    }
    for (std::size_t k = 0; k < n * 3; ++k) positions[f * n * 3 + k] = frame.means[k];
  }
  return gsc::sequenceFromFrames(appearance, positions, static_cast<int>(frames.size()), fps, gofLen, degree);
}

void writeSequence(const gsc::DynamicSequence &seq, const fs::path &out) {
  if (out.extension() == ".ply" && seq.gofs.size() == 1) {
    gsc::writeFile(out.string(), gsc::saveDynamicPly(seq.gofs[0], seq.segments[0]));
    return;
  }
  fs::create_directories(out);
  for (std::size_t g = 0; g < seq.gofs.size(); ++g) {
    char name[32];
    std::snprintf(name, sizeof(name), "gof_%04zu.ply", g);
    gsc::writeFile((out / name).string(), gsc::saveDynamicPly(seq.gofs[g], seq.segments[g]));
  }
}

struct EncodeArgs {
  std::string input, output, preset = "static-gscodec", config, exportPlanes;
  std::string pruneOpacity, pruneScale, pruneOutliers, shMask, staticMask;
  float fps = 30.0f;
  int degree = 3;
};

int runEncode(const EncodeArgs &a) {
  gsc::EncodeConfig cfg = gsc::presetConfig(a.preset);
  if (!a.config.empty()) cfg = gsc::parseConfig(readText(a.config), cfg);
  auto set = [&](const char *key, const std::string &v) {
    if (!v.empty()) gsc::applyConfigValue(cfg, key, v);
  };
  set("prune.opacity", a.pruneOpacity);
  set("prune.scale", a.pruneScale);
  set("prune.outliers", a.pruneOutliers);
  set("mask.sh", a.shMask);
  set("mask.static", a.staticMask);

  const bool dynamic = cfg.preset == "dynamic-gscodec" || fs::is_directory(a.input);
  gsc::EncodeResult result;
  if (dynamic) {
    result = gsc::encodeDynamic(loadSequence(a.input, a.fps, cfg.gofLength, a.degree), cfg);
  } else {
    result = gsc::encodeStatic(gsc::loadPly(gsc::readFile(a.input)), cfg);
  }
  gsc::writeFile(a.output, result.bytes);
  std::size_t points = 0;
  for (const auto &g : result.gofs) points += g.order.size();
  std::fprintf(stderr, "encoded %zu points in %zu GOF(s): %zu bytes\n", points, result.gofs.size(),
               result.bytes.size());
  if (!a.exportPlanes.empty()) {
    for (const auto &f : gsc::exportPlanes(result.bytes, a.exportPlanes)) std::fprintf(stderr, "wrote %s\n", f.c_str());
  }
  return 0;
}

int runDecode(const std::string &input, const std::string &output) {
  const std::vector<uint8_t> bytes = gsc::readFile(input);
  const gsc::ContainerInfo info = gsc::readContainerInfo(bytes);
  if (info.flavor == gsc::Flavor::kStatic) {
    gsc::writeFile(output, gsc::savePly(gsc::decodeStatic(bytes)));
  } else {
    writeSequence(gsc::decodeDynamic(bytes), output);
  }
  return 0;
}

int runInspect(const std::string &input, const std::string &format) {
  const gsc::MemoryBreakdownReport report = gsc::inspect(gsc::readFile(input));
  std::cout << (format == "csv" ? report.toCsv() : report.toTable());
  return 0;
}

struct RenderArgs {
  std::string input, camera, output;
  double time = 0.0;
  std::vector<float> background = {0, 0, 0};
};

int runRender(const RenderArgs &a) {
  const gsc::Camera cam = gsc::loadCamera(a.camera);
  const std::array<float, 3> bg = {a.background[0], a.background[1], a.background[2]};
  const std::vector<uint8_t> bytes = gsc::readFile(a.input);
  gsc::ImageBuffer image;
  if (!isContainer(bytes)) {
    image = gsc::render(gsc::loadPly(bytes), cam, bg);
  } else {
    const gsc::ContainerInfo info = gsc::readContainerInfo(bytes);
    if (info.flavor == gsc::Flavor::kStatic) {
      image = gsc::render(gsc::decodeStatic(bytes), cam, bg);
    } else {
      // Seconds to frame, then to the owning GOF's normalized time.
      const int frame = std::clamp(int(std::floor(a.time * info.fps + 0.5)), 0, int(info.frameCount) - 1);
      for (const gsc::GofInfo &g : info.gofs) {
        if (frame < int(g.frameStart) || frame >= int(g.frameEnd)) continue;
        gsc::GofSegment seg{int(g.index), int(g.frameStart), int(g.frameEnd)};
        image = gsc::renderAtTime(gsc::decodeGof(bytes, g.index), cam, seg.frameTime(frame), bg);
      }
      if (image.pixels.empty()) throw gsc::Error(gsc::ErrorCode::kOutOfRange, "no GOF covers the requested time");
    }
  }
  gsc::writeFile(a.output, gsc::encodePng(gsc::toPng(image)));
  return 0;
}

int runEval(const std::string &refDir, const std::string &testDir, const std::string &format) {
  std::vector<fs::path> refs = sortedFiles(refDir, "", ".png");
  if (refs.empty()) throw gsc::Error(gsc::ErrorCode::kIo, "no PNG images in '" + refDir + "'");
  struct Row {
    std::string name;
    double psnr, ssim;
  };
  std::vector<Row> rows;
  for (const auto &ref : refs) {
    const fs::path test = fs::path(testDir) / ref.filename();
    if (!fs::exists(test)) throw gsc::Error(gsc::ErrorCode::kIo, "missing test image '" + test.string() + "'");
    const gsc::ImageBuffer a = gsc::fromPng(gsc::decodePng(gsc::readFile(ref.string())));
    const gsc::ImageBuffer b = gsc::fromPng(gsc::decodePng(gsc::readFile(test.string())));
    rows.push_back({ref.filename().string(), gsc::psnr(a, b), gsc::ssim(a, b)});
  }
  double mp = 0.0, ms = 0.0;
  for (const Row &r : rows) {
    mp += r.psnr;
    ms += r.ssim;
  }
  mp /= rows.size();
  ms /= rows.size();
  std::fprintf(stderr, "note: metrics compare decoded renders with uncompressed renders (codec loss only)\n");
  if (format == "csv") {
    std::printf("image,psnr,ssim\n");
    for (const Row &r : rows) std::printf("%s,%.4f,%.6f\n", r.name.c_str(), r.psnr, r.ssim);
    std::printf("mean,%.4f,%.6f\n", mp, ms);
  } else {
    std::printf("%-32s %10s %10s\n", "image", "PSNR (dB)", "SSIM");
    for (const Row &r : rows) std::printf("%-32s %10.2f %10.4f\n", r.name.c_str(), r.psnr, r.ssim);
    std::printf("%-32s %10.2f %10.4f\n", "mean", mp, ms);
  }
  return 0;
}

struct SweepArgs {
  std::string configs, output, input;
  int views = 4, width = 320, height = 240;
  std::size_t synthetic = 50000;
  bool dynamic = false;
  int frames = 120;
};

int runSweep(const SweepArgs &a) {
  const std::vector<gsc::NamedConfig> configs = gsc::parseSweepConfigs(readText(a.configs));
  std::vector<gsc::RdRow> rows;
  if (a.dynamic) {
    const gsc::SyntheticMotion motion = gsc::syntheticMotion(a.synthetic, a.frames, 0.8, 1, 1);
    const auto cams = gsc::orbitCameras(motion.appearance, a.views, a.width, a.height);
    // Each config may pick its own GOF length.
    for (const auto &nc : configs) {
      const gsc::DynamicSequence seq = gsc::sequenceFromMotion(motion, nc.config.gofLength);
      auto r = gsc::rdSweep(seq, cams, {nc});
      rows.insert(rows.end(), r.begin(), r.end());
    }
  } else {
    const gsc::GaussianCloud cloud =
        a.input.empty() ? gsc::proceduralScene(a.synthetic, 2, 1) : gsc::loadPly(gsc::readFile(a.input));
    rows = gsc::rdSweep(cloud, gsc::orbitCameras(cloud, a.views, a.width, a.height), configs);
  }
  const std::string csv = gsc::rdCsv(rows);
  if (a.output.empty()) {
    std::cout << csv;
  } else {
    std::ofstream(a.output) << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Gaussian splat codec"};
  app.require_subcommand(1);
  int threads = 0;
  bool verbose = false;
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)");
  app.add_flag("-v,--verbose", verbose, "Log progress");

  EncodeArgs enc;
  auto *encode = app.add_subcommand("encode", "Compress a PLY (or a directory of PLYs) into a container");
  encode->add_option("input", enc.input, "Input .ply, or directory of gof_*.ply / frame_*.ply")->required();
  encode->add_option("output", enc.output, "Output container")->required();
  encode->add_option("--preset", enc.preset, "static-gscodec | dynamic-gscodec")
      ->check(CLI::IsMember({"static-gscodec", "dynamic-gscodec"}));
  encode->add_option("--config", enc.config, "key = value settings file");
  encode->add_option("--prune-opacity", enc.pruneOpacity, "Drop points with opacity below tau");
  encode->add_option("--prune-scale", enc.pruneScale, "min,max world-space scale");
  encode->add_option("--prune-outliers", enc.pruneOutliers, "k,m statistical outlier removal");
  encode->add_option("--sh-mask", enc.shMask, "Drop higher-order SH when its energy is below eps");
  encode->add_option("--static-mask", enc.staticMask, "eps[,samples]: drop motion of near-static points");
  encode->add_option("--export-planes", enc.exportPlanes, "Write every PNG plane into this directory");
  encode->add_option("--fps", enc.fps, "Frame rate of frame_*.ply input");
  encode->add_option("--degree", enc.degree, "Polynomial motion degree for frame_*.ply input");

  std::string decIn, decOut;
  auto *decode = app.add_subcommand("decode", "Decompress a container to PLY");
  decode->add_option("input", decIn)->required();
  decode->add_option("output", decOut, "PLY file, or directory for multi-GOF sequences")->required();

  std::string inspIn, inspFormat = "table";
  auto *insp = app.add_subcommand("inspect", "Per-attribute memory breakdown");
  insp->add_option("input", inspIn)->required();
  insp->add_option("--format", inspFormat)->check(CLI::IsMember({"csv", "table"}));

  RenderArgs ren;
  auto *rend = app.add_subcommand("render", "Render a container or PLY from a camera");
  rend->add_option("input", ren.input)->required();
  rend->add_option("--camera", ren.camera, "Camera JSON")->required();
  rend->add_option("--time", ren.time, "Seconds into a dynamic sequence");
  rend->add_option("--background", ren.background, "r g b in [0, 1]")->expected(3);
  rend->add_option("--out", ren.output, "Output PNG")->required();

  std::string evRef, evTest, evFormat = "csv";
  auto *ev = app.add_subcommand("eval", "PSNR/SSIM between matching PNGs of two directories");
  ev->add_option("--ref", evRef)->required();
  ev->add_option("--test", evTest)->required();
  ev->add_option("--format", evFormat)->check(CLI::IsMember({"csv", "table"}));

  SweepArgs sw;
  auto *sweep = app.add_subcommand("rd-sweep", "Rate-distortion sweep over named configs");
  sweep->add_option("input", sw.input, "Static PLY (default: procedural scene)");
  sweep->add_option("--configs", sw.configs, "Sweep file with [name] sections")->required();
  sweep->add_option("--out", sw.output, "CSV output (default: stdout)");
  sweep->add_option("--views", sw.views, "Orbit cameras");
  sweep->add_option("--width", sw.width);
  sweep->add_option("--height", sw.height);
  sweep->add_option("--points", sw.synthetic, "Synthetic scene size");
  sweep->add_flag("--dynamic", sw.dynamic, "Sweep a synthetic dynamic sequence");
  sweep->add_option("--frames", sw.frames, "Synthetic sequence length");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) gsc::setThreadCount(threads);
  if (verbose) gsc::setLogLevel(gsc::LogLevel::kInfo);

  try {
    if (*encode) return runEncode(enc);
    if (*decode) return runDecode(decIn, decOut);
    if (*insp) return runInspect(inspIn, inspFormat);
    if (*rend) return runRender(ren);
    if (*ev) return runEval(evRef, evTest, evFormat);
    if (*sweep) return runSweep(sw);
  } catch (const gsc::Error &e) {
    std::fprintf(stderr, "error [%s]%s%s: %s\n", std::string(gsc::errorCodeName(e.code())).c_str(),
                 e.stage().empty() ? "" : " in ", e.stage().c_str(), e.detail().c_str());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
