#include "gscodec/rd_sweep.h"

#include <cstdio>

#include "gscodec/container.h"
#include "gscodec/error.h"
#include "gscodec/metrics.h"

namespace gsc {

namespace {

struct Quality {
  double psnr = 0.0;
  double ssim = 0.0;
  int count = 0;

  void add(const ImageBuffer &ref, const ImageBuffer &test) {
    psnr += gsc::psnr(ref, test);
    ssim += gsc::ssim(ref, test);
    ++count;
  }
  void finish(RdRow &row) const {
    row.psnr = count ? psnr / count : kPsnrCap;
    row.ssim = count ? ssim / count : 1.0;
  }
};

std::vector<int> sampleFrames(const GofSegment &seg, int perGof) {
  const int n = seg.frameCount();
  std::vector<int> frames;
  if (n <= 0) return frames;
  const int k = std::max(1, std::min(perGof, n));
  for (int j = 0; j < k; ++j) {
    const int f = k == 1 ? 0 : int((long long)j * (n - 1) / (k - 1));
    if (frames.empty() || frames.back() != seg.frameStart + f) frames.push_back(seg.frameStart + f);
  }
  return frames;
}

}  // namespace

double megabytes(uint64_t bytes) { return double(bytes) / double(1u << 20); }

double megabitsPerSecond(uint64_t bytes, int frames, double fps) {
  if (frames <= 0 || !(fps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bitrate needs frames > 0 and fps > 0");
  return double(bytes) * 8.0 / (double(frames) / fps) / 1e6;
}

std::vector<RdRow> rdSweep(const GaussianCloud &cloud, const std::vector<Camera> &cameras,
                           const std::vector<NamedConfig> &configs, const RdSweepOptions &options) {
  if (cameras.empty()) throw Error(ErrorCode::kInvalidArgument, "RD sweep needs at least one camera");
  std::vector<ImageBuffer> refs;
  for (const Camera &cam : cameras) refs.push_back(render(cloud, cam, options.background));
  std::vector<RdRow> rows;
  for (const NamedConfig &nc : configs) {
    RdRow row;
    row.config = nc.name;
    try {
      const EncodeResult enc = encodeStatic(cloud, nc.config);
      const GaussianCloud decoded = decodeStatic(enc.bytes);
      row.bytes = enc.bytes.size();
      row.rate = megabytes(row.bytes);
      Quality q;
      for (std::size_t k = 0; k < cameras.size(); ++k) q.add(refs[k], render(decoded, cameras[k], options.background));
      q.finish(row);
    } catch (const Error &e) {
      throw e.withStage("rd-sweep/" + nc.name);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<RdRow> rdSweep(const DynamicSequence &sequence, const std::vector<Camera> &cameras,
                           const std::vector<NamedConfig> &configs, const RdSweepOptions &options) {
  if (cameras.empty()) throw Error(ErrorCode::kInvalidArgument, "RD sweep needs at least one camera");
  std::vector<RdRow> rows;
  for (const NamedConfig &nc : configs) {
    RdRow row;
    row.config = nc.name;
    try {
      const EncodeResult enc = encodeDynamic(sequence, nc.config);
      const DynamicSequence decoded = decodeDynamic(enc.bytes);
      row.bytes = enc.bytes.size();
      row.rate = megabitsPerSecond(row.bytes, sequence.frameCount, sequence.fps);
      Quality q;
      for (std::size_t g = 0; g < sequence.gofs.size(); ++g) {
        const GofSegment &seg = sequence.segments[g];
        for (int f : sampleFrames(seg, options.framesPerGof)) {
          const double t = seg.frameTime(f);
          for (const Camera &cam : cameras) {
            q.add(renderAtTime(sequence.gofs[g], cam, t, options.background),
                  renderAtTime(decoded.gofs[g], cam, t, options.background));
          }
        }
      }
      q.finish(row);
    } catch (const Error &e) {
      throw e.withStage("rd-sweep/" + nc.name);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string rdCsv(const std::vector<RdRow> &rows) {
  std::string out = "config,bytes,rate,psnr,ssim\n";
  char buf[256];
  for (const RdRow &r : rows) {
    std::snprintf(buf, sizeof(buf), ",%llu,%.6f,%.4f,%.6f\n", static_cast<unsigned long long>(r.bytes), r.rate,
                  r.psnr, r.ssim);
    out += r.config + buf;
  }
  return out;
}

}  // namespace gsc
