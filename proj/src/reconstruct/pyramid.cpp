#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "bos/filters.hpp"
#include "bos/log.hpp"
#include "bos/reconstruct.hpp"
#include "bos/simulate.hpp"

namespace bos {

FlowEngine parse_flow_engine(std::string_view name) {
  if (name == "horn_schunck" || name == "hs") return FlowEngine::horn_schunck;
  if (name == "farneback" || name == "fb") return FlowEngine::farneback;
  throw InvalidArgument("unknown flow engine '" + std::string(name) +
                        "' (expected horn_schunck or farneback)");
}

FlowConfig FlowConfig::horn_schunck_defaults() {
  FlowConfig cfg;
  cfg.engine = FlowEngine::horn_schunck;
  cfg.iterations = 100;
  return cfg;
}

FlowConfig FlowConfig::farneback_defaults() {
  FlowConfig cfg;
  cfg.engine = FlowEngine::farneback;
  cfg.iterations = 3;
  return cfg;
}

void FlowConfig::validate() const {
  if (levels < 1) throw InvalidArgument("pyramid levels must be >= 1");
  if (!(scale > 0.0 && scale < 1.0)) throw InvalidArgument("pyramid scale must lie in (0, 1)");
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (!(alpha > 0.0)) throw InvalidArgument("smoothness weight alpha must be > 0");
  if (poly_n < 1) throw InvalidArgument("poly_n must be >= 1");
  if (!(poly_sigma > 0.0)) throw InvalidArgument("poly_sigma must be > 0");
  if (window < 1) throw InvalidArgument("averaging window must be >= 1");
}

DisplacementField upsample_field(const DisplacementField& coarse, int width, int height,
                                 double factor) {
  DisplacementField fine(width, height);
  const double sx = static_cast<double>(coarse.width()) / width;
  const double sy = static_cast<double>(coarse.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double cy = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < width; ++x) {
      const double cx = (x + 0.5) * sx - 0.5;
      fine.u(x, y) = static_cast<float>(factor * sample_bilinear(coarse.u, cx, cy));
      fine.v(x, y) = static_cast<float>(factor * sample_bilinear(coarse.v, cx, cy));
    }
  }
  return fine;
}

namespace {

constexpr int kMinLevelSize = 16;

DisplacementField solve_level(FlowEngine engine, const GrayImage& reference,
                              const GrayImage& target, const FlowConfig& cfg) {
  return engine == FlowEngine::horn_schunck ? horn_schunck_level(reference, target, cfg)
                                            : farneback_level(reference, target, cfg);
}

std::vector<GrayImage> build_pyramid(const GrayImage& img, int levels, double scale) {
  std::vector<GrayImage> pyr{img};
  for (int k = 1; k < levels; ++k) {
    const GrayImage& prev = pyr.back();
    const int w = std::max(1, static_cast<int>(std::lround(prev.width() * scale)));
    const int h = std::max(1, static_cast<int>(std::lround(prev.height() * scale)));
    pyr.emplace_back(resize_bilinear(gaussian_blur(static_cast<const Plane<float>&>(prev), 1.0), w, h));
  }
  return pyr;
}

}  // namespace

DisplacementField pyramid_flow(FlowEngine engine, const GrayImage& reference,
                               const GrayImage& target, const FlowConfig& cfg) {
  if (!reference.same_shape(target)) {
    throw DimensionMismatch("optical flow frames differ in size");
  }
  cfg.validate();

  int levels = cfg.levels;
  const int min_side = std::min(reference.width(), reference.height());
  while (levels > 1 && min_side * std::pow(cfg.scale, levels - 1) < kMinLevelSize) {
    --levels;
  }
  if (levels != cfg.levels) {
    std::ostringstream msg;
    msg << "coarsest pyramid level would be under " << kMinLevelSize << " px; using " << levels
        << " of " << cfg.levels << " levels";
    warn(msg.str());
  }

  const std::vector<GrayImage> ref_pyr = build_pyramid(reference, levels, cfg.scale);
  const std::vector<GrayImage> tgt_pyr = build_pyramid(target, levels, cfg.scale);

  DisplacementField flow = solve_level(engine, ref_pyr.back(), tgt_pyr.back(), cfg);
  for (int k = levels - 2; k >= 0; --k) {
    const GrayImage& ref = ref_pyr[static_cast<std::size_t>(k)];
    const GrayImage& tgt = tgt_pyr[static_cast<std::size_t>(k)];
    flow = upsample_field(flow, ref.width(), ref.height(), 1.0 / cfg.scale);

    // Align the target with the reference: aligned(x) = target(x + d(x)).
    DisplacementField backward = flow;
    for (float& c : backward.u.pixels()) c = -c;
    for (float& c : backward.v.pixels()) c = -c;
    const DisplacementField increment = solve_level(engine, ref, warp_image(tgt, backward), cfg);

    for (std::size_t i = 0; i < flow.u.size(); ++i) {
      flow.u.pixels()[i] += increment.u.pixels()[i];
      flow.v.pixels()[i] += increment.v.pixels()[i];
    }
  }
  return flow;
}

DisplacementField horn_schunck(const GrayImage& reference, const GrayImage& target,
                               const FlowConfig& cfg) {
  return pyramid_flow(FlowEngine::horn_schunck, reference, target, cfg);
}

DisplacementField farneback(const GrayImage& reference, const GrayImage& target,
                            const FlowConfig& cfg) {
  return pyramid_flow(FlowEngine::farneback, reference, target, cfg);
}

}  // namespace bos
