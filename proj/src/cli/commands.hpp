#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bos/cli.hpp"
#include "bos/image.hpp"
#include "bos/patterns.hpp"
#include "bos/reconstruct.hpp"
#include "bos/render.hpp"
#include "bos/simulate.hpp"

namespace bos::cli {

namespace fs = std::filesystem;

struct Context {
  std::vector<std::string> command;  ///< full argument echo, program name first
  std::ostream& out;
  bool timing = false;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

/// Final manifest write; adds the duration when timing was requested.
void finish(Manifest& manifest, const Context& ctx);

struct PatternFlags {
  std::string kind = "random_squares";
  int width = 1920;
  int height = 1080;
  int cell = 8;
  double fill = 0.5;
  std::uint64_t seed = 0;
  int oversample = 1;

  PatternSpec spec() const;
};

struct PatternOptions {
  PatternFlags pattern;
  std::string geometry;
  fs::path out;
};

struct SceneFlags {
  std::string geometry;
  std::string field = "gaussian_plume";
  std::optional<double> cx, cy;
  double sigma_px = 40.0;
  std::optional<double> delta_n;
  std::optional<double> peak_px;
  std::optional<std::string> thickness;  ///< overrides the geometry file; 0.05 m otherwise
  double noise = 0.005;
  std::uint64_t noise_seed = 1;
  bool no_quantize = false;
};

struct SimulateOptions {
  PatternFlags pattern;
  std::string background;
  SceneFlags scene;
  int frames = 1;
  fs::path out;
};

struct ReconstructOptions {
  std::string method;
  std::string ref, target;
  std::string frames_dir;
  std::vector<int> pair{0, 1};
  fs::path out;
  double gain = 1.0;
  CorrConfig corr;
  std::string subpixel = "gaussian3";
  std::string valid_mask;
  std::optional<int> levels, iterations, poly_n, fb_window;
  std::optional<double> scale, alpha, poly_sigma;
  std::string postfilter;
};

struct EpeOptions {
  std::string est, gt, mask;
  int border = 16;
  std::string out;
};

struct SnrOptions {
  std::string image, sample_mask, bg_mask;
  /// x, y, width, height; alternative to the PNG masks.
  std::vector<int> sample_rect, bg_rect;
  std::string db = "amplitude20";
  std::string out;
};

struct RenderFlags {
  std::string colormap = "jet";
  std::optional<double> max_px;
  int stride = 16;
  double scale = 10.0;
};

struct RenderOptions {
  std::string field;
  std::string base;
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  RenderFlags render;
  fs::path out;
};

struct RoundtripOptions {
  fs::path out;
  std::vector<std::string> methods{"cfs", "cc", "hs", "farneback"};
  std::vector<std::string> kinds{"random_squares", "random_dots", "random_gray"};
  int width = 640;
  int height = 480;
  int cell = 8;
  int oversample = 2;
  double fill = 0.5;
  std::uint64_t seed = 0;
  SceneFlags scene;
};

int cmd_pattern(const PatternOptions& o, Context& ctx);
int cmd_simulate(const SimulateOptions& o, Context& ctx);
int cmd_reconstruct(const ReconstructOptions& o, Context& ctx);
int cmd_metrics_epe(const EpeOptions& o, Context& ctx);
int cmd_metrics_snr(const SnrOptions& o, Context& ctx);
int cmd_render_magnitude(const RenderOptions& o, Context& ctx);
int cmd_render_vectors(const RenderOptions& o, Context& ctx);
int cmd_render_sbs(const RenderOptions& o, Context& ctx);
int cmd_roundtrip(const RoundtripOptions& o, Context& ctx);

// Shared helpers.

/// "out.png" -> "out.png.manifest.json", for commands with a single output file.
fs::path manifest_beside(const fs::path& output);
void write_json(const nlohmann::ordered_json& j, const fs::path& path);
void require_parent_dir(const fs::path& path);

struct Scene {
  BosGeometry geometry;
  OpticsConstants constants;
  RefractiveField field;
  CameraModel camera;
};

/// Resolves geometry (A4-width background when bg_scale is not given), the
/// refractive field centered by default, and the camera.
Scene make_scene(const SceneFlags& flags, int width, int height);

nlohmann::ordered_json to_json(const Scene& scene);
nlohmann::ordered_json to_json(const PatternSpec& spec, int oversample);

RenderConfig make_render_config(const RenderFlags& flags);

}  // namespace bos::cli
