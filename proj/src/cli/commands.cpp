#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bos/error.hpp"
#include "bos/io.hpp"
#include "bos/log.hpp"
#include "bos/metrics.hpp"
#include "bos/optics.hpp"

namespace bos::cli {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// helpers

PatternSpec PatternFlags::spec() const {
  PatternSpec s;
  s.kind = parse_pattern_kind(kind);
  s.width = width;
  s.height = height;
  s.cell = cell;
  s.fill = fill;
  s.seed = seed;
  s.validate();
  if (oversample < 1) throw InvalidArgument("--oversample must be >= 1");
  return s;
}

void finish(Manifest& manifest, const Context& ctx) {
  if (ctx.timing) {
    manifest.set_duration_ms(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - ctx.start).count());
  }
  manifest.write();
}

fs::path manifest_beside(const fs::path& output) {
  fs::path m = output;
  m += ".manifest.json";
  return m;
}

void require_parent_dir(const fs::path& path) {
  const fs::path parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw IoError("output directory " + parent.string() + " does not exist");
  }
}

void write_json(const ordered_json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
}

Scene make_scene(const SceneFlags& flags, int width, int height) {
  Scene s;
  if (!flags.geometry.empty()) {
    const GeometryFile g = load_geometry(flags.geometry);
    s.geometry = g.geometry;
    s.constants = g.constants;
    s.field.thickness_z = g.thickness_z;
  } else {
    s.geometry.bg_scale = 0.210 / width;
  }
  s.geometry.validate();

  if (flags.field == "gaussian_plume" || flags.field == "plume") {
    s.field.kind = FieldKind::gaussian_plume;
  } else if (flags.field == "uniform") {
    s.field.kind = FieldKind::uniform;
  } else {
    throw InvalidArgument("unknown field '" + flags.field + "' (expected gaussian_plume or uniform)");
  }
  s.field.cx = flags.cx.value_or(0.5 * (width - 1));
  s.field.cy = flags.cy.value_or(0.5 * (height - 1));
  s.field.sigma_px = flags.sigma_px;
  if (flags.thickness) s.field.thickness_z = parse_length(*flags.thickness);
  if (flags.delta_n && flags.peak_px) {
    throw InvalidArgument("--delta-n and --peak-px are mutually exclusive");
  }
  if (flags.delta_n) {
    s.field.delta_n = *flags.delta_n;
  } else if (flags.peak_px) {
    s.field.validate();
    s.field.delta_n = delta_n_for_peak(*flags.peak_px, s.field, s.geometry, s.constants);
  }
  s.field.validate();

  if (flags.noise < 0.0) throw InvalidArgument("--noise must be >= 0");
  s.camera.noise_sigma = flags.noise;
  s.camera.noise_seed = flags.noise_seed;
  s.camera.quantize = !flags.no_quantize;
  return s;
}

ordered_json to_json(const Scene& s) {
  ordered_json j;
  j["geometry"] = {{"d1_m", s.geometry.d1},
                   {"d2_m", s.geometry.d2},
                   {"d3_m", s.geometry.d3()},
                   {"f_m", s.geometry.f},
                   {"pixel_pitch_m", s.geometry.pixel_pitch},
                   {"bg_scale_m_per_px", s.geometry.bg_scale}};
  j["constants"] = {{"n0", s.constants.n0}, {"gladstone_dale_m3_per_kg", s.constants.gladstone_dale}};
  j["field"] = {{"kind", s.field.kind == FieldKind::gaussian_plume ? "gaussian_plume" : "uniform"},
                {"cx_px", s.field.cx},
                {"cy_px", s.field.cy},
                {"sigma_px", s.field.sigma_px},
                {"delta_n", s.field.delta_n},
                {"thickness_z_m", s.field.thickness_z}};
  j["peak_displacement_px"] = plume_peak_displacement_px(s.field, s.geometry, s.constants);
  j["camera"] = {{"noise_sigma", s.camera.noise_sigma},
                 {"noise_seed", s.camera.noise_seed},
                 {"quantize_8bit", s.camera.quantize}};
  return j;
}

ordered_json to_json(const PatternSpec& spec, int oversample) {
  return {{"kind", to_string(spec.kind)}, {"width", spec.width},  {"height", spec.height},
          {"cell", spec.cell},            {"fill", spec.fill},    {"seed", spec.seed},
          {"oversample", oversample}};
}

RenderConfig make_render_config(const RenderFlags& flags) {
  RenderConfig cfg;
  cfg.colormap = parse_colormap(flags.colormap);
  cfg.max_px = flags.max_px;
  cfg.stride = flags.stride;
  cfg.scale = flags.scale;
  cfg.validate();
  return cfg;
}

namespace {

void write_flow_output(const DisplacementField& field, const fs::path& path, Manifest& m) {
  write_flow(field, path);
  m.add_output(path);
  if (!field.dense()) m.add_output(sidecar_path(path));
}

ordered_json to_json(const EpeReport& r) {
  return {{"mean_px", r.mean}, {"median_px", r.median}, {"p95_px", r.p95},
          {"max_px", r.max},   {"count", r.count}};
}

ordered_json to_json(const SnrReport& r) {
  ordered_json j{{"i_sample", r.i_sample}, {"i_bg", r.i_bg}, {"sigma_bg", r.sigma_bg},
                 {"linear", r.linear}};
  j["db"] = r.db ? ordered_json(*r.db) : ordered_json(nullptr);
  return j;
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("frames directory " + dir.string() + " does not exist");
  }
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".pgm") frames.push_back(entry.path());
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

}  // namespace

// ---------------------------------------------------------------------------
// pattern

int cmd_pattern(const PatternOptions& o, Context& ctx) {
  const PatternSpec spec = o.pattern.spec();
  require_parent_dir(o.out);
  Manifest manifest(manifest_beside(o.out), ctx.command);
  if (!o.geometry.empty()) {
    const GeometryFile g = load_geometry(o.geometry);
    manifest.add_config(o.geometry);
    const double imaged =
        imaged_cell_pixels(static_cast<double>(spec.cell) / o.pattern.oversample, g.geometry);
    const RaffelCheck check = check_raffel(imaged);
    if (!check.pass) warn(check.message);
    ctx.out << "imaged cell: " << imaged << " px (" << (check.pass ? "pass" : "fail") << ")\n";
  }
  save_image(imaged_pattern(spec, o.pattern.oversample), o.out);
  manifest.add_output(o.out);
  finish(manifest, ctx);
  ctx.out << "wrote " << o.out.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const SimulateOptions& o, Context& ctx) {
  if (o.frames < 1) throw InvalidArgument("--frames must be >= 1");
  fs::create_directories(o.out);
  Manifest manifest(o.out / "manifest.json", ctx.command);

  GrayImage background;
  ordered_json source;
  if (!o.background.empty()) {
    background = load_image(o.background);
    manifest.add_input(o.background);
    source = {{"background", o.background}};
  } else {
    const PatternSpec spec = o.pattern.spec();
    background = imaged_pattern(spec, o.pattern.oversample);
    source = {{"pattern", to_json(spec, o.pattern.oversample)}};
  }
  if (!o.scene.geometry.empty()) manifest.add_config(o.scene.geometry);
  const Scene scene = make_scene(o.scene, background.width(), background.height());

  for (int k = 0; k < o.frames; ++k) {
    Scene frame = scene;
    fs::path dir = o.out;
    if (o.frames > 1) {
      // Linear delta_n sweep ending at the requested strength.
      frame.field.delta_n = scene.field.delta_n * (k + 1) / o.frames;
      std::ostringstream name;
      name << "frame_" << std::setw(3) << std::setfill('0') << k;
      dir /= name.str();
      fs::create_directories(dir);
    }
    const SimOutput sim =
        simulate_pair(background, frame.field, frame.geometry, frame.constants, frame.camera);
    save_image(sim.reference, dir / "reference.png");
    save_image(sim.distorted, dir / "distorted.png");
    write_flow(sim.ground_truth, dir / "gt.flo");
    ordered_json meta = source;
    meta.update(to_json(frame));
    meta["width"] = background.width();
    meta["height"] = background.height();
    meta["convention"] = "distorted(x) = reference(x - d(x))";
    write_json(meta, dir / "metadata.json");
    for (const char* f : {"reference.png", "distorted.png", "gt.flo", "metadata.json"}) {
      manifest.add_output(dir / f);
    }
    ctx.out << "wrote " << dir.string() << " (peak " << meta["peak_displacement_px"].get<double>()
            << " px)\n";
  }
  finish(manifest, ctx);
  return 0;
}

// ---------------------------------------------------------------------------
// reconstruct

int cmd_reconstruct(const ReconstructOptions& o, Context& ctx) {
  fs::path ref_path = o.ref;
  fs::path tgt_path = o.target;
  if (!o.frames_dir.empty()) {
    if (!o.ref.empty() || !o.target.empty()) {
      throw InvalidArgument("use either --frames-dir with --pair or --ref with --target");
    }
    const std::vector<fs::path> frames = list_frames(o.frames_dir);
    if (o.pair.size() != 2) throw InvalidArgument("--pair takes two frame indices");
    for (int idx : o.pair) {
      if (idx < 0 || idx >= static_cast<int>(frames.size())) {
        throw InvalidArgument("--pair index " + std::to_string(idx) + " outside the " +
                              std::to_string(frames.size()) + " frames in " + o.frames_dir);
      }
    }
    ref_path = frames[static_cast<std::size_t>(o.pair[0])];
    tgt_path = frames[static_cast<std::size_t>(o.pair[1])];
  }
  if (ref_path.empty() || tgt_path.empty()) {
    throw InvalidArgument("reconstruct needs --ref and --target, or --frames-dir");
  }
  require_parent_dir(o.out);
  const GrayImage ref = load_image(ref_path);
  const GrayImage tgt = load_image(tgt_path);
  if (!ref.same_shape(tgt)) {
    throw DimensionMismatch("frames " + ref_path.string() + " and " + tgt_path.string() +
                            " differ in size");
  }
  Manifest manifest(manifest_beside(o.out), ctx.command);
  manifest.add_input(ref_path);
  manifest.add_input(tgt_path);

  if (o.method == "cfs") {
    save_image(cfs(ref, tgt, o.gain), o.out);
    manifest.add_output(o.out);
  } else {
    DisplacementField field;
    if (o.method == "cc") {
      CorrConfig cfg = o.corr;
      cfg.subpixel = parse_subpixel_fit(o.subpixel);
      CorrelationResult r = cross_correlate(ref, tgt, cfg);
      field = std::move(r.field);
      if (!o.valid_mask.empty()) {
        Mask m(field.width(), field.height(), 0);
        for (int j = 0; j < field.height(); ++j) {
          for (int i = 0; i < field.width(); ++i) m(i, j) = field.is_valid(i, j) ? 1 : 0;
        }
        save_mask(m, o.valid_mask);
        manifest.add_output(o.valid_mask);
      }
    } else {
      const FlowEngine engine = parse_flow_engine(o.method);
      FlowConfig cfg = engine == FlowEngine::horn_schunck ? FlowConfig::horn_schunck_defaults()
                                                          : FlowConfig::farneback_defaults();
      if (o.levels) cfg.levels = *o.levels;
      if (o.scale) cfg.scale = *o.scale;
      if (o.iterations) cfg.iterations = *o.iterations;
      if (o.alpha) cfg.alpha = *o.alpha;
      if (o.poly_n) cfg.poly_n = *o.poly_n;
      if (o.poly_sigma) cfg.poly_sigma = *o.poly_sigma;
      if (o.fb_window) cfg.window = *o.fb_window;
      field = pyramid_flow(engine, ref, tgt, cfg);
    }
    if (!o.postfilter.empty()) {
      field = postfilter(field, PostFilter::parse(o.postfilter));
    }
    write_flow_output(field, o.out, manifest);
    const MagnitudeStats stats = magnitude_stats(field);
    ctx.out << "|d| min " << stats.min << " mean " << stats.mean << " max " << stats.max << " px\n";
  }
  finish(manifest, ctx);
  ctx.out << "wrote " << o.out.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// metrics

namespace {

void emit_report(const ordered_json& report, const std::string& out_path,
                 const std::vector<fs::path>& inputs, Context& ctx) {
  ctx.out << report.dump(2) << '\n';
  if (out_path.empty()) return;
  const fs::path out(out_path);
  require_parent_dir(out);
  write_json(report, out);
  Manifest manifest(manifest_beside(out), ctx.command);
  for (const fs::path& p : inputs) manifest.add_input(p);
  manifest.add_output(out);
  finish(manifest, ctx);
}

}  // namespace

int cmd_metrics_epe(const EpeOptions& o, Context& ctx) {
  const DisplacementField est = read_flow(o.est);
  const DisplacementField gt = read_flow(o.gt);
  std::optional<Mask> mask;
  std::vector<fs::path> inputs{o.est, o.gt};
  if (!o.mask.empty()) {
    mask = load_mask(o.mask);
    inputs.emplace_back(o.mask);
  }
  const EpeReport r = endpoint_error(est, gt, mask, o.border);
  emit_report(ordered_json{{"metric", "epe"}, {"border_px", o.border}, {"epe", to_json(r)}},
              o.out, inputs, ctx);
  return 0;
}

int cmd_metrics_snr(const SnrOptions& o, Context& ctx) {
  const fs::path image(o.image);
  Plane<float> values;
  if (image.extension() == ".flo") {
    values = magnitude(read_flow(image));
  } else {
    values = load_image(image);
  }
  DbConvention conv;
  if (o.db == "amplitude20" || o.db == "20") {
    conv = DbConvention::amplitude20;
  } else if (o.db == "power10" || o.db == "10") {
    conv = DbConvention::power10;
  } else {
    throw InvalidArgument("unknown dB convention '" + o.db + "' (expected amplitude20 or power10)");
  }
  std::vector<fs::path> inputs{image};
  const auto region = [&](const std::string& file, const std::vector<int>& rect, const char* name) {
    if (file.empty() == rect.empty()) {
      throw InvalidArgument(std::string("give exactly one of --") + name + "-mask or --" + name + "-rect");
    }
    if (!file.empty()) {
      inputs.emplace_back(file);
      return load_mask(file);
    }
    return rect_mask(values.width(), values.height(), rect[0], rect[1], rect[2], rect[3]);
  };
  const Mask sample = region(o.sample_mask, o.sample_rect, "sample");
  const Mask bg = region(o.bg_mask, o.bg_rect, "bg");
  const SnrReport r = snr(values, sample, bg, conv);
  emit_report(ordered_json{{"metric", "snr"}, {"db_convention", o.db}, {"snr", to_json(r)}}, o.out,
              inputs, ctx);
  return 0;
}

// ---------------------------------------------------------------------------
// render

int cmd_render_magnitude(const RenderOptions& o, Context& ctx) {
  const RenderConfig cfg = make_render_config(o.render);
  require_parent_dir(o.out);
  Manifest manifest(manifest_beside(o.out), ctx.command);
  manifest.add_input(o.field);
  save_image(magnitude_map(read_flow(o.field), cfg), o.out);
  manifest.add_output(o.out);
  finish(manifest, ctx);
  ctx.out << "wrote " << o.out.string() << '\n';
  return 0;
}

int cmd_render_vectors(const RenderOptions& o, Context& ctx) {
  const RenderConfig cfg = make_render_config(o.render);
  require_parent_dir(o.out);
  Manifest manifest(manifest_beside(o.out), ctx.command);
  manifest.add_input(o.field);
  const DisplacementField field = read_flow(o.field);
  RgbImage base;
  if (!o.base.empty()) {
    base = load_rgb_image(o.base);
    manifest.add_input(o.base);
  } else if (field.dense()) {
    RenderConfig gray = cfg;
    gray.colormap = Colormap::grayscale;
    base = magnitude_map(field, gray);
  } else {
    const int w = static_cast<int>(field.grid_x(field.width() - 1)) + field.origin_x + 1;
    const int h = static_cast<int>(field.grid_y(field.height() - 1)) + field.origin_y + 1;
    base = RgbImage(w, h, 0.f, 0.f, 0.f);
  }
  const Overlay overlay = vector_overlay(field, base, cfg);
  save_image(overlay.image, o.out);
  manifest.add_output(o.out);
  finish(manifest, ctx);
  ctx.out << "wrote " << o.out.string() << " (" << overlay.arrows << " arrows)\n";
  return 0;
}

int cmd_render_sbs(const RenderOptions& o, Context& ctx) {
  if (!o.labels.empty() && o.labels.size() != o.inputs.size()) {
    throw InvalidArgument("--labels must name every input (" + std::to_string(o.inputs.size()) +
                          " expected)");
  }
  require_parent_dir(o.out);
  Manifest manifest(manifest_beside(o.out), ctx.command);
  std::vector<RgbImage> images;
  for (const std::string& p : o.inputs) {
    images.push_back(load_rgb_image(p));
    manifest.add_input(p);
  }
  save_image(side_by_side(images), o.out);
  manifest.add_output(o.out);
  if (!o.labels.empty()) {
    fs::path labels = o.out;
    labels.replace_extension(".labels.txt");
    std::ofstream txt(labels, std::ios::binary | std::ios::trunc);
    for (const std::string& l : o.labels) txt << l << '\n';
    if (!txt) throw IoError("cannot write " + labels.string());
    txt.close();
    manifest.add_output(labels);
  }
  finish(manifest, ctx);
  ctx.out << "wrote " << o.out.string() << '\n';
  return 0;
}

}  // namespace bos::cli
