#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "bos/error.hpp"
#include "bos/log.hpp"
#include "commands.hpp"

namespace bos::cli {

namespace {

void add_pattern_flags(CLI::App* app, PatternFlags& p) {
  app->add_option("--kind", p.kind, "random_squares | random_dots | random_gray (or squares/dots/gray)")
      ->capture_default_str();
  app->add_option("--width", p.width, "image width, px")->capture_default_str();
  app->add_option("--height", p.height, "image height, px")->capture_default_str();
  app->add_option("--cell", p.cell, "pattern cell size, px (before oversampling)")->capture_default_str();
  app->add_option("--fill", p.fill, "probability a cell is dark, in [0, 1]")->capture_default_str();
  app->add_option("--seed", p.seed, "pattern seed")->capture_default_str();
  app->add_option("--oversample", p.oversample,
                  "render at this factor and average per output pixel (camera integration)")
      ->capture_default_str();
}

void add_scene_flags(CLI::App* app, SceneFlags& s) {
  app->add_option("--geometry", s.geometry,
                  "geometry JSON (d1_m, d2_m, f_m, pixel_pitch_m, bg_scale_m_per_px, thickness_z_m; optional n0, gladstone_dale_m3_per_kg)");
  app->add_option("--field", s.field, "gaussian_plume | uniform")->capture_default_str();
  app->add_option("--cx", s.cx, "plume center x, px (default: image center)");
  app->add_option("--cy", s.cy, "plume center y, px (default: image center)");
  app->add_option("--sigma-px", s.sigma_px, "plume radius sigma, px")->capture_default_str();
  app->add_option("--delta-n", s.delta_n, "plume refractive-index drop (dimensionless)");
  app->add_option("--peak-px", s.peak_px, "set delta-n so the peak displacement is this many px");
  app->add_option("--thickness", s.thickness,
                  "line-of-sight thickness Z, m or with cm/mm suffix (default: geometry file, else 0.05 m)");
  app->add_option("--noise", s.noise, "additive Gaussian noise sigma, intensity units in [0, 1]")
      ->capture_default_str();
  app->add_option("--noise-seed", s.noise_seed, "noise seed")->capture_default_str();
  app->add_flag("--no-quantize", s.no_quantize, "keep real-valued intensities instead of 8-bit levels");
}

std::string single_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Background-oriented schlieren toolkit: patterns, simulation, reconstruction, metrics, rendering",
               std::string(kToolName)};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  bool timing = false;
  app.add_flag("--timing", timing, "record wall-clock duration in manifests (breaks byte-identical reruns)");

  std::function<int(Context&)> action;

  // pattern
  PatternOptions pattern;
  auto* pat = app.add_subcommand("pattern", "generate a background pattern PNG");
  add_pattern_flags(pat, pattern.pattern);
  pat->add_option("--geometry", pattern.geometry, "geometry JSON; checks the imaged cell against 3-5 px");
  pat->add_option("--out", pattern.out, "output PNG/PGM")->required();
  pat->callback([&] { action = [&](Context& c) { return cmd_pattern(pattern, c); }; });

  // simulate
  SimulateOptions sim;
  auto* simc = app.add_subcommand("simulate", "synthesize a reference/distorted pair with ground truth");
  add_pattern_flags(simc, sim.pattern);
  simc->add_option("--background", sim.background, "use this image instead of a generated pattern");
  add_scene_flags(simc, sim.scene);
  simc->add_option("--frames", sim.frames, "sweep delta-n linearly over this many pairs")->capture_default_str();
  simc->add_option("--out", sim.out, "output directory")->required();
  simc->callback([&] { action = [&](Context& c) { return cmd_simulate(sim, c); }; });

  // reconstruct
  ReconstructOptions rec;
  auto* recc = app.add_subcommand("reconstruct", "recover displacements from a frame pair");
  recc->add_option("--method", rec.method, "reconstruction method")
      ->required()
      ->check(CLI::IsMember({"cfs", "cc", "hs", "farneback"}));
  recc->add_option("--ref", rec.ref, "reference frame");
  recc->add_option("--target", rec.target, "target frame");
  recc->add_option("--frames-dir", rec.frames_dir, "directory of frames (sorted by name)");
  recc->add_option("--pair", rec.pair, "two frame indices into --frames-dir")->expected(2)->delimiter(',');
  recc->add_option("--out", rec.out, "output: PNG for cfs, .flo otherwise")->required();
  recc->add_option("--gain", rec.gain, "cfs: difference gain (>= 1)")->capture_default_str();
  recc->add_option("--window", rec.corr.window, "cc: interrogation window side, px")->capture_default_str();
  recc->add_option("--search", rec.corr.search, "cc: max displacement searched per axis, px")
      ->capture_default_str();
  recc->add_option("--step", rec.corr.step, "cc: grid stride, px")->capture_default_str();
  recc->add_option("--subpixel", rec.subpixel, "cc: gaussian3 | parabolic | none")->capture_default_str();
  recc->add_option("--min-peak", rec.corr.min_peak, "cc: windows below this correlation are invalid")
      ->capture_default_str();
  recc->add_option("--valid-mask", rec.valid_mask, "cc: write the grid validity mask PNG here");
  recc->add_option("--levels", rec.levels, "hs/farneback: pyramid levels (default 3)");
  recc->add_option("--scale", rec.scale, "hs/farneback: inter-level scale in (0, 1) (default 0.5)");
  recc->add_option("--iterations", rec.iterations, "hs/farneback: iterations per level (default 100 / 3)");
  recc->add_option("--alpha", rec.alpha, "hs: smoothness weight, intensity units (default 0.5)");
  recc->add_option("--poly-n", rec.poly_n, "farneback: expansion half-width, px (default 5)");
  recc->add_option("--poly-sigma", rec.poly_sigma, "farneback: applicability sigma, px (default 1.1)");
  recc->add_option("--fb-window", rec.fb_window, "farneback: averaging window, px (default 15)");
  recc->add_option("--postfilter", rec.postfilter, "median3 | gaussian:<sigma px>");
  recc->callback([&] { action = [&](Context& c) { return cmd_reconstruct(rec, c); }; });

  // metrics
  auto* met = app.add_subcommand("metrics", "score fields and images");
  met->require_subcommand(1);
  EpeOptions epe;
  auto* epec = met->add_subcommand("epe", "endpoint error against a ground-truth field");
  epec->add_option("--est", epe.est, "estimated .flo")->required();
  epec->add_option("--gt", epe.gt, "ground-truth .flo (dense)")->required();
  epec->add_option("--mask", epe.mask, "evaluation mask PNG (ground-truth sized)");
  epec->add_option("--border", epe.border, "excluded border, px")->capture_default_str();
  epec->add_option("--out", epe.out, "also write the report JSON here");
  epec->callback([&] { action = [&](Context& c) { return cmd_metrics_epe(epe, c); }; });
  SnrOptions snr;
  auto* snrc = met->add_subcommand("snr", "SNR = (I_sample - I_bg) / sigma_bg");
  snrc->add_option("--image", snr.image, "result image, or .flo (uses |d| in px)")->required();
  snrc->add_option("--sample-mask", snr.sample_mask, "sample region mask PNG (nonzero = member)");
  snrc->add_option("--bg-mask", snr.bg_mask, "background region mask PNG");
  snrc->add_option("--sample-rect", snr.sample_rect, "sample region as x,y,w,h")
      ->expected(4)->delimiter(',');
  snrc->add_option("--bg-rect", snr.bg_rect, "background region as x,y,w,h")->expected(4)->delimiter(',');
  snrc->add_option("--db", snr.db, "amplitude20 | power10")->capture_default_str();
  snrc->add_option("--out", snr.out, "also write the report JSON here");
  snrc->callback([&] { action = [&](Context& c) { return cmd_metrics_snr(snr, c); }; });

  // render
  auto* ren = app.add_subcommand("render", "visualize fields");
  ren->require_subcommand(1);
  RenderOptions rmag, rvec, rsbs;
  const auto add_render_flags = [](CLI::App* c, RenderOptions& r) {
    c->add_option("--colormap", r.render.colormap, "jet | gray")->capture_default_str();
    c->add_option("--max", r.render.max_px, "fixed normalization maximum, px (default: field max)");
  };
  auto* magc = ren->add_subcommand("magnitude", "color-coded |d| map");
  magc->add_option("--field", rmag.field, ".flo input")->required();
  add_render_flags(magc, rmag);
  magc->add_option("--out", rmag.out, "output PNG")->required();
  magc->callback([&] { action = [&](Context& c) { return cmd_render_magnitude(rmag, c); }; });
  auto* vecc = ren->add_subcommand("vectors", "arrows over a base image");
  vecc->add_option("--field", rvec.field, ".flo input")->required();
  vecc->add_option("--base", rvec.base, "base image (default: gray magnitude map or black canvas)");
  vecc->add_option("--stride", rvec.render.stride, "px between arrows")->capture_default_str();
  vecc->add_option("--scale", rvec.render.scale, "arrow length per displacement px")->capture_default_str();
  add_render_flags(vecc, rvec);
  vecc->add_option("--out", rvec.out, "output PNG")->required();
  vecc->callback([&] { action = [&](Context& c) { return cmd_render_vectors(rvec, c); }; });
  auto* sbsc = ren->add_subcommand("sbs", "side-by-side panel with 4 px gutters");
  sbsc->add_option("--inputs", rsbs.inputs, "images, left to right")->required()->delimiter(',');
  sbsc->add_option("--labels", rsbs.labels, "one label per input, written to <out>.labels.txt")
      ->delimiter(',');
  sbsc->add_option("--out", rsbs.out, "output PNG")->required();
  sbsc->callback([&] { action = [&](Context& c) { return cmd_render_sbs(rsbs, c); }; });

  // roundtrip
  RoundtripOptions rt;
  auto* rtc = app.add_subcommand("roundtrip", "pattern -> simulate -> reconstruct -> metrics -> renders");
  rtc->add_option("--out", rt.out, "output directory")->required();
  rtc->add_option("--methods", rt.methods, "subset of cfs,cc,hs,farneback")->delimiter(',');
  rtc->add_option("--kinds", rt.kinds, "pattern kinds to compare")->delimiter(',');
  rtc->add_option("--width", rt.width, "image width, px")->capture_default_str();
  rtc->add_option("--height", rt.height, "image height, px")->capture_default_str();
  rtc->add_option("--cell", rt.cell, "pattern cell, px before oversampling")->capture_default_str();
  rtc->add_option("--oversample", rt.oversample, "camera integration factor")->capture_default_str();
  rtc->add_option("--fill", rt.fill, "dark-cell probability")->capture_default_str();
  rtc->add_option("--seed", rt.seed, "pattern seed")->capture_default_str();
  add_scene_flags(rtc, rt.scene);
  rt.scene.peak_px = 2.0;
  rtc->callback([&] {
    if (rt.scene.delta_n && rtc->count("--peak-px") == 0) rt.scene.peak_px.reset();
    action = [&](Context& c) { return cmd_roundtrip(rt, c); };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << single_line(e.what()) << '\n';
    return 2;
  }
  // A subcommand's own --help is raised inside its callback path.
  if (!action) {
    err << "error: usage: no command given\n";
    return 2;
  }

  Context ctx{{}, out, timing, std::chrono::steady_clock::now()};
  ctx.command.emplace_back(kToolName);
  ctx.command.insert(ctx.command.end(), args.begin(), args.end());
  // Warnings go to the caller's error stream for the duration of the command.
  WarningSink previous =
      set_warning_sink([&err](std::string_view m) { err << "warning: " << m << '\n'; });
  int code = 1;
  try {
    code = action(ctx);
  } catch (const std::exception& e) {
    err << "error: " << single_line(e.what()) << '\n';
  }
  set_warning_sink(std::move(previous));
  return code;
}

}  // namespace bos::cli
