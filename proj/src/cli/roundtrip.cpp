#include <algorithm>
#include <fstream>
#include <map>
#include <cmath>
#include <functional>

#include "bos/error.hpp"
#include "bos/io.hpp"
#include "bos/metrics.hpp"
#include "commands.hpp"

namespace bos::cli {

using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kAllMethods{"cfs", "cc", "hs", "farneback"};
const std::vector<PatternKind> kExpectedOrder{PatternKind::random_squares, PatternKind::random_dots,
                                              PatternKind::random_gray};

// Sample region: the plume annulus sigma/2 <= r <= 2 sigma, where the
// displacement is strongest. Background: r >= 4.5 sigma, clear of the plume
// tail, and 16 px inside the frame.
struct Regions {
  double cx, cy, sigma;
  int width, height;

  bool sample(double x, double y) const {
    const double r = std::hypot(x - cx, y - cy);
    return r >= 0.5 * sigma && r <= 2.0 * sigma;
  }
  bool background(double x, double y) const {
    constexpr double kBorder = 16.0;
    const double r = std::hypot(x - cx, y - cy);
    return r >= 4.5 * sigma && x >= kBorder && y >= kBorder && x < width - kBorder &&
           y < height - kBorder;
  }
};

// Masks over a field's grid (dense fields: every pixel).
std::pair<Mask, Mask> grid_masks(const Regions& reg, const DisplacementField& f) {
  Mask s(f.width(), f.height(), 0);
  Mask b(f.width(), f.height(), 0);
  for (int j = 0; j < f.height(); ++j) {
    for (int i = 0; i < f.width(); ++i) {
      s(i, j) = reg.sample(f.grid_x(i), f.grid_y(j)) ? 1 : 0;
      b(i, j) = reg.background(f.grid_x(i), f.grid_y(j)) ? 1 : 0;
    }
  }
  return {s, b};
}

ordered_json snr_json(const Plane<float>& values, const Mask& s, const Mask& b) {
  const auto any = [](const Mask& m) {
    return std::any_of(m.pixels().begin(), m.pixels().end(), [](auto v) { return v != 0; });
  };
  if (!any(s) || !any(b)) return nullptr;
  const SnrReport r = snr(values, s, b);
  ordered_json j{{"linear", r.linear}, {"i_sample", r.i_sample}, {"i_bg", r.i_bg},
                 {"sigma_bg", r.sigma_bg}};
  j["db"] = r.db ? ordered_json(*r.db) : ordered_json(nullptr);
  return j;
}

RgbImage gray_to_rgb(const GrayImage& g) { return RgbImage::from_gray(g); }

}  // namespace

int cmd_roundtrip(const RoundtripOptions& o, Context& ctx) {
  for (const std::string& m : o.methods) {
    if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end()) {
      throw InvalidArgument("unknown method '" + m + "' (expected cfs, cc, hs or farneback)");
    }
  }
  std::vector<PatternKind> kinds;
  for (const std::string& k : o.kinds) kinds.push_back(parse_pattern_kind(k));
  const auto wants = [&](const char* m) {
    return std::find(o.methods.begin(), o.methods.end(), m) != o.methods.end();
  };

  fs::create_directories(o.out);
  Manifest manifest(o.out / "manifest.json", ctx.command);
  if (!o.scene.geometry.empty()) manifest.add_config(o.scene.geometry);

  const auto stage = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      manifest.stage_failed(name, e.what());
      manifest.write();
      throw Error("stage " + name + ": " + e.what());
    }
    manifest.stage_done(name);
    manifest.write();
    ctx.out << "[" << name << "] done\n";
  };

  const Scene scene = make_scene(o.scene, o.width, o.height);
  const Regions regions{scene.field.cx, scene.field.cy, scene.field.sigma_px, o.width, o.height};

  ordered_json summary;
  summary["scene"] = to_json(scene);
  summary["width"] = o.width;
  summary["height"] = o.height;
  summary["methods"] = o.methods;
  summary["regions"] = {{"sample", "0.5 sigma <= r <= 2 sigma"},
                        {"background", "r >= 4.5 sigma, 16 px inside the frame"}};
  summary["patterns"] = ordered_json::object();

  std::map<std::string, std::map<PatternKind, double>> snr_db;

  for (PatternKind kind : kinds) {
    const std::string kname(to_string(kind));
    const fs::path dir = o.out / kname;
    PatternSpec spec;
    spec.kind = kind;
    spec.width = o.width;
    spec.height = o.height;
    spec.cell = o.cell;
    spec.fill = o.fill;
    spec.seed = o.seed;

    GrayImage pattern;
    stage("pattern:" + kname, [&] {
      fs::create_directories(dir);
      pattern = imaged_pattern(spec, o.oversample);
      save_image(pattern, dir / "pattern.png");
      manifest.add_output(dir / "pattern.png");
    });

    SimOutput sim;
    stage("simulate:" + kname, [&] {
      sim = simulate_pair(pattern, scene.field, scene.geometry, scene.constants, scene.camera);
      save_image(sim.reference, dir / "reference.png");
      save_image(sim.distorted, dir / "distorted.png");
      write_flow(sim.ground_truth, dir / "gt.flo");
      ordered_json meta{{"pattern", to_json(spec, o.oversample)}};
      meta.update(to_json(scene));
      write_json(meta, dir / "metadata.json");
      for (const char* f : {"reference.png", "distorted.png", "gt.flo", "metadata.json"}) {
        manifest.add_output(dir / f);
      }
    });

    GrayImage diff;
    std::map<std::string, DisplacementField> fields;
    if (wants("cfs")) {
      stage("reconstruct:" + kname + ":cfs", [&] {
        diff = cfs(sim.reference, sim.distorted);
        save_image(diff, dir / "cfs.png");
        manifest.add_output(dir / "cfs.png");
      });
    }
    for (const char* m : {"cc", "hs", "farneback"}) {
      if (!wants(m)) continue;
      stage("reconstruct:" + kname + ":" + m, [&] {
        DisplacementField f;
        if (std::string(m) == "cc") {
          f = cross_correlate(sim.reference, sim.distorted).field;
        } else if (std::string(m) == "hs") {
          f = horn_schunck(sim.reference, sim.distorted);
        } else {
          f = farneback(sim.reference, sim.distorted);
        }
        const fs::path p = dir / (std::string(m) + ".flo");
        write_flow(f, p);
        manifest.add_output(p);
        if (!f.dense()) manifest.add_output(sidecar_path(p));
        fields.emplace(m, std::move(f));
      });
    }

    ordered_json kind_json;
    stage("metrics:" + kname, [&] {
      kind_json["peak_displacement_px"] = magnitude_stats(sim.ground_truth).max;
      if (wants("cfs")) {
        const auto [s, b] = grid_masks(regions, sim.ground_truth);
        kind_json["cfs"] = {{"snr", snr_json(diff, s, b)}};
        const auto& j = kind_json["cfs"]["snr"];
        if (j.is_object() && j["db"].is_number()) snr_db["cfs"][kind] = j["db"].get<double>();
      }
      for (const auto& [name, f] : fields) {
        const auto [s, b] = grid_masks(regions, f);
        ordered_json mj;
        const EpeReport e = endpoint_error(f, sim.ground_truth);
        mj["epe"] = {{"mean_px", e.mean}, {"median_px", e.median}, {"p95_px", e.p95},
                     {"max_px", e.max},   {"count", e.count}};
        mj["snr"] = snr_json(magnitude(f), s, b);
        if (mj["snr"].is_object() && mj["snr"]["db"].is_number()) {
          snr_db[name][kind] = mj["snr"]["db"].get<double>();
        }
        kind_json[name] = mj;
      }
    });
    summary["patterns"][kname] = kind_json;

    stage("render:" + kname, [&] {
      RenderConfig cfg;
      const RgbImage base = gray_to_rgb(sim.reference);
      // Arrows read better over a washed-out background.
      RgbImage faded = base;
      for (float& c : faded.data()) c = 0.6f + 0.4f * c;
      std::vector<RgbImage> panels{base};
      std::vector<std::string> labels{"reference"};
      if (wants("cfs")) {
        panels.push_back(gray_to_rgb(diff));
        labels.emplace_back("cfs");
      }
      for (const auto& [name, f] : fields) {
        const RgbImage mag = magnitude_map(f, cfg);
        save_image(mag, dir / (name + "_magnitude.png"));
        const Overlay ov = vector_overlay(f, faded, cfg);
        save_image(ov.image, dir / (name + "_vectors.png"));
        manifest.add_output(dir / (name + "_magnitude.png"));
        manifest.add_output(dir / (name + "_vectors.png"));
        if (f.dense()) {
          panels.push_back(mag);
          labels.push_back(name + " magnitude");
        }
      }
      save_image(side_by_side(panels), dir / "overview.png");
      std::ofstream txt(dir / "overview.labels.txt", std::ios::binary | std::ios::trunc);
      for (const std::string& l : labels) txt << l << '\n';
      txt.close();
      manifest.add_output(dir / "overview.png");
      manifest.add_output(dir / "overview.labels.txt");
    });
  }

  // SNR ranking of the pattern kinds per method, highest first.
  ordered_json ordering = ordered_json::object();
  ordered_json matches = ordered_json::object();
  for (const auto& [method, by_kind] : snr_db) {
    std::vector<std::pair<double, PatternKind>> ranked;
    for (const auto& [k, db] : by_kind) ranked.emplace_back(db, k);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    ordered_json names = ordered_json::array();
    std::vector<PatternKind> order;
    for (const auto& [db, k] : ranked) {
      names.push_back(to_string(k));
      order.push_back(k);
    }
    ordering[method] = names;
    if (order.size() == kExpectedOrder.size()) matches[method] = order == kExpectedOrder;
  }
  summary["snr_db_convention"] = "20 log10";
  summary["snr_ordering"] = ordering;
  summary["expected_ordering"] = {"random_squares", "random_dots", "random_gray"};
  summary["ordering_matches_expected"] = matches;

  write_json(summary, o.out / "summary.json");
  manifest.add_output(o.out / "summary.json");
  finish(manifest, ctx);
  for (const auto& [method, names] : ordering.items()) {
    ctx.out << "snr ordering (" << method << "):";
    for (const auto& n : names) ctx.out << ' ' << n.get<std::string>();
    ctx.out << '\n';
  }
  ctx.out << "wrote " << (o.out / "summary.json").string() << '\n';
  return 0;
}

}  // namespace bos::cli
