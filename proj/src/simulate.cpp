#include "bos/simulate.hpp"

#include <cmath>

#include "bos/io.hpp"
#include "bos/log.hpp"
#include "bos/rng.hpp"

namespace bos {

void RefractiveField::validate() const {
  if (!(thickness_z > 0.0)) {
    throw InvalidArgument("refractive field thickness Z must be > 0");
  }
  if (kind == FieldKind::uniform) {
    return;
  }
  if (!(sigma_px > 0.0)) {
    throw InvalidArgument("plume sigma must be > 0");
  }
  if (!(delta_n >= 0.0) || !std::isfinite(delta_n)) {
    throw InvalidArgument("plume delta_n must be finite and >= 0");
  }
  if (delta_n >= 0.01) {
    warn("plume delta_n >= 0.01 is far beyond gas-phase index changes");
  }
}

double index_at(const RefractiveField& field, double x, double y, const OpticsConstants& consts) {
  if (field.kind == FieldKind::uniform) {
    return consts.n0;
  }
  const double dx = x - field.cx;
  const double dy = y - field.cy;
  const double s2 = field.sigma_px * field.sigma_px;
  return consts.n0 - field.delta_n * std::exp(-(dx * dx + dy * dy) / (2.0 * s2));
}

IndexGradient index_gradient_px(const RefractiveField& field, double x, double y) {
  if (field.kind == FieldKind::uniform) {
    return {};
  }
  const double dx = x - field.cx;
  const double dy = y - field.cy;
  const double s2 = field.sigma_px * field.sigma_px;
  const double g = field.delta_n * std::exp(-(dx * dx + dy * dy) / (2.0 * s2)) / s2;
  return {g * dx, g * dy};
}

DisplacementField ground_truth_field(const RefractiveField& field, const BosGeometry& geom,
                                     const OpticsConstants& consts, int width, int height) {
  field.validate();
  geom.validate();
  consts.validate();
  DisplacementField out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const IndexGradient g = index_gradient_px(field, x, y);
      // per-pixel gradient -> per-meter gradient -> deflection -> background shift (m) -> px
      const Deflection ax =
          deflection_from_index_gradient(g.dx / geom.bg_scale, field.thickness_z, consts);
      const Deflection ay =
          deflection_from_index_gradient(g.dy / geom.bg_scale, field.thickness_z, consts);
      out.u(x, y) = static_cast<float>(background_displacement(ax, geom) / geom.bg_scale);
      out.v(x, y) = static_cast<float>(background_displacement(ay, geom) / geom.bg_scale);
    }
  }
  return out;
}

double plume_peak_displacement_px(const RefractiveField& field, const BosGeometry& geom,
                                  const OpticsConstants& consts) {
  if (field.kind == FieldKind::uniform) {
    return 0.0;
  }
  // |grad n| per px peaks at r = sigma: delta_n * exp(-1/2) / sigma.
  const double grad_px = field.delta_n * std::exp(-0.5) / field.sigma_px;
  const Deflection a =
      deflection_from_index_gradient(grad_px / geom.bg_scale, field.thickness_z, consts);
  return background_displacement(a, geom) / geom.bg_scale;
}

double delta_n_for_peak(double peak_px, const RefractiveField& field, const BosGeometry& geom,
                        const OpticsConstants& consts) {
  RefractiveField unit = field;
  unit.kind = FieldKind::gaussian_plume;
  // The chain is linear in delta_n; probe with a value safely inside the
  // small-angle regime.
  constexpr double kProbe = 1e-6;
  unit.delta_n = kProbe;
  return kProbe * peak_px / plume_peak_displacement_px(unit, geom, consts);
}

GrayImage warp_image(const GrayImage& background, const DisplacementField& field) {
  if (!field.dense() || !background.same_shape(field.u)) {
    throw DimensionMismatch("warp_image needs a dense field matching the image dimensions");
  }
  GrayImage out(background.width(), background.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out(x, y) = static_cast<float>(
          sample_bilinear(background, x - static_cast<double>(field.u(x, y)),
                          y - static_cast<double>(field.v(x, y))));
    }
  }
  return out;
}

namespace {

void apply_camera(GrayImage& img, SplitMix64& rng, const CameraModel& camera) {
  for (float& p : img.pixels()) {
    double value = p;
    if (camera.noise_sigma > 0.0) {
      value = std::clamp(value + camera.noise_sigma * rng.normal(), 0.0, 1.0);
    }
    if (camera.quantize) {
      value = to_byte(static_cast<float>(value)) / 255.0;
    }
    p = static_cast<float>(value);
  }
}

}  // namespace

SimOutput simulate_pair(const GrayImage& background, const RefractiveField& field,
                        const BosGeometry& geom, const OpticsConstants& consts,
                        const CameraModel& camera) {
  if (!(camera.noise_sigma >= 0.0)) {
    throw InvalidArgument("noise sigma must be >= 0");
  }
  SimOutput out;
  out.ground_truth = ground_truth_field(field, geom, consts, background.width(), background.height());
  out.reference = background;
  out.distorted = warp_image(background, out.ground_truth);
  SplitMix64 rng(camera.noise_seed);
  apply_camera(out.reference, rng, camera);
  apply_camera(out.distorted, rng, camera);
  out.geometry = geom;
  out.constants = consts;
  out.field = field;
  out.camera = camera;
  return out;
}

SimOutput simulate_pair(const PatternSpec& pattern, const RefractiveField& field,
                        const BosGeometry& geom, const OpticsConstants& consts,
                        const CameraModel& camera) {
  return simulate_pair(generate_pattern(pattern), field, geom, consts, camera);
}

}  // namespace bos
