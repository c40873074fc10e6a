#pragma once

#include <cstdint>

#include "bos/image.hpp"
#include "bos/optics.hpp"
#include "bos/patterns.hpp"

namespace bos {

enum class FieldKind { uniform, gaussian_plume };

/// Refractive-index disturbance over the background image plane.
///
/// gaussian_plume: n(x, y) = n0 - delta_n * exp(-r^2 / (2 sigma^2)), with r
/// measured in background-image pixels from (cx, cy).
struct RefractiveField {
  FieldKind kind = FieldKind::gaussian_plume;
  double cx = 0.0;
  double cy = 0.0;
  double sigma_px = 40.0;
  double delta_n = 2e-4;
  double thickness_z = 0.05;  ///< m

  void validate() const;
};

double index_at(const RefractiveField& field, double x, double y, const OpticsConstants& consts = {});

/// Analytic (dn/dx, dn/dy) per background-image pixel.
struct IndexGradient {
  double dx = 0.0;
  double dy = 0.0;
};
IndexGradient index_gradient_px(const RefractiveField& field, double x, double y);

/// Dense background-pixel displacement from the analytic index gradient
/// through deflection and background displacement.
/// Convention: distorted(x) = reference(x - d(x)).
DisplacementField ground_truth_field(const RefractiveField& field, const BosGeometry& geom,
                                     const OpticsConstants& consts, int width, int height);

/// Peak |d| of a gaussian plume in background pixels: attained on r = sigma.
double plume_peak_displacement_px(const RefractiveField& field, const BosGeometry& geom,
                                  const OpticsConstants& consts = {});

/// delta_n giving the requested peak displacement for the plume's sigma and Z.
double delta_n_for_peak(double peak_px, const RefractiveField& field, const BosGeometry& geom,
                        const OpticsConstants& consts = {});

/// output(x) = sample_bilinear(background, x - d(x)).
GrayImage warp_image(const GrayImage& background, const DisplacementField& field);

struct CameraModel {
  double noise_sigma = 0.0;  ///< additive Gaussian, intensity units
  std::uint64_t noise_seed = 0;
  bool quantize = false;     ///< round both rasters to 8-bit levels
};

struct SimOutput {
  GrayImage reference;
  GrayImage distorted;
  DisplacementField ground_truth;
  BosGeometry geometry;
  OpticsConstants constants;
  RefractiveField field;
  CameraModel camera;
};

/// Reference is the clean background; distorted is the background warped by
/// the ground truth. Each gets independent noise (reference first, from one
/// PRNG stream), is clamped to [0, 1], then optionally quantized.
SimOutput simulate_pair(const GrayImage& background, const RefractiveField& field,
                        const BosGeometry& geom, const OpticsConstants& consts,
                        const CameraModel& camera);
SimOutput simulate_pair(const PatternSpec& pattern, const RefractiveField& field,
                        const BosGeometry& geom, const OpticsConstants& consts,
                        const CameraModel& camera);

}  // namespace bos
