#pragma once

namespace bos {

/// Physical layout of a BOS setup, SI units throughout.
///
///   camera --- d1 --- object --- d2 --- background
///
/// The lens-to-background distance is d3 = d1 + d2 and must exceed the focal
/// length for a real image to form.
struct BosGeometry {
  double d1 = 0.47;            ///< camera to object, m
  double d2 = 0.35;            ///< object to background, m
  double f = 4.73e-3;          ///< focal length, m
  double pixel_pitch = 1.6e-6; ///< sensor pixel size, m
  double bg_scale = 0.210 / 1920.0;  ///< background-image pixel size on the background plane, m/px

  double d3() const noexcept { return d1 + d2; }
  /// Thin-lens ratio from background plane to sensor plane, f / (d3 - f).
  double magnification() const;
  void validate() const;
};

struct OpticsConstants {
  double n0 = 1.000292;            ///< ambient refractive index
  double gladstone_dale = 2.23e-4; ///< m^3/kg

  void validate() const;
};

/// Ray deflection angle in radians.
struct Deflection {
  double alpha = 0.0;
};

struct SensorDisplacement {
  double meters = 0.0;
  double pixels = 0.0;
};

/// alpha = Z * dn/dx / n0 for an object of thickness Z. Warns outside the
/// small-angle regime (|alpha| > 1e-2).
Deflection deflection_from_index_gradient(double dn_dx, double thickness_z,
                                          const OpticsConstants& consts = {});

/// Apparent shift on the background plane, d2 * alpha (m).
double background_displacement(Deflection deflection, const BosGeometry& geom);

/// d2 * alpha * f / (d3 - f), in meters and in sensor pixels.
SensorDisplacement sensor_displacement(Deflection deflection, const BosGeometry& geom);

/// Gladstone-Dale: rho = (n - 1) / G.
double density_from_index(double n, const OpticsConstants& consts = {});
double index_from_density(double rho, const OpticsConstants& consts = {});

/// Inverts the full chain from a sensor-pixel displacement to d(rho)/dx (kg/m^4).
double density_gradient_from_pixels(double disp_px, const BosGeometry& geom,
                                    const OpticsConstants& consts, double thickness_z);

/// Size in camera pixels of a feature spanning `cell_px` background-image pixels.
double imaged_cell_pixels(double cell_px, const BosGeometry& geom);

}  // namespace bos
