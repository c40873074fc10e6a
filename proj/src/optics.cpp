#include "bos/optics.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "bos/error.hpp"
#include "bos/log.hpp"

namespace bos {

void BosGeometry::validate() const {
  if (!(d1 > 0.0 && d2 > 0.0 && f > 0.0 && pixel_pitch > 0.0 && bg_scale > 0.0)) {
    throw InvalidArgument("geometry distances, focal length, pixel pitch and bg_scale must be > 0");
  }
  if (!(d3() > f)) {
    throw InvalidArgument("d3 = d1 + d2 must exceed the focal length (no real image)");
  }
}

double BosGeometry::magnification() const {
  validate();
  return f / (d3() - f);
}

void OpticsConstants::validate() const {
  if (!(n0 > 1.0 - 1e-6)) {
    throw InvalidArgument("ambient refractive index n0 must be >= 1");
  }
  if (!(gladstone_dale > 0.0)) {
    throw InvalidArgument("Gladstone-Dale constant must be > 0");
  }
}

Deflection deflection_from_index_gradient(double dn_dx, double thickness_z,
                                          const OpticsConstants& consts) {
  consts.validate();
  if (!(thickness_z > 0.0)) {
    throw InvalidArgument("object thickness Z must be > 0");
  }
  const Deflection d{thickness_z * dn_dx / consts.n0};
  if (std::abs(d.alpha) > 1e-2) {
    std::ostringstream msg;
    msg << "deflection " << d.alpha << " rad is outside the small-angle regime";
    warn(msg.str());
  }
  return d;
}

double background_displacement(Deflection deflection, const BosGeometry& geom) {
  return geom.d2 * deflection.alpha;
}

SensorDisplacement sensor_displacement(Deflection deflection, const BosGeometry& geom) {
  const double meters = geom.d2 * deflection.alpha * geom.magnification();
  return {meters, meters / geom.pixel_pitch};
}

double density_from_index(double n, const OpticsConstants& consts) {
  consts.validate();
  if (!(n >= 1.0)) {
    throw InvalidArgument("refractive index below 1 is nonphysical for Gladstone-Dale");
  }
  return (n - 1.0) / consts.gladstone_dale;
}

double index_from_density(double rho, const OpticsConstants& consts) {
  consts.validate();
  if (!(rho >= 0.0)) {
    throw InvalidArgument("density must be >= 0");
  }
  return 1.0 + consts.gladstone_dale * rho;
}

double density_gradient_from_pixels(double disp_px, const BosGeometry& geom,
                                    const OpticsConstants& consts, double thickness_z) {
  geom.validate();
  consts.validate();
  if (!(thickness_z > 0.0)) {
    throw InvalidArgument("object thickness Z must be > 0");
  }
  return disp_px * geom.pixel_pitch * (geom.d3() - geom.f) * consts.n0 /
         (geom.d2 * geom.f * thickness_z * consts.gladstone_dale);
}

double imaged_cell_pixels(double cell_px, const BosGeometry& geom) {
  return cell_px * geom.bg_scale * geom.magnification() / geom.pixel_pitch;
}

}  // namespace bos
