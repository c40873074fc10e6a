#include <cmath>

#include "bos/reconstruct.hpp"

namespace bos {
namespace {

struct Derivatives {
  Plane<double> ix;
  Plane<double> iy;
  Plane<double> it;
};

// Pair-averaged 2x2x2 stencils over (reference, target); all three derivatives
// are centered on the same point (x + 1/2, y + 1/2, t + 1/2).
Derivatives derivatives(const GrayImage& a, const GrayImage& b) {
  const int w = a.width();
  const int h = a.height();
  Derivatives d{Plane<double>(w, h), Plane<double>(w, h), Plane<double>(w, h)};
  for (int y = 0; y < h; ++y) {
    const int y1 = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int x1 = std::min(x + 1, w - 1);
      const double a00 = a(x, y), a10 = a(x1, y), a01 = a(x, y1), a11 = a(x1, y1);
      const double b00 = b(x, y), b10 = b(x1, y), b01 = b(x, y1), b11 = b(x1, y1);
      d.ix(x, y) = 0.25 * ((a10 - a00) + (a11 - a01) + (b10 - b00) + (b11 - b01));
      d.iy(x, y) = 0.25 * ((a01 - a00) + (a11 - a10) + (b01 - b00) + (b11 - b10));
      d.it(x, y) = 0.25 * ((b00 - a00) + (b10 - a10) + (b01 - a01) + (b11 - a11));
    }
  }
  return d;
}

// 4-neighbour mean with clamp-to-edge.
void neighbour_mean(const Plane<double>& f, Plane<double>& out) {
  const int w = f.width();
  const int h = f.height();
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0);
      const int xp = std::min(x + 1, w - 1);
      out(x, y) = 0.25 * (f(xm, y) + f(xp, y) + f(x, ym) + f(x, yp));
    }
  }
}

double energy(const Derivatives& d, const Plane<double>& u, const Plane<double>& v, double alpha) {
  const int w = u.width();
  const int h = u.height();
  double data = 0.0;
  double smooth = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = d.ix(x, y) * u(x, y) + d.iy(x, y) * v(x, y) + d.it(x, y);
      data += r * r;
      if (x + 1 < w) {
        const double du = u(x + 1, y) - u(x, y);
        const double dv = v(x + 1, y) - v(x, y);
        smooth += du * du + dv * dv;
      }
      if (y + 1 < h) {
        const double du = u(x, y + 1) - u(x, y);
        const double dv = v(x, y + 1) - v(x, y);
        smooth += du * du + dv * dv;
      }
    }
  }
  return data + 0.25 * alpha * alpha * smooth;
}

}  // namespace

double horn_schunck_energy(const GrayImage& reference, const GrayImage& target,
                           const DisplacementField& field, double alpha) {
  if (!reference.same_shape(target) || !reference.same_shape(field.u)) {
    throw DimensionMismatch("horn_schunck_energy inputs differ in size");
  }
  const Derivatives d = derivatives(reference, target);
  Plane<double> u(field.width(), field.height());
  Plane<double> v(field.width(), field.height());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u.pixels()[i] = field.u.pixels()[i];
    v.pixels()[i] = field.v.pixels()[i];
  }
  return energy(d, u, v, alpha);
}

DisplacementField horn_schunck_level(const GrayImage& reference, const GrayImage& target,
                                     const FlowConfig& cfg, const IterationObserver* observer) {
  if (!reference.same_shape(target)) {
    throw DimensionMismatch("horn_schunck frames differ in size");
  }
  const int w = reference.width();
  const int h = reference.height();
  const Derivatives d = derivatives(reference, target);
  const double a2 = cfg.alpha * cfg.alpha;

  Plane<double> u(w, h, 0.0);
  Plane<double> v(w, h, 0.0);
  Plane<double> ubar(w, h);
  Plane<double> vbar(w, h);

  const bool observe = observer && observer->callback && observer->every > 0;
  if (observe) {
    observer->callback(0, energy(d, u, v, cfg.alpha));
  }
  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    neighbour_mean(u, ubar);
    neighbour_mean(v, vbar);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double gx = d.ix.pixels()[i];
      const double gy = d.iy.pixels()[i];
      const double ub = ubar.pixels()[i];
      const double vb = vbar.pixels()[i];
      const double t = (gx * ub + gy * vb + d.it.pixels()[i]) / (a2 + gx * gx + gy * gy);
      u.pixels()[i] = ub - gx * t;
      v.pixels()[i] = vb - gy * t;
    }
    if (observe && iter % observer->every == 0) {
      observer->callback(iter, energy(d, u, v, cfg.alpha));
    }
  }

  DisplacementField out(w, h);
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.u.pixels()[i] = static_cast<float>(u.pixels()[i]);
    out.v.pixels()[i] = static_cast<float>(v.pixels()[i]);
  }
  return out;
}

}  // namespace bos
