#include <cmath>
#include <vector>

#include "bos/filters.hpp"
#include "bos/reconstruct.hpp"

namespace bos {
namespace {

// Local quadratic model f(p) ~ p^T A p + b^T p + c around every pixel, with
// A = [[rxx, rxy/2], [rxy/2, ryy]] and b = (bx, by).
struct Expansion {
  Plane<double> bx, by, rxx, ryy, rxy;
};

// Gaussian-weighted least squares onto {1, x, y, x^2, y^2, xy}. The
// applicability is separable, so the six moments come from two 1-D passes and
// the normal equations decouple into closed form.
Expansion expand(const GrayImage& img, int half_width, double sigma) {
  const int w = img.width();
  const int h = img.height();
  const int n = half_width;

  std::vector<double> g(2 * n + 1);
  double gsum = 0.0;
  for (int k = -n; k <= n; ++k) {
    g[k + n] = std::exp(-0.5 * k * k / (sigma * sigma));
    gsum += g[k + n];
  }
  double mu2 = 0.0;
  double mu4 = 0.0;
  for (int k = -n; k <= n; ++k) {
    g[k + n] /= gsum;
    mu2 += g[k + n] * k * k;
    mu4 += g[k + n] * k * k * k * k;
  }

  // Vertical pass: sum_k g(k) k^p f(x, y + k) for p = 0, 1, 2.
  Plane<double> v0(w, h), v1(w, h), v2(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s0 = 0.0, s1 = 0.0, s2 = 0.0;
      for (int k = -n; k <= n; ++k) {
        const double t = g[k + n] * img.clamped(x, y + k);
        s0 += t;
        s1 += t * k;
        s2 += t * k * k;
      }
      v0(x, y) = s0;
      v1(x, y) = s1;
      v2(x, y) = s2;
    }
  }

  Expansion e{Plane<double>(w, h), Plane<double>(w, h), Plane<double>(w, h),
              Plane<double>(w, h), Plane<double>(w, h)};
  const double inv_mu2 = 1.0 / mu2;
  const double inv_quad = 1.0 / (mu4 - mu2 * mu2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double m1 = 0.0, mx = 0.0, mxx = 0.0, my = 0.0, myy = 0.0, mxy = 0.0;
      for (int k = -n; k <= n; ++k) {
        const int xx = std::clamp(x + k, 0, w - 1);
        const double gk = g[k + n];
        const double a0 = gk * v0(xx, y);
        const double a1 = gk * v1(xx, y);
        m1 += a0;
        mx += a0 * k;
        mxx += a0 * k * k;
        my += a1;
        mxy += a1 * k;
        myy += gk * v2(xx, y);
      }
      e.bx(x, y) = mx * inv_mu2;
      e.by(x, y) = my * inv_mu2;
      e.rxx(x, y) = (mxx - mu2 * m1) * inv_quad;
      e.ryy(x, y) = (myy - mu2 * m1) * inv_quad;
      e.rxy(x, y) = mxy * inv_mu2 * inv_mu2;
    }
  }
  return e;
}

// Determinant regularizer; matches 1e-3 on a 0-255 intensity scale.
constexpr double kDetEpsilon = 1e-3 / (255.0 * 255.0 * 255.0 * 255.0);

// Each solve is damped toward the current estimate with a weight relative to
// the mean structure-tensor trace. Untextured windows then keep the estimate
// instead of amplifying noise; the fixed point is unchanged.
constexpr double kDamping = 0.02;

}  // namespace

DisplacementField farneback_level(const GrayImage& reference, const GrayImage& target,
                                  const FlowConfig& cfg) {
  if (!reference.same_shape(target)) {
    throw DimensionMismatch("farneback frames differ in size");
  }
  const int w = reference.width();
  const int h = reference.height();
  const Expansion e1 = expand(reference, cfg.poly_n, cfg.poly_sigma);
  const Expansion e2 = expand(target, cfg.poly_n, cfg.poly_sigma);
  const int radius = cfg.window / 2;

  Plane<double> du(w, h, 0.0);
  Plane<double> dv(w, h, 0.0);
  Plane<double> g11(w, h), g12(w, h), g22(w, h), h1(w, h), h2(w, h);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = du(x, y);
        const double dy = dv(x, y);
        // Target coefficients at the displaced position.
        const double px = x + dx;
        const double py = y + dy;
        const double bx2 = sample_bilinear(e2.bx, px, py);
        const double by2 = sample_bilinear(e2.by, px, py);
        const double rxx2 = sample_bilinear(e2.rxx, px, py);
        const double ryy2 = sample_bilinear(e2.ryy, px, py);
        const double rxy2 = sample_bilinear(e2.rxy, px, py);

        const double a11 = 0.5 * (e1.rxx(x, y) + rxx2);
        const double a22 = 0.5 * (e1.ryy(x, y) + ryy2);
        const double a12 = 0.25 * (e1.rxy(x, y) + rxy2);
        // f2(p) = f1(p - d)  =>  A d = A d_prev - (b2 - b1) / 2
        const double db1 = -0.5 * (bx2 - e1.bx(x, y)) + a11 * dx + a12 * dy;
        const double db2 = -0.5 * (by2 - e1.by(x, y)) + a12 * dx + a22 * dy;

        g11(x, y) = a11 * a11 + a12 * a12;
        g12(x, y) = a12 * (a11 + a22);
        g22(x, y) = a12 * a12 + a22 * a22;
        h1(x, y) = a11 * db1 + a12 * db2;
        h2(x, y) = a12 * db1 + a22 * db2;
      }
    }
    const Plane<double> s11 = box_blur(g11, radius);
    const Plane<double> s12 = box_blur(g12, radius);
    const Plane<double> s22 = box_blur(g22, radius);
    const Plane<double> t1 = box_blur(h1, radius);
    const Plane<double> t2 = box_blur(h2, radius);
    double trace = 0.0;
    for (std::size_t i = 0; i < du.size(); ++i) {
      trace += s11.pixels()[i] + s22.pixels()[i];
    }
    const double lam = kDamping * trace / (2.0 * static_cast<double>(du.size()));
    for (std::size_t i = 0; i < du.size(); ++i) {
      const double a = s11.pixels()[i] + lam;
      const double b = s12.pixels()[i];
      const double c = s22.pixels()[i] + lam;
      const double idet = 1.0 / (a * c - b * b + kDetEpsilon);
      const double r1 = t1.pixels()[i] + lam * du.pixels()[i];
      const double r2 = t2.pixels()[i] + lam * dv.pixels()[i];
      du.pixels()[i] = (c * r1 - b * r2) * idet;
      dv.pixels()[i] = (a * r2 - b * r1) * idet;
    }
  }

  DisplacementField out(w, h);
  for (std::size_t i = 0; i < du.size(); ++i) {
    out.u.pixels()[i] = static_cast<float>(du.pixels()[i]);
    out.v.pixels()[i] = static_cast<float>(dv.pixels()[i]);
  }
  return out;
}

}  // namespace bos
