#include <cmath>
#include <string>
#include <vector>

#include "bos/reconstruct.hpp"

namespace bos {

SubpixelFit parse_subpixel_fit(std::string_view name) {
  if (name == "gaussian3") return SubpixelFit::gaussian3;
  if (name == "parabolic") return SubpixelFit::parabolic;
  if (name == "none") return SubpixelFit::none;
  throw InvalidArgument("unknown subpixel fit '" + std::string(name) +
                        "' (expected gaussian3, parabolic or none)");
}

void CorrConfig::validate(int image_width, int image_height) const {
  if (window < 8) throw InvalidArgument("correlation window must be >= 8 px");
  if (search < 1) throw InvalidArgument("correlation search must be >= 1 px");
  if (step < 1) throw InvalidArgument("correlation step must be >= 1 px");
  if (window + 2 * search > std::min(image_width, image_height)) {
    throw InvalidArgument("correlation window + 2*search (" + std::to_string(window + 2 * search) +
                          " px) exceeds the image size " + std::to_string(image_width) + "x" +
                          std::to_string(image_height));
  }
}

double subpixel_offset(double c_minus, double c_zero, double c_plus, SubpixelFit fit) noexcept {
  if (fit == SubpixelFit::none) {
    return 0.0;
  }
  if (fit == SubpixelFit::gaussian3 && c_minus > 0.0 && c_zero > 0.0 && c_plus > 0.0) {
    const double lm = std::log(c_minus);
    const double l0 = std::log(c_zero);
    const double lp = std::log(c_plus);
    const double denom = 2.0 * lm - 4.0 * l0 + 2.0 * lp;
    return denom < 0.0 ? (lm - lp) / denom : 0.0;
  }
  const double denom = 2.0 * c_minus - 4.0 * c_zero + 2.0 * c_plus;
  return denom < 0.0 ? (c_minus - c_plus) / denom : 0.0;
}

namespace {

// (w+1) x (h+1) summed-area table.
std::vector<double> integral(const GrayImage& img, bool squared) {
  const int w = img.width();
  const int h = img.height();
  std::vector<double> s(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      const double p = img(x, y);
      row += squared ? p * p : p;
      s[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
          s[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
    }
  }
  return s;
}

double box_sum(const std::vector<double>& s, int stride, int x, int y, int n) {
  const auto at = [&](int xx, int yy) { return s[static_cast<std::size_t>(yy) * stride + xx]; };
  return at(x + n, y + n) - at(x, y + n) - at(x + n, y) + at(x, y);
}

}  // namespace

CorrelationResult cross_correlate(const GrayImage& reference, const GrayImage& target,
                                  const CorrConfig& cfg) {
  if (!reference.same_shape(target)) {
    throw DimensionMismatch("cross_correlate frames differ in size");
  }
  cfg.validate(reference.width(), reference.height());

  const int w = reference.width();
  const int h = reference.height();
  const int n = cfg.window;
  const int half = n / 2;
  const int s = cfg.search;
  const int span = 2 * s + 1;
  const int gw = (w - 2 * s - n) / cfg.step + 1;
  const int gh = (h - 2 * s - n) / cfg.step + 1;
  const double count = static_cast<double>(n) * n;

  const std::vector<double> sum_t = integral(target, false);
  const std::vector<double> sum_t2 = integral(target, true);

  CorrelationResult result;
  result.field = DisplacementField(gw, gh);
  result.field.grid_step = cfg.step;
  result.field.origin_x = s + half;
  result.field.origin_y = s + half;
  result.field.valid.assign(static_cast<std::size_t>(gw) * gh, 0);
  result.peak = Plane<float>(gw, gh, 0.f);

  std::vector<double> centered(static_cast<std::size_t>(n) * n);
  std::vector<double> surface(static_cast<std::size_t>(span) * span);

  for (int j = 0; j < gh; ++j) {
    for (int i = 0; i < gw; ++i) {
      const int wx = s + i * cfg.step;
      const int wy = s + j * cfg.step;

      double mean_r = 0.0;
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) mean_r += reference(wx + x, wy + y);
      }
      mean_r /= count;
      double var_r = 0.0;
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          const double c = reference(wx + x, wy + y) - mean_r;
          centered[static_cast<std::size_t>(y) * n + x] = c;
          var_r += c * c;
        }
      }

      for (int oy = -s; oy <= s; ++oy) {
        for (int ox = -s; ox <= s; ++ox) {
          const int tx = wx + ox;
          const int ty = wy + oy;
          const double st = box_sum(sum_t, w + 1, tx, ty, n);
          const double st2 = box_sum(sum_t2, w + 1, tx, ty, n);
          const double var_t = std::max(0.0, st2 - st * st / count);
          double num = 0.0;
          for (int y = 0; y < n; ++y) {
            const float* trow = target.row(ty + y).data() + tx;
            const double* crow = centered.data() + static_cast<std::size_t>(y) * n;
            for (int x = 0; x < n; ++x) num += crow[x] * trow[x];
          }
          const double denom = std::sqrt(var_r * var_t);
          surface[static_cast<std::size_t>(oy + s) * span + (ox + s)] =
              denom > 1e-12 ? num / denom : 0.0;
        }
      }

      std::size_t best = 0;
      for (std::size_t k = 1; k < surface.size(); ++k) {
        if (surface[k] > surface[best]) best = k;
      }
      const int by = static_cast<int>(best) / span;
      const int bx = static_cast<int>(best) % span;
      const double c0 = surface[best];
      result.peak(i, j) = static_cast<float>(c0);
      if (!(c0 >= cfg.min_peak)) {
        continue;
      }

      double du = bx - s;
      double dv = by - s;
      if (c0 < 1.0 - 1e-9) {
        const auto at = [&](int xx, int yy) {
          return surface[static_cast<std::size_t>(yy) * span + xx];
        };
        if (bx > 0 && bx < span - 1) {
          du += subpixel_offset(at(bx - 1, by), c0, at(bx + 1, by), cfg.subpixel);
        }
        if (by > 0 && by < span - 1) {
          dv += subpixel_offset(at(bx, by - 1), c0, at(bx, by + 1), cfg.subpixel);
        }
      }
      result.field.u(i, j) = static_cast<float>(du);
      result.field.v(i, j) = static_cast<float>(dv);
      result.field.valid[static_cast<std::size_t>(j) * gw + i] = 1;
    }
  }
  return result;
}

}  // namespace bos
