#include "bos/render.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bos/metrics.hpp"

namespace bos {

Colormap parse_colormap(std::string_view name) {
  if (name == "jet") return Colormap::jet;
  if (name == "gray" || name == "grayscale") return Colormap::grayscale;
  throw InvalidArgument("unknown colormap '" + std::string(name) + "' (expected jet or gray)");
}

void RenderConfig::validate() const {
  if (stride < 1) throw InvalidArgument("vector stride must be >= 1");
  if (!(scale > 0.0)) throw InvalidArgument("vector scale must be > 0");
  if (max_px && !(*max_px > 0.0)) throw InvalidArgument("fixed normalization max must be > 0");
}

std::array<float, 3> colormap(double t, Colormap map) {
  t = std::isfinite(t) ? std::clamp(t, 0.0, 1.0) : 0.0;
  if (map == Colormap::grayscale) {
    const auto g = static_cast<float>(t);
    return {g, g, g};
  }
  static constexpr std::array<std::array<double, 3>, 5> kStops{{
      {0.0, 0.0, 0.5},  // dark blue
      {0.0, 1.0, 1.0},  // cyan
      {1.0, 1.0, 0.0},  // yellow
      {1.0, 0.5, 0.0},  // orange
      {1.0, 0.0, 0.0},  // red
  }};
  const double pos = t * 4.0;
  const int k = std::min(static_cast<int>(pos), 3);
  const double f = pos - k;
  std::array<float, 3> c{};
  for (int ch = 0; ch < 3; ++ch) {
    c[ch] = static_cast<float>((1.0 - f) * kStops[k][ch] + f * kStops[k + 1][ch]);
  }
  return c;
}

RgbImage magnitude_map(const DisplacementField& field, const RenderConfig& cfg) {
  cfg.validate();
  const Plane<float> mag = magnitude(field);
  const double max = cfg.max_px ? *cfg.max_px : magnitude_stats(field).max;
  RgbImage out(field.width(), field.height());
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      double t = 0.0;
      if (max > 0.0 && field.is_valid(x, y)) {
        t = mag(x, y) >= max ? 1.0 : mag(x, y) / max;
      }
      const auto c = colormap(t, cfg.colormap);
      out.set(x, y, c[0], c[1], c[2]);
    }
  }
  return out;
}

namespace {

void plot(RgbImage& img, int x, int y, const std::array<float, 3>& color) {
  if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
  img.set(x, y, color[0], color[1], color[2]);
}

// Bresenham.
void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, const std::array<float, 3>& color) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    plot(img, x0, y0, color);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

constexpr double kMinArrowPx = 0.05;
constexpr double kHeadLength = 4.0;

}  // namespace

Overlay vector_overlay(const DisplacementField& field, const RgbImage& base,
                       const RenderConfig& cfg) {
  cfg.validate();
  const double extent_x = field.grid_x(field.width() - 1);
  const double extent_y = field.grid_y(field.height() - 1);
  if (extent_x >= base.width() || extent_y >= base.height()) {
    throw DimensionMismatch("vector_overlay base image is smaller than the field extent");
  }
  Overlay out{base, 0};
  const int every = std::max(1, cfg.stride / field.grid_step);
  for (int j = 0; j < field.height(); j += every) {
    for (int i = 0; i < field.width(); i += every) {
      if (!field.is_valid(i, j)) continue;
      const double u = field.u(i, j);
      const double v = field.v(i, j);
      const double len = std::sqrt(u * u + v * v);
      if (len < kMinArrowPx) continue;
      const double x0 = field.grid_x(i);
      const double y0 = field.grid_y(j);
      const double x1 = x0 + cfg.scale * u;
      const double y1 = y0 + cfg.scale * v;
      const int ix1 = static_cast<int>(std::lround(x1));
      const int iy1 = static_cast<int>(std::lround(y1));
      draw_line(out.image, static_cast<int>(x0), static_cast<int>(y0), ix1, iy1, cfg.arrow_color);
      const double back = std::atan2(-v, -u);
      for (double side : {-1.0, 1.0}) {
        const double a = back + side * std::numbers::pi / 6.0;
        draw_line(out.image, ix1, iy1, static_cast<int>(std::lround(x1 + kHeadLength * std::cos(a))),
                  static_cast<int>(std::lround(y1 + kHeadLength * std::sin(a))), cfg.arrow_color);
      }
      ++out.arrows;
    }
  }
  return out;
}

RgbImage side_by_side(const std::vector<RgbImage>& images) {
  if (images.empty()) {
    throw InvalidArgument("side_by_side needs at least one image");
  }
  constexpr int kGutter = 4;
  const int h = images.front().height();
  int total = 0;
  for (const RgbImage& img : images) {
    if (img.height() != h) throw DimensionMismatch("side_by_side images differ in height");
    total += img.width();
  }
  total += kGutter * static_cast<int>(images.size() - 1);
  RgbImage out(total, h, 1.f, 1.f, 1.f);
  int x_offset = 0;
  for (const RgbImage& img : images) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < img.width(); ++x) {
        out.set(x_offset + x, y, img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      }
    }
    x_offset += img.width() + kGutter;
  }
  return out;
}

}  // namespace bos
