#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "bos/image.hpp"

namespace bos {

enum class Colormap { grayscale, jet };

Colormap parse_colormap(std::string_view name);

struct RenderConfig {
  Colormap colormap = Colormap::jet;
  int stride = 16;        ///< px between drawn vectors
  double scale = 10.0;    ///< display px per displacement px
  /// Fixed normalization maximum in px; auto-max when empty.
  std::optional<double> max_px;
  std::array<float, 3> arrow_color{1.f, 0.f, 0.f};

  void validate() const;
};

/// Piecewise-linear map of t in [0, 1] (clamped). The jet-like map runs dark
/// blue (0) -> cyan (0.25) -> yellow (0.5) -> orange (0.75) -> red (1).
std::array<float, 3> colormap(double t, Colormap map);

/// One pixel per grid point, colored by |d| / max.
RgbImage magnitude_map(const DisplacementField& field, const RenderConfig& cfg = {});

struct Overlay {
  RgbImage image;
  std::size_t arrows = 0;
};

/// Arrows from each stride-th grid point p to p + scale * d, with a fixed
/// two-segment head at +-30 degrees. Vectors under 0.05 px are skipped.
Overlay vector_overlay(const DisplacementField& field, const RgbImage& base,
                       const RenderConfig& cfg = {});

/// Horizontal concatenation with 4 px white gutters.
RgbImage side_by_side(const std::vector<RgbImage>& images);

}  // namespace bos
