#include "bos/image.hpp"

namespace bos {

RgbImage::RgbImage(int width, int height, float r, float g, float b)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("raster dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
  data_.resize(3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = r;
    data_[i + 1] = g;
    data_[i + 2] = b;
  }
}

void RgbImage::set(int x, int y, float r, float g, float b) noexcept {
  const std::size_t o = offset(x, y);
  data_[o] = r;
  data_[o + 1] = g;
  data_[o + 2] = b;
}

RgbImage RgbImage::from_gray(const GrayImage& gray) {
  RgbImage out(gray.width(), gray.height());
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      const float g = gray(x, y);
      out.set(x, y, g, g, g);
    }
  }
  return out;
}

Mask rect_mask(int width, int height, int x0, int y0, int rect_width, int rect_height) {
  Mask mask(width, height, 0);
  const int x_begin = std::clamp(x0, 0, width);
  const int y_begin = std::clamp(y0, 0, height);
  const int x_end = std::clamp(x0 + rect_width, 0, width);
  const int y_end = std::clamp(y0 + rect_height, 0, height);
  for (int y = y_begin; y < y_end; ++y) {
    for (int x = x_begin; x < x_end; ++x) {
      mask(x, y) = 1;
    }
  }
  return mask;
}

DisplacementField::DisplacementField(int width, int height)
    : u(width, height, 0.f), v(width, height, 0.f) {}

DisplacementField DisplacementField::constant(int width, int height, float du, float dv) {
  DisplacementField field(width, height);
  std::fill(field.u.pixels().begin(), field.u.pixels().end(), du);
  std::fill(field.v.pixels().begin(), field.v.pixels().end(), dv);
  return field;
}

void DisplacementField::validate() const {
  if (u.empty() || !u.same_shape(v)) {
    throw DimensionMismatch("displacement components must be non-empty and equally sized");
  }
  if (grid_step < 1) {
    throw InvalidArgument("grid_step must be >= 1, got " + std::to_string(grid_step));
  }
  if (!valid.empty() && valid.size() != u.size()) {
    throw DimensionMismatch("validity mask length does not match the grid");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u.pixels()[i]) || !std::isfinite(v.pixels()[i])) {
      throw InvalidArgument("displacement field contains non-finite components");
    }
  }
}

}  // namespace bos
