#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bos/error.hpp"

namespace bos {

/// Row-major 2-D raster. Coordinates are (x, y) = (column, row).
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;

  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Plane(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw DimensionMismatch("raster data length " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

  /// Clamp-to-edge access; (x, y) may lie anywhere.
  const T& clamped(int x, int y) const noexcept {
    return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }
  std::span<T> row(int y) noexcept { return {data_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const noexcept {
    return {data_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }

  bool same_shape(const Plane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  template <typename U>
  bool same_shape(const Plane<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw InvalidArgument("raster dimensions must be positive, got " + std::to_string(width) +
                            "x" + std::to_string(height));
    }
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Scalar intensity raster, values normalized to [0, 1].
class GrayImage : public Plane<float> {
 public:
  using Plane<float>::Plane;
  GrayImage(Plane<float> plane) : Plane<float>(std::move(plane)) {}  // NOLINT(google-explicit-constructor)
};

/// Interleaved RGB raster, channel values in [0, 1].
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, float r = 0.f, float g = 0.f, float b = 0.f);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  float& at(int x, int y, int channel) noexcept { return data_[offset(x, y) + channel]; }
  float at(int x, int y, int channel) const noexcept { return data_[offset(x, y) + channel]; }
  void set(int x, int y, float r, float g, float b) noexcept;

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  static RgbImage from_gray(const GrayImage& gray);

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x));
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Binary region; nonzero entries are members.
using Mask = Plane<std::uint8_t>;

Mask rect_mask(int width, int height, int x0, int y0, int rect_width, int rect_height);

/// Per-grid-point displacement in pixels.
///
/// Dense fields have grid_step 1 and origin (0, 0). Sparse fields place grid
/// point (i, j) at source-image pixel (origin_x + i*grid_step,
/// origin_y + j*grid_step). Sign convention: a feature at reference position
/// x appears at x + d(x) in the target, i.e. target(x) = reference(x - d(x)).
struct DisplacementField {
  Plane<float> u;
  Plane<float> v;
  int grid_step = 1;
  int origin_x = 0;
  int origin_y = 0;
  /// Empty means every vector is valid.
  std::vector<std::uint8_t> valid;

  DisplacementField() = default;
  DisplacementField(int width, int height);

  static DisplacementField constant(int width, int height, float u, float v);

  int width() const noexcept { return u.width(); }
  int height() const noexcept { return u.height(); }
  bool dense() const noexcept { return grid_step == 1 && origin_x == 0 && origin_y == 0; }
  bool is_valid(int x, int y) const noexcept {
    return valid.empty() || valid[static_cast<std::size_t>(y) * width() + x] != 0;
  }
  double grid_x(int i) const noexcept { return origin_x + static_cast<double>(i) * grid_step; }
  double grid_y(int j) const noexcept { return origin_y + static_cast<double>(j) * grid_step; }

  /// Throws if the representation invariants are broken.
  void validate() const;

  friend bool operator==(const DisplacementField&, const DisplacementField&) = default;
};

/// Bilinear interpolation with clamp-to-edge outside [0, w-1] x [0, h-1].
template <typename T>
double sample_bilinear(const Plane<T>& img, double x, double y) noexcept {
  const double cx = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(cx);
  const int y0 = static_cast<int>(cy);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  const double top = (1.0 - fx) * img(x0, y0) + fx * img(x1, y0);
  const double bottom = (1.0 - fx) * img(x0, y1) + fx * img(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

}  // namespace bos
