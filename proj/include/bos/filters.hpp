#pragma once

#include <cmath>
#include <vector>

#include "bos/image.hpp"

namespace bos {

/// Normalized 1-D Gaussian taps for radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable correlation with a symmetric kernel of odd length, clamp-to-edge.
template <typename T>
Plane<T> convolve_separable(const Plane<T>& src, const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = src.width();
  const int h = src.height();
  Plane<double> tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * src.clamped(x + k, y);
      }
      tmp(x, y) = acc;
    }
  }
  Plane<T> out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp.clamped(x, y + k);
      }
      out(x, y) = static_cast<T>(acc);
    }
  }
  return out;
}

template <typename T>
Plane<T> gaussian_blur(const Plane<T>& src, double sigma) {
  if (sigma <= 0.0) {
    return src;
  }
  return convolve_separable(src, gaussian_kernel(sigma));
}

/// Mean over a (2r+1) x (2r+1) box, clamp-to-edge. Running sums keep it O(1) per pixel.
template <typename T>
Plane<T> box_blur(const Plane<T>& src, int radius) {
  if (radius <= 0) {
    return src;
  }
  const int w = src.width();
  const int h = src.height();
  const double norm = 1.0 / (2 * radius + 1);
  Plane<double> tmp(w, h);
  for (int y = 0; y < h; ++y) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      acc += src.clamped(k, y);
    }
    for (int x = 0; x < w; ++x) {
      tmp(x, y) = acc * norm;
      acc += static_cast<double>(src.clamped(x + radius + 1, y)) - src.clamped(x - radius, y);
    }
  }
  Plane<T> out(w, h);
  for (int x = 0; x < w; ++x) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      acc += tmp.clamped(x, k);
    }
    for (int y = 0; y < h; ++y) {
      out(x, y) = static_cast<T>(acc * norm);
      acc += tmp.clamped(x, y + radius + 1) - tmp.clamped(x, y - radius);
    }
  }
  return out;
}

/// Bilinear resampling with pixel-center alignment.
template <typename T>
Plane<T> resize_bilinear(const Plane<T>& src, int width, int height) {
  Plane<T> out(width, height);
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < width; ++x) {
      out(x, y) = static_cast<T>(sample_bilinear(src, (x + 0.5) * sx - 0.5, fy));
    }
  }
  return out;
}

}  // namespace bos
