#include <cmath>

#include "bos/reconstruct.hpp"

namespace bos {

GrayImage cfs(const GrayImage& frame_a, const GrayImage& frame_b, double gain) {
  if (!frame_a.same_shape(frame_b)) {
    throw DimensionMismatch("cfs frames differ in size");
  }
  if (!(gain >= 1.0)) {
    throw InvalidArgument("cfs gain must be >= 1");
  }
  GrayImage out(frame_a.width(), frame_a.height());
  auto a = frame_a.pixels();
  auto b = frame_b.pixels();
  auto o = out.pixels();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double diff = std::abs(static_cast<double>(b[i]) - a[i]);
    o[i] = static_cast<float>(std::min(1.0, gain * diff));
  }
  return out;
}

}  // namespace bos
