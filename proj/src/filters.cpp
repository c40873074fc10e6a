#include "bos/filters.hpp"

namespace bos {

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) {
    throw InvalidArgument("gaussian sigma must be positive");
  }
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    sum += taps[k + radius];
  }
  for (double& t : taps) {
    t /= sum;
  }
  return taps;
}

}  // namespace bos
