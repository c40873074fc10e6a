#include "bos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bos {
namespace {

// Neumaier-compensated running sum; order is fixed by the caller's loop.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

Moments moments(const Plane<float>& img, const Mask& mask) {
  CompensatedSum sum;
  std::size_t count = 0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (mask.pixels()[i]) {
      sum.add(img.pixels()[i]);
      ++count;
    }
  }
  Moments m;
  m.count = count;
  if (count == 0) return m;
  m.mean = sum.value() / static_cast<double>(count);
  CompensatedSum sq;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (mask.pixels()[i]) {
      const double d = img.pixels()[i] - m.mean;
      sq.add(d * d);
    }
  }
  m.stddev = std::sqrt(sq.value() / static_cast<double>(count));
  return m;
}

}  // namespace

SnrReport snr(const Plane<float>& result, const Mask& sample_mask, const Mask& bg_mask,
              DbConvention convention) {
  if (!result.same_shape(sample_mask) || !result.same_shape(bg_mask)) {
    throw DimensionMismatch("snr masks must match the image size");
  }
  for (std::size_t i = 0; i < result.size(); ++i) {
    if (sample_mask.pixels()[i] && bg_mask.pixels()[i]) {
      throw InvalidArgument("snr sample and background masks overlap");
    }
  }
  const Moments sample = moments(result, sample_mask);
  const Moments bg = moments(result, bg_mask);
  if (sample.count == 0) throw InvalidArgument("snr sample mask is empty");
  if (bg.count == 0) throw InvalidArgument("snr background mask is empty");
  if (!(bg.stddev > 1e-12)) throw InvalidArgument("snr background has zero variance");

  SnrReport r;
  r.i_sample = sample.mean;
  r.i_bg = bg.mean;
  r.sigma_bg = bg.stddev;
  r.linear = (sample.mean - bg.mean) / bg.stddev;
  if (r.linear > 0.0) {
    r.db = (convention == DbConvention::amplitude20 ? 20.0 : 10.0) * std::log10(r.linear);
  }
  return r;
}

EpeReport endpoint_error(const DisplacementField& estimate, const DisplacementField& truth,
                         const std::optional<Mask>& mask, int border) {
  if (!truth.dense()) {
    throw InvalidArgument("endpoint_error truth must be a dense field");
  }
  if (estimate.dense() && !estimate.u.same_shape(truth.u)) {
    throw DimensionMismatch("endpoint_error fields differ in size");
  }
  if (mask && !mask->same_shape(truth.u)) {
    throw DimensionMismatch("endpoint_error mask must match the truth field size");
  }
  const int tw = truth.width();
  const int th = truth.height();

  std::vector<double> errors;
  errors.reserve(estimate.u.size());
  for (int j = 0; j < estimate.height(); ++j) {
    for (int i = 0; i < estimate.width(); ++i) {
      if (!estimate.is_valid(i, j)) continue;
      const double px = estimate.grid_x(i);
      const double py = estimate.grid_y(j);
      if (px < border || py < border || px > tw - 1 - border || py > th - 1 - border) continue;
      const int mx = static_cast<int>(std::lround(px));
      const int my = static_cast<int>(std::lround(py));
      if (mask && !(*mask)(mx, my)) continue;
      double tu;
      double tv;
      if (estimate.dense()) {
        tu = truth.u(i, j);
        tv = truth.v(i, j);
      } else {
        tu = sample_bilinear(truth.u, px, py);
        tv = sample_bilinear(truth.v, px, py);
      }
      const double du = estimate.u(i, j) - tu;
      const double dv = estimate.v(i, j) - tv;
      errors.push_back(std::sqrt(du * du + dv * dv));
    }
  }

  EpeReport r;
  r.count = errors.size();
  if (errors.empty()) return r;
  CompensatedSum sum;
  for (double e : errors) sum.add(e);
  r.mean = sum.value() / static_cast<double>(errors.size());
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  r.median = n % 2 == 1 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
  // nearest-rank percentile
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  r.p95 = errors[std::max<std::size_t>(rank, 1) - 1];
  r.max = errors.back();
  return r;
}

Plane<float> magnitude(const DisplacementField& field) {
  Plane<float> mag(field.width(), field.height());
  for (std::size_t i = 0; i < mag.size(); ++i) {
    const double u = field.u.pixels()[i];
    const double v = field.v.pixels()[i];
    mag.pixels()[i] = static_cast<float>(std::sqrt(u * u + v * v));
  }
  return mag;
}

MagnitudeStats magnitude_stats(const DisplacementField& field) {
  MagnitudeStats s;
  CompensatedSum sum;
  std::size_t count = 0;
  bool first = true;
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      if (!field.is_valid(x, y)) continue;
      const double u = field.u(x, y);
      const double v = field.v(x, y);
      const double m = std::sqrt(u * u + v * v);
      if (first) {
        s.min = s.max = m;
        first = false;
      }
      s.min = std::min(s.min, m);
      s.max = std::max(s.max, m);
      sum.add(m);
      ++count;
    }
  }
  if (count > 0) s.mean = sum.value() / static_cast<double>(count);
  return s;
}

double normalized_correlation(const Plane<float>& a, const Plane<float>& b,
                              const std::optional<Mask>& mask) {
  if (!a.same_shape(b) || (mask && !mask->same_shape(a))) {
    throw DimensionMismatch("normalized_correlation inputs differ in size");
  }
  const Mask all(a.width(), a.height(), 1);
  const Mask& m = mask ? *mask : all;
  const Moments ma = moments(a, m);
  const Moments mb = moments(b, m);
  if (ma.count == 0 || ma.stddev <= 0.0 || mb.stddev <= 0.0) return 0.0;
  CompensatedSum cov;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (m.pixels()[i]) cov.add((a.pixels()[i] - ma.mean) * (b.pixels()[i] - mb.mean));
  }
  return cov.value() / static_cast<double>(ma.count) / (ma.stddev * mb.stddev);
}

}  // namespace bos
