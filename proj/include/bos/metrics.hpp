#pragma once

#include <optional>

#include "bos/image.hpp"

namespace bos {

enum class DbConvention { amplitude20, power10 };

struct SnrReport {
  double i_sample = 0.0;
  double i_bg = 0.0;
  double sigma_bg = 0.0;
  double linear = 0.0;
  /// Defined only when linear > 0.
  std::optional<double> db;
};

/// SNR = (mean(sample) - mean(bg)) / std(bg), population standard deviation.
/// Masks must be non-empty, disjoint and sized like the image.
SnrReport snr(const Plane<float>& result, const Mask& sample_mask, const Mask& bg_mask,
              DbConvention convention = DbConvention::amplitude20);

struct EpeReport {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Default border excluded from evaluation, half the default interrogation window.
inline constexpr int kDefaultEvalBorder = 16;

/// Endpoint error sqrt(du^2 + dv^2) against a dense truth field.
///
/// Sparse estimates are compared at their grid points with the truth sampled
/// bilinearly there; invalid estimate vectors are skipped. Evaluated points
/// must lie `border` px inside the truth raster and, when given, inside `mask`
/// (truth-sized).
EpeReport endpoint_error(const DisplacementField& estimate, const DisplacementField& truth,
                         const std::optional<Mask>& mask = std::nullopt,
                         int border = kDefaultEvalBorder);

struct MagnitudeStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

/// Euclidean magnitudes over valid vectors.
MagnitudeStats magnitude_stats(const DisplacementField& field);

/// Per-grid-point |d| as a raster.
Plane<float> magnitude(const DisplacementField& field);

/// Normalized cross-correlation of two equally sized rasters over a mask.
double normalized_correlation(const Plane<float>& a, const Plane<float>& b,
                              const std::optional<Mask>& mask = std::nullopt);

}  // namespace bos
