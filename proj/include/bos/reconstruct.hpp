#pragma once

#include <functional>
#include <string_view>

#include "bos/image.hpp"

namespace bos {

// ---------------------------------------------------------------------------
// Consecutive frame subtraction

/// Per pixel min(1, gain * |b - a|).
GrayImage cfs(const GrayImage& frame_a, const GrayImage& frame_b, double gain = 1.0);

// ---------------------------------------------------------------------------
// Interrogation-window cross-correlation

enum class SubpixelFit { gaussian3, parabolic, none };

SubpixelFit parse_subpixel_fit(std::string_view name);

struct CorrConfig {
  int window = 32;      ///< interrogation window side, px
  int search = 10;      ///< max displacement searched per axis, px
  int step = 16;        ///< stride between window centers, px
  SubpixelFit subpixel = SubpixelFit::gaussian3;
  double min_peak = 0.3;  ///< windows whose ZNCC peak is lower are invalid

  void validate(int image_width, int image_height) const;
};

struct CorrelationResult {
  /// Sparse field; grid point (i, j) sits at the center of its window.
  DisplacementField field;
  /// Zero-mean normalized correlation at the integer peak, per grid point.
  Plane<float> peak;
};

/// Zero-mean normalized cross-correlation of reference windows against the
/// target over integer offsets in [-search, search]^2, with per-axis subpixel
/// refinement of the argmax. A perfect match (peak >= 1 - 1e-9) is already
/// exact and is not refined.
CorrelationResult cross_correlate(const GrayImage& reference, const GrayImage& target,
                                  const CorrConfig& cfg = {});

/// Offset of the extremum from the three samples around an integer peak.
/// gaussian3 falls back to parabolic when any sample is <= 0.
double subpixel_offset(double c_minus, double c_zero, double c_plus, SubpixelFit fit) noexcept;

// ---------------------------------------------------------------------------
// Dense optical flow

enum class FlowEngine { horn_schunck, farneback };

FlowEngine parse_flow_engine(std::string_view name);

struct FlowConfig {
  FlowEngine engine = FlowEngine::horn_schunck;
  int levels = 3;
  double scale = 0.5;
  int iterations = 100;  ///< per level; 3 is the Farneback default
  double alpha = 0.5;    ///< Horn-Schunck smoothness weight, intensity units
  int poly_n = 5;        ///< Farneback expansion half-width, px
  double poly_sigma = 1.1;
  int window = 15;       ///< Farneback averaging window side, px

  static FlowConfig horn_schunck_defaults();
  static FlowConfig farneback_defaults();
  void validate() const;
};

/// Called every `every` Jacobi iterations with the current Horn-Schunck energy.
struct IterationObserver {
  int every = 10;
  std::function<void(int iteration, double energy)> callback;
};

/// Single-level Horn-Schunck from a zero initial field.
DisplacementField horn_schunck_level(const GrayImage& reference, const GrayImage& target,
                                     const FlowConfig& cfg,
                                     const IterationObserver* observer = nullptr);

/// Single-level Farneback from a zero initial field.
DisplacementField farneback_level(const GrayImage& reference, const GrayImage& target,
                                  const FlowConfig& cfg);

/// Coarse-to-fine wrapper: Gaussian pyramids (sigma 1, decimation by
/// cfg.scale), solve at the coarsest level, upsample the field by 1/scale,
/// warp the target by the running estimate, solve for the increment.
DisplacementField pyramid_flow(FlowEngine engine, const GrayImage& reference,
                               const GrayImage& target, const FlowConfig& cfg);

DisplacementField horn_schunck(const GrayImage& reference, const GrayImage& target,
                               const FlowConfig& cfg = FlowConfig::horn_schunck_defaults());
DisplacementField farneback(const GrayImage& reference, const GrayImage& target,
                            const FlowConfig& cfg = FlowConfig::farneback_defaults());

/// Bilinear upsampling to (width, height), vectors multiplied by `factor`.
DisplacementField upsample_field(const DisplacementField& coarse, int width, int height,
                                 double factor);

/// Horn-Schunck objective sum (Ix u + Iy v + It)^2 + (alpha^2 / 4) * sum over
/// 4-neighbour edges of |du|^2 + |dv|^2, using the pair-averaged stencils.
double horn_schunck_energy(const GrayImage& reference, const GrayImage& target,
                           const DisplacementField& field, double alpha);

// ---------------------------------------------------------------------------
// Vector post-filtering

struct PostFilter {
  enum class Kind { median3, gaussian } kind = Kind::median3;
  double sigma = 1.0;

  /// "median3" or "gaussian:<sigma>".
  static PostFilter parse(std::string_view text);
};

/// Component-wise smoothing. Invalid vectors are excluded from neighbourhoods
/// and replaced by the filtered value of their valid neighbours.
DisplacementField postfilter(const DisplacementField& field, const PostFilter& filter);

}  // namespace bos
