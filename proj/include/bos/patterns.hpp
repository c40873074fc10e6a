#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bos/image.hpp"

namespace bos {

enum class PatternKind { random_gray, random_dots, random_squares };

PatternKind parse_pattern_kind(std::string_view name);
std::string_view to_string(PatternKind kind);

struct PatternSpec {
  PatternKind kind = PatternKind::random_squares;
  int width = 1920;
  int height = 1080;
  /// Pixels per pattern cell. 8 px on a 1920-wide A4 print images to about
  /// 3.2 camera pixels at the reference geometry, inside the 3-5 px window.
  int cell = 8;
  /// Probability a cell is dark (squares and dots).
  double fill = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Cells are visited in row-major order, one PRNG draw each; trailing partial
/// cells follow the same rule.
///  - random_squares: cell is black with probability fill, else white.
///  - random_dots: dark cells get a black disk of diameter `cell`, pixel
///    membership by pixel-center-inside-circle, on white ground.
///  - random_gray: each cell takes an independent uniform gray level.
GrayImage generate_pattern(const PatternSpec& spec);

/// The pattern as a camera sees it: rendered at `oversample` times the
/// requested size (spec.cell counts fine pixels) and averaged over
/// oversample x oversample blocks, one block per sensor pixel. Features not
/// aligned with the pixel grid, such as dot rims, lose contrast.
GrayImage imaged_pattern(const PatternSpec& spec, int oversample);

struct RaffelCheck {
  bool pass = false;
  std::string message;
};

/// Sampling guideline: each background feature should span 3 to 5 camera
/// pixels (both bounds inclusive).
RaffelCheck check_raffel(double cell_px_as_imaged);

}  // namespace bos
