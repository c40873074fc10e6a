#include "bos/patterns.hpp"

#include <sstream>

#include "bos/rng.hpp"

namespace bos {

PatternKind parse_pattern_kind(std::string_view name) {
  if (name == "random_squares" || name == "squares") return PatternKind::random_squares;
  if (name == "random_dots" || name == "dots") return PatternKind::random_dots;
  if (name == "random_gray" || name == "gray") return PatternKind::random_gray;
  throw InvalidArgument("unknown pattern kind '" + std::string(name) +
                        "' (expected squares, dots or gray)");
}

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::random_squares: return "random_squares";
    case PatternKind::random_dots: return "random_dots";
    case PatternKind::random_gray: return "random_gray";
  }
  return "unknown";
}

void PatternSpec::validate() const {
  if (cell < 1) {
    throw InvalidArgument("pattern cell must be >= 1 px, got " + std::to_string(cell));
  }
  if (width < cell || height < cell) {
    throw InvalidArgument("pattern dimensions " + std::to_string(width) + "x" +
                          std::to_string(height) + " smaller than one cell");
  }
  if (!(fill >= 0.0 && fill <= 1.0)) {
    throw InvalidArgument("pattern fill must lie in [0, 1]");
  }
}

GrayImage generate_pattern(const PatternSpec& spec) {
  spec.validate();
  GrayImage img(spec.width, spec.height, 1.f);
  SplitMix64 rng(spec.seed);
  const int cells_x = (spec.width + spec.cell - 1) / spec.cell;
  const int cells_y = (spec.height + spec.cell - 1) / spec.cell;
  const double radius = spec.cell / 2.0;

  for (int cy = 0; cy < cells_y; ++cy) {
    for (int cx = 0; cx < cells_x; ++cx) {
      const double draw = rng.uniform();
      const int x0 = cx * spec.cell;
      const int y0 = cy * spec.cell;
      const int x1 = std::min(x0 + spec.cell, spec.width);
      const int y1 = std::min(y0 + spec.cell, spec.height);

      if (spec.kind == PatternKind::random_gray) {
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) img(x, y) = static_cast<float>(draw);
        }
        continue;
      }
      if (!(draw < spec.fill)) {
        continue;
      }
      if (spec.kind == PatternKind::random_squares) {
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) img(x, y) = 0.f;
        }
      } else {
        const double ccx = x0 + radius;
        const double ccy = y0 + radius;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) {
            const double dx = x + 0.5 - ccx;
            const double dy = y + 0.5 - ccy;
            if (dx * dx + dy * dy < radius * radius) img(x, y) = 0.f;
          }
        }
      }
    }
  }
  return img;
}

GrayImage imaged_pattern(const PatternSpec& spec, int oversample) {
  if (oversample < 1) {
    throw InvalidArgument("oversample factor must be >= 1");
  }
  spec.validate();
  if (oversample == 1) {
    return generate_pattern(spec);
  }
  PatternSpec fine = spec;
  fine.width = spec.width * oversample;
  fine.height = spec.height * oversample;
  const GrayImage hi = generate_pattern(fine);
  GrayImage out(spec.width, spec.height);
  const double norm = 1.0 / (static_cast<double>(oversample) * oversample);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double sum = 0.0;
      for (int j = 0; j < oversample; ++j) {
        for (int i = 0; i < oversample; ++i) {
          sum += hi(x * oversample + i, y * oversample + j);
        }
      }
      out(x, y) = static_cast<float>(sum * norm);
    }
  }
  return out;
}

RaffelCheck check_raffel(double cell_px_as_imaged) {
  if (!(cell_px_as_imaged > 0.0)) {
    throw InvalidArgument("imaged cell size must be positive");
  }
  std::ostringstream msg;
  msg << "background cell images to " << cell_px_as_imaged << " px";
  if (cell_px_as_imaged < 3.0) {
    msg << ": undersampled, need 3-5 px per feature";
    return {false, msg.str()};
  }
  if (cell_px_as_imaged > 5.0) {
    msg << ": oversampled, need 3-5 px per feature";
    return {false, msg.str()};
  }
  msg << ": within the 3-5 px sampling window";
  return {true, msg.str()};
}

}  // namespace bos
