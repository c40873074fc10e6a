#include <gtest/gtest.h>

#include <set>

#include "bos/error.hpp"
#include "bos/patterns.hpp"
#include "bos/rng.hpp"

namespace bos {
namespace {

PatternSpec spec(PatternKind kind, int w, int h, int cell, double fill, std::uint64_t seed) {
  PatternSpec s;
  s.kind = kind;
  s.width = w;
  s.height = h;
  s.cell = cell;
  s.fill = fill;
  s.seed = seed;
  return s;
}

TEST(Patterns, FillExtremes) {
  const GrayImage white = generate_pattern(spec(PatternKind::random_squares, 40, 30, 4, 0.0, 1));
  const GrayImage black = generate_pattern(spec(PatternKind::random_squares, 40, 30, 4, 1.0, 1));
  for (float v : white.pixels()) EXPECT_EQ(v, 1.f);
  for (float v : black.pixels()) EXPECT_EQ(v, 0.f);
}

TEST(Patterns, DarkFractionConcentrates) {
  for (std::uint64_t seed : {0ull, 7ull, 42ull}) {
    const GrayImage img = generate_pattern(spec(PatternKind::random_squares, 400, 400, 4, 0.5, seed));
    int dark = 0;
    for (int cy = 0; cy < 100; ++cy)
      for (int cx = 0; cx < 100; ++cx) dark += img(cx * 4, cy * 4) == 0.f;
    EXPECT_GE(dark / 1e4, 0.45);
    EXPECT_LE(dark / 1e4, 0.55);
  }
}

TEST(Patterns, CellsFollowRowMajorDraws) {
  // Independent replay of the generator contract: one uniform draw per cell,
  // dark when the draw is below fill.
  const PatternSpec s = spec(PatternKind::random_squares, 21, 10, 4, 0.3, 99);
  const GrayImage img = generate_pattern(s);
  SplitMix64 rng(99);
  for (int cy = 0; cy < 3; ++cy) {
    for (int cx = 0; cx < 6; ++cx) {
      const float expect = rng.uniform() < 0.3 ? 0.f : 1.f;
      for (int y = cy * 4; y < std::min(cy * 4 + 4, 10); ++y)
        for (int x = cx * 4; x < std::min(cx * 4 + 4, 21); ++x) ASSERT_EQ(img(x, y), expect);
    }
  }
}

TEST(Patterns, GrayCellsTakeTheDraw) {
  const GrayImage img = generate_pattern(spec(PatternKind::random_gray, 8, 4, 4, 0.5, 5));
  SplitMix64 rng(5);
  EXPECT_FLOAT_EQ(img(0, 0), static_cast<float>(rng.uniform()));
  EXPECT_FLOAT_EQ(img(7, 3), static_cast<float>(rng.uniform()));
}

TEST(Patterns, DotsArePixelCenterDisks) {
  const GrayImage img = generate_pattern(spec(PatternKind::random_dots, 8, 8, 8, 1.0, 0));
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const double dx = x + 0.5 - 4.0;
      const double dy = y + 0.5 - 4.0;
      EXPECT_EQ(img(x, y), dx * dx + dy * dy < 16.0 ? 0.f : 1.f) << x << "," << y;
    }
  }
}

TEST(Patterns, BinaryKindsOnlyUseTwoLevels) {
  for (PatternKind k : {PatternKind::random_squares, PatternKind::random_dots}) {
    const GrayImage img = generate_pattern(spec(k, 64, 48, 5, 0.5, 3));
    std::set<float> levels(img.pixels().begin(), img.pixels().end());
    EXPECT_TRUE(levels == std::set<float>({0.f, 1.f}));
  }
}

TEST(Patterns, Deterministic) {
  const PatternSpec s = spec(PatternKind::random_dots, 50, 40, 6, 0.4, 1234);
  EXPECT_EQ(generate_pattern(s), generate_pattern(s));
}

TEST(Patterns, Validation) {
  EXPECT_THROW(generate_pattern(spec(PatternKind::random_gray, 3, 10, 4, 0.5, 0)), InvalidArgument);
  EXPECT_THROW(generate_pattern(spec(PatternKind::random_gray, 10, 10, 0, 0.5, 0)), InvalidArgument);
  EXPECT_THROW(generate_pattern(spec(PatternKind::random_squares, 10, 10, 2, 1.2, 0)), InvalidArgument);
  EXPECT_THROW(parse_pattern_kind("stripes"), InvalidArgument);
  EXPECT_EQ(parse_pattern_kind("dots"), PatternKind::random_dots);
  EXPECT_EQ(to_string(PatternKind::random_gray), "random_gray");
}

TEST(Patterns, ImagedPatternAveragesBlocks) {
  const PatternSpec s = spec(PatternKind::random_squares, 16, 12, 8, 0.5, 11);
  EXPECT_EQ(imaged_pattern(s, 1), generate_pattern(s));
  PatternSpec fine = s;
  fine.width = 32;
  fine.height = 24;
  const GrayImage hi = generate_pattern(fine);
  const GrayImage lo = imaged_pattern(s, 2);
  ASSERT_EQ(lo.width(), 16);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x)
      EXPECT_FLOAT_EQ(lo(x, y), 0.25f * (hi(2 * x, 2 * y) + hi(2 * x + 1, 2 * y) +
                                         hi(2 * x, 2 * y + 1) + hi(2 * x + 1, 2 * y + 1)));
  EXPECT_THROW(imaged_pattern(s, 0), InvalidArgument);
}

TEST(Raffel, Window) {
  EXPECT_TRUE(check_raffel(4.0).pass);
  EXPECT_TRUE(check_raffel(3.0).pass);
  EXPECT_TRUE(check_raffel(5.0).pass);
  EXPECT_FALSE(check_raffel(1.0).pass);
  EXPECT_FALSE(check_raffel(8.0).pass);
  EXPECT_FALSE(check_raffel(2.999).pass);
  EXPECT_FALSE(check_raffel(5.001).pass);
  EXPECT_FALSE(check_raffel(1.0).message.empty());
  EXPECT_THROW(check_raffel(0.0), InvalidArgument);
  EXPECT_THROW(check_raffel(-1.0), InvalidArgument);
}

}  // namespace
}  // namespace bos
