#include <gtest/gtest.h>

#include <cmath>

#include "bos/error.hpp"
#include "bos/metrics.hpp"
#include "bos/simulate.hpp"
#include "test_util.hpp"

namespace bos {
namespace {

BosGeometry phone_geometry(double bg_scale = 2e-4) {
  BosGeometry g;
  g.d1 = 0.47;
  g.d2 = 0.35;
  g.f = 4.73e-3;
  g.pixel_pitch = 1.6e-6;
  g.bg_scale = bg_scale;
  return g;
}

RefractiveField plume(double cx, double cy, double sigma = 40.0, double dn = 2e-4) {
  RefractiveField f;
  f.cx = cx;
  f.cy = cy;
  f.sigma_px = sigma;
  f.delta_n = dn;
  f.thickness_z = 0.05;
  return f;
}

TEST(IndexAt, PlumeShape) {
  const RefractiveField f = plume(10, 20);
  const OpticsConstants c;
  EXPECT_DOUBLE_EQ(index_at(f, 10, 20), c.n0 - 2e-4);
  EXPECT_NEAR(index_at(f, 1e4, 20), c.n0, 1e-15);
  EXPECT_DOUBLE_EQ(index_at(f, 10 + 30, 20), index_at(f, 10, 20 - 30));
  RefractiveField u;
  u.kind = FieldKind::uniform;
  EXPECT_EQ(index_at(u, 3, 4), c.n0);
}

TEST(IndexGradient, MatchesFiniteDifference) {
  const RefractiveField f = plume(0, 0, 12.0);
  for (double x : {-20.0, -5.0, 3.0, 17.0}) {
    const double h = 1e-4;
    const double fd = (index_at(f, x + h, 4.0) - index_at(f, x - h, 4.0)) / (2 * h);
    EXPECT_NEAR(index_gradient_px(f, x, 4.0).dx, fd, 1e-12);
  }
}

TEST(GroundTruth, UniformIsZero) {
  RefractiveField u;
  u.kind = FieldKind::uniform;
  const DisplacementField gt = ground_truth_field(u, phone_geometry(), {}, 16, 12);
  for (float v : gt.u.pixels()) EXPECT_EQ(v, 0.f);
  for (float v : gt.v.pixels()) EXPECT_EQ(v, 0.f);
}

TEST(GroundTruth, PeakOnSigmaCircleAndHandValue) {
  const int w = 201;
  const RefractiveField f = plume(100, 100);
  const BosGeometry g = phone_geometry();
  const DisplacementField gt = ground_truth_field(f, g, {}, w, w);
  double best = 0.0;
  int bx = 0, by = 0;
  for (int y = 0; y < w; ++y)
    for (int x = 0; x < w; ++x) {
      const double m = std::hypot(gt.u(x, y), gt.v(x, y));
      if (m > best) {
        best = m;
        bx = x;
        by = y;
      }
    }
  EXPECT_NEAR(std::hypot(bx - 100.0, by - 100.0), 40.0, 1.0);
  // (Z / n0) * max|grad n| * d2 / bg_scale, with max|grad n| = dn e^{-1/2} / (sigma bg_scale).
  const double grad = 2e-4 * std::exp(-0.5) / (40.0 * 2e-4);
  const double expect = 0.05 / 1.000292 * grad * 0.35 / 2e-4;
  EXPECT_NEAR(plume_peak_displacement_px(f, g), expect, 1e-12 * expect);
  EXPECT_NEAR(best, expect, 1e-5 * expect);
}

TEST(GroundTruth, SymmetryAndOutwardSign) {
  const RefractiveField f = plume(50, 40, 10);
  const DisplacementField gt = ground_truth_field(f, phone_geometry(), {}, 101, 81);
  for (int d = 1; d < 30; ++d) {
    EXPECT_FLOAT_EQ(gt.u(50 + d, 40 + 3), -gt.u(50 - d, 40 + 3));
    // Index is depressed in the core, so the gradient (and deflection) points outward.
    EXPECT_GT(gt.u(50 + d, 40), 0.f);
  }
}

TEST(GroundTruth, DeltaNForPeakInverts) {
  RefractiveField f = plume(0, 0, 25);
  const BosGeometry g = phone_geometry(0.210 / 640);
  f.delta_n = delta_n_for_peak(2.0, f, g);
  EXPECT_NEAR(plume_peak_displacement_px(f, g), 2.0, 1e-12);
}

TEST(WarpImage, Translations) {
  GrayImage bg(6, 2, std::vector<float>{0, 0, 0, 1, 1, 1, 0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f});
  EXPECT_EQ(warp_image(bg, DisplacementField(6, 2)), bg);
  const GrayImage one = warp_image(bg, DisplacementField::constant(6, 2, 1.f, 0.f));
  for (int x = 1; x < 6; ++x) EXPECT_EQ(one(x, 1), bg(x - 1, 1));
  EXPECT_EQ(one(0, 1), bg(0, 1));
  const GrayImage half = warp_image(bg, DisplacementField::constant(6, 2, 0.5f, 0.f));
  EXPECT_FLOAT_EQ(half(3, 0), 0.5f);
  EXPECT_THROW(warp_image(bg, DisplacementField(5, 2)), DimensionMismatch);
}

TEST(WarpImage, StaysInRange) {
  PatternSpec s;
  s.kind = PatternKind::random_gray;
  s.width = 64;
  s.height = 48;
  const GrayImage bg = generate_pattern(s);
  const RefractiveField f = plume(32, 24, 8, 1e-3);
  const GrayImage out = warp_image(bg, ground_truth_field(f, phone_geometry(0.210 / 64), {}, 64, 48));
  const auto [lo, hi] = std::minmax_element(bg.pixels().begin(), bg.pixels().end());
  for (float v : out.pixels()) {
    EXPECT_GE(v, *lo);
    EXPECT_LE(v, *hi);
  }
}

TEST(SimulatePair, NullPlumeIsIdentity) {
  PatternSpec s;
  s.width = 64;
  s.height = 48;
  RefractiveField f = plume(32, 24);
  f.delta_n = 0.0;
  const SimOutput out = simulate_pair(s, f, phone_geometry(), {}, CameraModel{});
  EXPECT_EQ(out.reference, out.distorted);
  EXPECT_TRUE(out.reference.same_shape(out.ground_truth.u));
}

TEST(SimulatePair, NoiseOnlyOutsidePlume) {
  PatternSpec s;
  s.width = 256;
  s.height = 256;
  const RefractiveField f = plume(128, 128, 20);
  const CameraModel cam{0.01, 3, true};
  const SimOutput out = simulate_pair(s, f, phone_geometry(0.210 / 256), {}, cam);
  double sum = 0.0;
  int n = 0;
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x)
      if (std::hypot(x - 128.0, y - 128.0) > 60.0) {
        sum += std::abs(out.reference(x, y) - out.distorted(x, y));
        ++n;
      }
  EXPECT_LE(sum / n, 3 * 0.01);
  EXPECT_GT(sum / n, 0.0);
  for (float v : out.reference.pixels()) {
    EXPECT_GE(v, 0.f);
    EXPECT_LE(v, 1.f);
    EXPECT_FLOAT_EQ(v * 255.f, std::round(v * 255.f));
  }
}

TEST(SimulatePair, Deterministic) {
  PatternSpec s;
  s.width = 80;
  s.height = 60;
  const RefractiveField f = plume(40, 30, 10);
  const CameraModel cam{0.02, 9, true};
  const SimOutput a = simulate_pair(s, f, phone_geometry(), {}, cam);
  const SimOutput b = simulate_pair(s, f, phone_geometry(), {}, cam);
  EXPECT_EQ(a.reference, b.reference);
  EXPECT_EQ(a.distorted, b.distorted);
  EXPECT_EQ(a.ground_truth, b.ground_truth);
}

TEST(RefractiveField, Validation) {
  RefractiveField f = plume(0, 0);
  f.sigma_px = 0;
  EXPECT_THROW(f.validate(), InvalidArgument);
  f = plume(0, 0);
  f.thickness_z = -1;
  EXPECT_THROW(f.validate(), InvalidArgument);
  f = plume(0, 0);
  f.delta_n = 0.05;
  testing::WarningCapture w;
  f.validate();
  EXPECT_EQ(w.messages.size(), 1u);
}

}  // namespace
}  // namespace bos
