#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bos/error.hpp"
#include "bos/metrics.hpp"
#include "bos/rng.hpp"

namespace bos {
namespace {

// 4x2 raster: left half sample, right half background.
struct SnrFixture {
  Plane<float> img{4, 2};
  Mask sample = rect_mask(4, 2, 0, 0, 2, 2);
  Mask bg = rect_mask(4, 2, 2, 0, 2, 2);
};

TEST(Snr, HandEvaluated) {
  SnrFixture f;
  // sample mean 10; background values 1, 3, 1, 3 -> mean 2, population std 1
  f.img = Plane<float>(4, 2, std::vector<float>{10, 10, 1, 3, 10, 10, 3, 1});
  const SnrReport r = snr(f.img, f.sample, f.bg);
  EXPECT_DOUBLE_EQ(r.i_sample, 10.0);
  EXPECT_DOUBLE_EQ(r.i_bg, 2.0);
  EXPECT_DOUBLE_EQ(r.sigma_bg, 1.0);
  EXPECT_DOUBLE_EQ(r.linear, 8.0);
  ASSERT_TRUE(r.db.has_value());
  EXPECT_NEAR(*r.db, 18.062, 1e-3);
  EXPECT_NEAR(*snr(f.img, f.sample, f.bg, DbConvention::power10).db, 10 * std::log10(8.0), 1e-12);
}

TEST(Snr, NullSignalHasNoDecibels) {
  SnrFixture f;
  f.img = Plane<float>(4, 2, std::vector<float>{2, 2, 1, 3, 2, 2, 3, 1});
  const SnrReport r = snr(f.img, f.sample, f.bg);
  EXPECT_EQ(r.linear, 0.0);
  EXPECT_FALSE(r.db.has_value());
}

TEST(Snr, AffineInvariant) {
  SplitMix64 rng(4);
  Plane<float> img(20, 10);
  for (float& v : img.pixels()) v = static_cast<float>(rng.uniform());
  const Mask s = rect_mask(20, 10, 0, 0, 8, 10);
  const Mask b = rect_mask(20, 10, 10, 0, 10, 10);
  Plane<float> scaled = img;
  for (float& v : scaled.pixels()) v = 3.f * v + 0.5f;
  EXPECT_NEAR(snr(scaled, s, b).linear, snr(img, s, b).linear, 1e-5);
}

TEST(Snr, Errors) {
  SnrFixture f;
  f.img = Plane<float>(4, 2, 1.f);
  EXPECT_THROW(snr(f.img, f.sample, f.bg), InvalidArgument);  // zero variance
  EXPECT_THROW(snr(f.img, Mask(4, 2, 0), f.bg), InvalidArgument);
  EXPECT_THROW(snr(f.img, f.sample, f.sample), InvalidArgument);
  EXPECT_THROW(snr(f.img, Mask(3, 2, 1), f.bg), DimensionMismatch);
}

TEST(Epe, IdentityAndPythagoras) {
  const DisplacementField t = DisplacementField::constant(40, 40, 0.3f, -0.2f);
  const EpeReport zero = endpoint_error(t, t);
  EXPECT_EQ(zero.mean, 0.0);
  EXPECT_EQ(zero.max, 0.0);
  EXPECT_EQ(zero.count, 8u * 8u);  // 16 px border on each side
  DisplacementField e = t;
  for (float& v : e.u.pixels()) v += 3.f;
  for (float& v : e.v.pixels()) v += 4.f;
  const EpeReport r = endpoint_error(e, t, std::nullopt, 0);
  EXPECT_NEAR(r.mean, 5.0, 1e-6);
  EXPECT_NEAR(r.median, 5.0, 1e-6);
  EXPECT_NEAR(r.max, 5.0, 1e-6);
}

TEST(Epe, MatchesElementwiseOracle) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    DisplacementField a(23, 17), b(23, 17);
    for (auto* p : {&a.u, &a.v, &b.u, &b.v})
      for (float& v : p->pixels()) v = static_cast<float>(rng.normal());
    Mask m(23, 17, 0);
    for (auto& v : m.pixels()) v = rng.uniform() < 0.6;
    std::vector<double> errs;
    for (int y = 2; y < 15; ++y)
      for (int x = 2; x < 21; ++x)
        if (m(x, y)) errs.push_back(std::hypot(double(a.u(x, y)) - b.u(x, y), double(a.v(x, y)) - b.v(x, y)));
    std::sort(errs.begin(), errs.end());
    double sum = 0;
    for (double e : errs) sum += e;
    const EpeReport r = endpoint_error(a, b, m, 2);
    ASSERT_EQ(r.count, errs.size());
    EXPECT_NEAR(r.mean, sum / errs.size(), 1e-9);
    EXPECT_NEAR(r.max, errs.back(), 1e-9);
    const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * errs.size())) - 1;
    EXPECT_NEAR(r.p95, errs[rank], 1e-9);
    EXPECT_LE(r.median, r.p95);
    EXPECT_NEAR(endpoint_error(b, a, m, 2).mean, r.mean, 1e-12);
  }
}

TEST(Epe, SparseSamplesTruthAtGridPoints) {
  DisplacementField truth(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) truth.u(x, y) = 0.1f * x;
  DisplacementField est(3, 3);
  est.grid_step = 16;
  est.origin_x = 16;
  est.origin_y = 16;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) est.u(i, j) = 0.1f * (16 + 16 * i);
  est.valid.assign(9, 1);
  est.valid[4] = 0;
  est.u(1, 1) = 99.f;
  const EpeReport r = endpoint_error(est, truth, std::nullopt, 0);
  EXPECT_EQ(r.count, 8u);
  // Default border 16 keeps only grid points with x, y in [16, 47].
  EXPECT_EQ(endpoint_error(est, truth).count, 3u);
  EXPECT_NEAR(r.max, 0.0, 1e-5);
}

TEST(Epe, DimensionMismatch) {
  EXPECT_THROW(endpoint_error(DisplacementField(10, 10), DisplacementField(11, 10)), DimensionMismatch);
}

TEST(MagnitudeStats, Basics) {
  const MagnitudeStats z = magnitude_stats(DisplacementField(4, 4));
  EXPECT_EQ(z.max, 0.0);
  EXPECT_EQ(z.mean, 0.0);
  DisplacementField one(1, 1);
  one.u(0, 0) = 3.f;
  one.v(0, 0) = 4.f;
  EXPECT_DOUBLE_EQ(magnitude_stats(one).max, 5.0);

  SplitMix64 rng(8);
  DisplacementField f(10, 6), rot(10, 6);
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    f.u.pixels()[i] = static_cast<float>(rng.normal());
    f.v.pixels()[i] = static_cast<float>(rng.normal());
    rot.u.pixels()[i] = -f.v.pixels()[i];
    rot.v.pixels()[i] = f.u.pixels()[i];
  }
  const MagnitudeStats a = magnitude_stats(f);
  const MagnitudeStats b = magnitude_stats(rot);
  EXPECT_EQ(a.min, b.min);
  EXPECT_EQ(a.max, b.max);
  EXPECT_NEAR(a.mean, b.mean, 1e-12);
}

TEST(NormalizedCorrelation, Basics) {
  Plane<float> a(5, 5), b(5, 5);
  for (int i = 0; i < 25; ++i) {
    a.pixels()[i] = static_cast<float>(i % 7);
    b.pixels()[i] = 2.f * a.pixels()[i] + 1.f;
  }
  EXPECT_NEAR(normalized_correlation(a, b), 1.0, 1e-12);
  for (float& v : b.pixels()) v = -v;
  EXPECT_NEAR(normalized_correlation(a, b), -1.0, 1e-12);
}

}  // namespace
}  // namespace bos
