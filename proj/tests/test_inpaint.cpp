#include <random>

#include <gtest/gtest.h>

#include "layertext/image_io.hpp"
#include "layertext/inpaint.hpp"
#include "test_support.hpp"

using namespace layertext;
using layertext::testing::provider_path;

namespace {

InpaintConfig tight(int dilation = 0) {
  InpaintConfig cfg;
  cfg.dilation_radius = dilation;
  cfg.baseline_tolerance = 1e-9;
  cfg.baseline_max_iter = 20000;
  return cfg;
}

}  // namespace

TEST(InpaintBaseline, ConstantImageFillsExactly) {
  std::mt19937_64 rng(79);
  const RasterImage img(20, 14, Rgb{60, 60, 60});
  for (int trial = 0; trial < 10; ++trial) {
    BinaryMask m = layertext::testing::random_mask(20, 14, rng, 0.3);
    m.set(0, 0, false);
    EXPECT_EQ(inpaint_baseline(img, m, tight()), img);
  }
  BinaryMask block(20, 14);
  for (int y = 4; y < 9; ++y) {
    for (int x = 5; x < 12; ++x) block.set(x, y, true);
  }
  EXPECT_EQ(inpaint_baseline(img, block, InpaintConfig{}), img);
}

TEST(InpaintBaseline, OneDimensionalRamp) {
  RasterImage img(5, 1);
  img.set_pixel(0, 0, {0, 0, 0});
  img.set_pixel(4, 0, {255, 255, 255});
  for (int x = 1; x < 4; ++x) img.set_pixel(x, 0, {17, 200, 99});
  BinaryMask m(5, 1);
  for (int x = 1; x < 4; ++x) m.set(x, 0, true);
  InpaintStats stats;
  const RasterImage out = inpaint_baseline(img, m, tight(), &stats);
  EXPECT_TRUE(stats.converged);
  // Interior of u'' = 0 between 0 and 255: 255 * {1, 2, 3} / 4.
  const std::uint8_t expect[] = {0, 64, 128, 191, 255};
  for (int x = 0; x < 5; ++x) EXPECT_EQ(out.pixel(x, 0), (Rgb{expect[x], expect[x], expect[x]})) << x;
}

TEST(InpaintBaseline, UnmaskedPixelsUntouched) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    const RasterImage img = layertext::testing::random_image(24, 18, rng);
    BinaryMask m = layertext::testing::random_mask(24, 18, rng, 0.1);
    m.set(12, 9, false);
    InpaintConfig cfg;
    cfg.dilation_radius = static_cast<int>(trial % 3);
    const RasterImage out = inpaint_baseline(img, m, cfg);
    const BinaryMask hole = m.dilated(cfg.dilation_radius);
    if (hole.popcount() == hole.size().area()) continue;
    for (int y = 0; y < 18; ++y) {
      for (int x = 0; x < 24; ++x) {
        if (!hole.at(x, y)) {
          EXPECT_EQ(out.pixel(x, y), img.pixel(x, y));
        }
      }
    }
  }
}

TEST(InpaintBaseline, MaximumPrinciple) {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 100; ++trial) {
    const RasterImage img = layertext::testing::random_image(16, 12, rng);
    BinaryMask m(16, 12);
    const int x0 = static_cast<int>(rng() % 10), y0 = static_cast<int>(rng() % 8);
    for (int y = y0; y < y0 + 4; ++y) {
      for (int x = x0; x < x0 + 6; ++x) m.set(x, y, true);
    }
    const RasterImage out = inpaint_baseline(img, m, tight());
    for (int c = 0; c < 3; ++c) {
      int lo = 255, hi = 0;
      for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 16; ++x) {
          if (m.at(x, y)) continue;
          // Known pixels with a masked 4-neighbor form the boundary.
          const bool touches = (x > 0 && m.at(x - 1, y)) || (x < 15 && m.at(x + 1, y)) ||
                               (y > 0 && m.at(x, y - 1)) || (y < 11 && m.at(x, y + 1));
          if (!touches) continue;
          lo = std::min<int>(lo, img.at(x, y, c));
          hi = std::max<int>(hi, img.at(x, y, c));
        }
      }
      for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 16; ++x) {
          if (!m.at(x, y)) continue;
          EXPECT_GE(out.at(x, y, c), lo);
          EXPECT_LE(out.at(x, y, c), hi);
        }
      }
    }
  }
}

TEST(InpaintBaseline, ResidualsShrinkAndBorderHolesConverge) {
  std::mt19937_64 rng(97);
  const RasterImage img = layertext::testing::random_image(30, 20, rng);
  BinaryMask m(30, 20);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 10; ++x) m.set(x, y, true);  // touches the top-left corner
  }
  InpaintStats stats;
  const RasterImage out = inpaint_baseline(img, m, InpaintConfig{}, &stats);
  EXPECT_TRUE(stats.converged);
  ASSERT_FALSE(stats.residuals.empty());
  EXPECT_EQ(static_cast<int>(stats.residuals.size()), stats.iterations);
  EXPECT_LE(stats.residuals.back(), 1e-4);
  for (std::size_t i = 1; i < stats.residuals.size(); ++i) EXPECT_LE(stats.residuals[i], stats.residuals[i - 1] + 1e-12);
  EXPECT_EQ(out.size(), img.size());
}

TEST(InpaintBaseline, Errors) {
  const RasterImage img(4, 4);
  EXPECT_CODE(inpaint_baseline(img, BinaryMask(4, 4, true), InpaintConfig{}), ErrorCode::MaskCoversImage);
  BinaryMask center(3, 3);
  center.set(1, 1, true);
  // The radius-2 disk around the center reaches the corners (distance sqrt 2).
  EXPECT_CODE(inpaint_baseline(RasterImage(3, 3), center, InpaintConfig{}), ErrorCode::MaskCoversImage);
  EXPECT_CODE(inpaint_baseline(img, BinaryMask(3, 4), InpaintConfig{}), ErrorCode::DimensionMismatch);
  InpaintConfig bad;
  bad.baseline_max_iter = 0;
  EXPECT_CODE(bad.validate(), ErrorCode::InvalidArgument);
  bad = InpaintConfig{};
  bad.baseline_tolerance = 0.0;
  EXPECT_CODE(bad.validate(), ErrorCode::InvalidArgument);
}

TEST(Inpaint, NoneReturnsInput) {
  std::mt19937_64 rng(101);
  const RasterImage img = layertext::testing::random_image(8, 8, rng);
  InpaintConfig cfg;
  cfg.method = InpaintMethod::None;
  EXPECT_EQ(inpaint(img, BinaryMask(8, 8, true), cfg), img);
  EXPECT_EQ(parse_inpaint_method("external"), InpaintMethod::External);
  EXPECT_CODE(parse_inpaint_method("lama"), ErrorCode::InvalidScript);
}

TEST(InpaintExternal, IdentityProviderRoundTrips) {
  std::mt19937_64 rng(103);
  const RasterImage img = layertext::testing::random_image(13, 7, rng);
  const BinaryMask m = layertext::testing::random_mask(13, 7, rng);
  EXPECT_EQ(inpaint_external(img, m, ProviderCommand{{provider_path("identity_inpaint.sh").string()}}), img);
  InpaintConfig cfg;
  cfg.method = InpaintMethod::External;
  EXPECT_EQ(inpaint(img, m, cfg, ProviderCommand{{provider_path("identity_inpaint.sh").string()}}), img);
}

TEST(InpaintExternal, ProviderFailures) {
  const RasterImage img(5, 5, Rgb{1, 2, 3});
  const BinaryMask m(5, 5);
  try {
    inpaint_external(img, m, ProviderCommand{{provider_path("fail.sh").string()}});
    FAIL() << "expected ProviderNonZeroExit";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderNonZeroExit);
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
  EXPECT_CODE(inpaint_external(img, m, ProviderCommand{{provider_path("no_output.sh").string()}}),
              ErrorCode::ProviderBadOutput);
  EXPECT_CODE(inpaint_external(img, m, ProviderCommand{{"/nonexistent/inpaint"}}), ErrorCode::ProviderLaunchFailure);

  TempDir tmp;
  save_image(RasterImage(4, 5), tmp.file("small.png"));
  EXPECT_CODE(inpaint_external(img, m,
                               ProviderCommand{{provider_path("copy_to_out.sh").string(), tmp.file("small.png").string()}}),
              ErrorCode::ProviderBadOutput);
  EXPECT_CODE(inpaint_external(img, m, ProviderCommand{}), ErrorCode::ProviderLaunchFailure);
}
