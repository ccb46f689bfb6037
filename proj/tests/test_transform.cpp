#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "layertext/transform.hpp"
#include "test_support.hpp"

using namespace layertext;
using std::numbers::pi;

namespace {

void expect_maps(const Transform2D& t, Point2 from, Point2 to, double tol = 1e-12) {
  const Point2 p = t.apply(from);
  EXPECT_NEAR(p.x, to.x, tol);
  EXPECT_NEAR(p.y, to.y, tol);
}

// Direct linear transform via SVD: the null vector of the 8x9 system.
Eigen::Matrix3d dlt_homography(const std::array<Point2, 4>& src, const std::array<Point2, 4>& dst) {
  Eigen::Matrix<double, 8, 9> a;
  for (int i = 0; i < 4; ++i) {
    const double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return m / m(2, 2);
}

Transform2D random_transform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-pi, pi), off(-50, 50), sc(0.5, 2.0), persp(-1e-3, 1e-3);
  Transform2D t = compose(make_translation(off(rng), off(rng)),
                          compose(make_rotation(ang(rng), {off(rng), off(rng)}), make_scaling(sc(rng), sc(rng), {0, 0})));
  return compose(Transform2D({1, 0, 0, 0, 1, 0, persp(rng), persp(rng), 1}), t);
}

ForegroundLayer smooth_blob(int size, double radius) {
  ForegroundLayer l{RasterImage(size, size), BinaryMask(size, size), {}};
  const double c = (size - 1) / 2.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (std::hypot(x - c, y - c) > radius) continue;
      l.mask.set(x, y, true);
      l.image.set_pixel(x, y, {static_cast<std::uint8_t>(60 + 2 * x), static_cast<std::uint8_t>(200 - y),
                               static_cast<std::uint8_t>(100 + x / 2 + y / 2)});
    }
  }
  return l;
}

double psnr_inside(const RasterImage& a, const RasterImage& b, const BinaryMask& m) {
  double se = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!m.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = double(a.at(x, y, c)) - double(b.at(x, y, c));
        se += d * d;
      }
      n += 3;
    }
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / (se / n));
}

}  // namespace

TEST(Rotation, Examples) {
  EXPECT_LT(make_rotation(0.0, {3, 4}).distance(Transform2D::identity()), 1e-15);
  expect_maps(make_rotation(pi / 2, {0, 0}), {1, 0}, {0, 1});
  expect_maps(make_rotation(pi, {5, 5}), {7, 5}, {3, 5});
  // Explicit formula (x cos - y sin, x sin + y cos).
  const double th = 0.3;
  expect_maps(make_rotation(th, {0, 0}), {2, 5}, {2 * std::cos(th) - 5 * std::sin(th), 2 * std::sin(th) + 5 * std::cos(th)});
}

TEST(Translation, Examples) {
  EXPECT_EQ(make_translation(0, 0).distance(Transform2D::identity()), 0.0);
  expect_maps(make_translation(3, -2), {10, 10}, {13, 8});
  EXPECT_LT(compose(make_translation(1, 2), make_translation(3, 4)).distance(make_translation(4, 6)), 1e-15);
}

TEST(Scaling, Examples) {
  EXPECT_EQ(make_scaling(1, 1, {7, 7}).distance(Transform2D::identity()), 0.0);
  expect_maps(make_scaling(2, 2, {0, 0}), {3, 4}, {6, 8});
  const Transform2D s = make_scaling(0.5, 2, {10, 10});
  expect_maps(s, {12, 10}, {11, 10});
  expect_maps(s, {10, 12}, {10, 14});
  EXPECT_CODE(make_scaling(0, 1, {0, 0}), ErrorCode::NonPositiveScale);
  EXPECT_CODE(make_scaling(1, -2, {0, 0}), ErrorCode::NonPositiveScale);
}

TEST(Compose, Laws) {
  const Transform2D t = make_rotation(0.7, {3, 9});
  EXPECT_LT(compose(Transform2D::identity(), t).distance(t), 1e-15);
  EXPECT_LT(compose(t, t.inverse()).distance(Transform2D::identity()), 1e-9);
  EXPECT_LT(compose(make_rotation(pi / 2, {0, 0}), make_rotation(pi / 2, {0, 0})).distance(make_rotation(pi, {0, 0})),
            1e-12);
  // compose(a, b) applies b first.
  const Transform2D a = make_translation(5, 0), b = make_scaling(2, 2, {0, 0});
  expect_maps(compose(a, b), {1, 1}, {7, 2});
}

TEST(Compose, GroupLawsOnRandomTriples) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const Transform2D a = random_transform(rng), b = random_transform(rng), c = random_transform(rng);
    EXPECT_LT(compose(compose(a, b), c).distance(compose(a, compose(b, c))), 1e-9);
    EXPECT_LT(compose(compose(a, b), compose(b.inverse(), a.inverse())).distance(Transform2D::identity()), 1e-9);
  }
}

TEST(Transform2D, SingularIsRejected) {
  const Transform2D flat({1, 2, 0, 2, 4, 0, 0, 0, 1});
  EXPECT_FALSE(flat.invertible());
  EXPECT_CODE(flat.inverse(), ErrorCode::SingularTransform);
  const ForegroundLayer layer{RasterImage(2, 2), BinaryMask(2, 2), {}};
  EXPECT_CODE(apply_transform(layer, flat, {2, 2}), ErrorCode::SingularTransform);
}

TEST(QuadWarp, Examples) {
  const std::array<Point2, 4> sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  EXPECT_LT(make_quad_warp({sq, sq}).distance(Transform2D::identity()), 1e-12);
  const std::array<Point2, 4> moved{{{5, 0}, {6, 0}, {6, 1}, {5, 1}}};
  EXPECT_LT(make_quad_warp({sq, moved}).distance(make_translation(5, 0)), 1e-12);

  const std::array<Point2, 4> trap{{{0, 0}, {1, 0}, {2, 1}, {-1, 1}}};
  const Transform2D h = make_quad_warp({sq, trap});
  const Eigen::Matrix3d oracle = dlt_homography(sq, trap);
  const Eigen::Vector3d mid = oracle * Eigen::Vector3d(0.5, 0.5, 1.0);
  expect_maps(h, {0.5, 0.5}, {mid.x() / mid.z(), mid.y() / mid.z()}, 1e-9);
  for (int i = 0; i < 4; ++i) expect_maps(h, sq[i], trap[i], 1e-9);
}

TEST(QuadWarp, RandomCornersMatchDltAndCorrespondences) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> jitter(-15, 15);
  for (int i = 0; i < 200; ++i) {
    const std::array<Point2, 4> src{{{10 + jitter(rng), 10 + jitter(rng)},
                                     {200 + jitter(rng), 12 + jitter(rng)},
                                     {190 + jitter(rng), 150 + jitter(rng)},
                                     {5 + jitter(rng), 140 + jitter(rng)}}};
    const std::array<Point2, 4> dst{{{30 + jitter(rng), 20 + jitter(rng)},
                                     {180 + jitter(rng), 40 + jitter(rng)},
                                     {210 + jitter(rng), 170 + jitter(rng)},
                                     {15 + jitter(rng), 120 + jitter(rng)}}};
    const Transform2D h = make_quad_warp({src, dst});
    for (int k = 0; k < 4; ++k) expect_maps(h, src[k], dst[k], 1e-6);
    const Eigen::Matrix3d oracle = dlt_homography(src, dst);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(h(r, c), oracle(r, c), 1e-7 * std::max(1.0, std::abs(oracle(r, c))));
    }
  }
}

TEST(QuadWarp, DegenerateInputs) {
  const std::array<Point2, 4> sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const std::array<Point2, 4> collinear{{{0, 0}, {1, 0}, {2, 0}, {0, 1}}};
  const std::array<Point2, 4> bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}};
  const std::array<Point2, 4> flipped{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
  EXPECT_CODE(make_quad_warp({sq, collinear}), ErrorCode::DegenerateQuad);
  EXPECT_CODE(make_quad_warp({bowtie, sq}), ErrorCode::DegenerateQuad);
  EXPECT_CODE(make_quad_warp({sq, flipped}), ErrorCode::DegenerateQuad);
}

TEST(ApplyTransform, IdentityIsExact) {
  std::mt19937_64 rng(31);
  const RasterImage img = layertext::testing::random_image(17, 11, rng);
  const BinaryMask m = layertext::testing::random_mask(17, 11, rng);
  const ForegroundLayer layer = extract_foreground(img, m);
  const ForegroundLayer out = apply_transform(layer, Transform2D::identity(), layer.size());
  EXPECT_EQ(out.image, layer.image);
  EXPECT_EQ(out.mask, layer.mask);
}

TEST(ApplyTransform, SinglePixelTranslation) {
  ForegroundLayer layer{RasterImage(8, 5), BinaryMask(8, 5), {}};
  layer.image.set_pixel(2, 2, {9, 8, 7});
  layer.mask.set(2, 2, true);
  const ForegroundLayer out = apply_transform(layer, make_translation(3, 0), {8, 5});
  EXPECT_EQ(out.mask.popcount(), 1u);
  EXPECT_TRUE(out.mask.at(5, 2));
  EXPECT_EQ(out.image.pixel(5, 2), (Rgb{9, 8, 7}));
}

TEST(ApplyTransform, IntegerTranslationIsAPermutation) {
  std::mt19937_64 rng(37);
  const ForegroundLayer layer =
      extract_foreground(layertext::testing::random_image(20, 15, rng), layertext::testing::random_mask(20, 15, rng));
  for (const auto& [dx, dy] : std::vector<std::pair<int, int>>{{3, 0}, {-4, 2}, {0, -7}, {25, 0}}) {
    TransformStats stats;
    const ForegroundLayer out = apply_transform(layer, make_translation(dx, dy), {20, 15}, &stats);
    std::size_t clipped = 0;
    for (int y = 0; y < 15; ++y) {
      for (int x = 0; x < 20; ++x) {
        const int sx = x - dx, sy = y - dy;
        const bool inside = sx >= 0 && sy >= 0 && sx < 20 && sy < 15;
        EXPECT_EQ(out.mask.at(x, y), inside && layer.mask.at(sx, sy));
        EXPECT_EQ(out.image.pixel(x, y), inside ? layer.image.pixel(sx, sy) : Rgb{});
        const int tx = x + dx, ty = y + dy;
        if (layer.mask.at(x, y) && !(tx >= 0 && ty >= 0 && tx < 20 && ty < 15)) ++clipped;
      }
    }
    EXPECT_EQ(stats.clipped, clipped);
  }
}

TEST(ApplyTransform, QuarterTurnOfOddSquareIsAPermutation) {
  std::mt19937_64 rng(41);
  const ForegroundLayer layer =
      extract_foreground(layertext::testing::random_image(9, 9, rng), layertext::testing::random_mask(9, 9, rng));
  const ForegroundLayer out = apply_transform(layer, make_rotation(pi / 2, {4, 4}), {9, 9});
  EXPECT_EQ(out.mask.popcount(), layer.mask.popcount());
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      // (x, y) -> (4 - (y - 4), 4 + (x - 4)) = (8 - y, x).
      EXPECT_EQ(out.mask.at(8 - y, x), layer.mask.at(x, y));
      EXPECT_EQ(out.image.pixel(8 - y, x), layer.image.pixel(x, y));
    }
  }
}

TEST(ApplyTransform, RotationAndScaleRoundTrips) {
  const ForegroundLayer layer = smooth_blob(81, 30);
  const BinaryMask inner = layer.mask.eroded(2);
  const Point2 c{40, 40};
  for (double deg : {-45.0, -20.0, 5.0, 15.0, 30.0, 45.0}) {
    const Transform2D t = make_rotation(deg * pi / 180.0, c);
    const ForegroundLayer back = apply_transform(apply_transform(layer, t, layer.size()), t.inverse(), layer.size());
    EXPECT_GE(psnr_inside(back.image, layer.image, inner), 30.0) << deg;
  }
  for (double s : {0.5, 0.8, 1.5, 2.0}) {
    const Transform2D t = make_scaling(s, s, {0, 0});
    const ForegroundLayer back =
        apply_transform(apply_transform(layer, t, {162, 162}), t.inverse(), layer.size());
    EXPECT_GE(psnr_inside(back.image, layer.image, inner), 30.0) << s;
  }
}

TEST(ApplyTransform, ColorDoesNotBleedFromOutsideTheMask) {
  // A uniformly colored square shifted by half a pixel keeps its exact color.
  ForegroundLayer layer{RasterImage(10, 10), BinaryMask(10, 10), {}};
  for (int y = 3; y < 7; ++y) {
    for (int x = 3; x < 7; ++x) {
      layer.image.set_pixel(x, y, {200, 100, 50});
      layer.mask.set(x, y, true);
    }
  }
  const ForegroundLayer out = apply_transform(layer, make_translation(0.5, 0.25), {10, 10});
  ASSERT_TRUE(out.mask.any());
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      if (out.mask.at(x, y)) {
        EXPECT_EQ(out.image.pixel(x, y), (Rgb{200, 100, 50}));
      }
    }
  }
}

TEST(SampleBilinear, InterpolatesAndRejectsOutside) {
  const std::vector<float> f{0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(sample_bilinear(f, {2, 2}, {0.5, 0.5}), 1.5);
  EXPECT_DOUBLE_EQ(sample_bilinear(f, {2, 2}, {1, 1}), 3.0);
  EXPECT_TRUE(std::isnan(sample_bilinear(f, {2, 2}, {1.5, 0})));
}

TEST(TransformScript, ParsesAllKinds) {
  const auto ops = parse_transform_list(nlohmann::json::parse(R"([
    {"rotate": {"theta_deg": 90}},
    {"translate": [3, -2]},
    {"scale": {"sx": 2, "sy": 0.5, "center": [1, 1]}},
    {"warp": {"src": [[0,0],[1,0],[1,1],[0,1]], "dst": [[0,0],[2,0],[2,2],[0,2]]}}
  ])"),
                                        {10, 10});
  ASSERT_EQ(ops.size(), 4u);
  EXPECT_EQ(ops[0].kind, TransformOp::Kind::Rotation);
  EXPECT_LT(ops[0].matrix.distance(make_rotation(pi / 2, {10, 10})), 1e-12);
  EXPECT_LT(ops[1].matrix.distance(make_translation(3, -2)), 1e-15);
  EXPECT_LT(ops[2].matrix.distance(make_scaling(2, 0.5, {1, 1})), 1e-15);
  EXPECT_LT(ops[3].matrix.distance(make_scaling(2, 2, {0, 0})), 1e-12);
  // The list applies left to right: rotate first, then translate.
  const Transform2D t = compose_all({ops[0], ops[1]});
  expect_maps(t, {11, 10}, {13, 9}, 1e-12);
  EXPECT_EQ(to_string(ops[3].kind), "warp");
}

TEST(TransformScript, RejectsBadOps) {
  EXPECT_CODE(parse_transform_op(nlohmann::json::parse(R"({"shear": 1})"), {0, 0}), ErrorCode::InvalidScript);
  EXPECT_CODE(parse_transform_op(nlohmann::json::parse(R"({"translate": [1]})"), {0, 0}), ErrorCode::InvalidScript);
  EXPECT_CODE(parse_transform_op(nlohmann::json::parse(R"({"scale": {"sx": -1, "sy": 1}})"), {0, 0}),
              ErrorCode::NonPositiveScale);
}
