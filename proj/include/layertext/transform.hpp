#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "layertext/core.hpp"
#include "layertext/foreground.hpp"

namespace layertext {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// 3x3 homography (row-major) mapping source pixel coordinates to destination
/// coordinates. Stored scale-normalized so that h[2][2] == 1 whenever possible.
class Transform2D {
 public:
  Transform2D();  // identity
  explicit Transform2D(const std::array<double, 9>& h);

  static Transform2D identity() { return {}; }

  double operator()(int r, int c) const { return h_[r * 3 + c]; }
  const std::array<double, 9>& matrix() const { return h_; }

  Point2 apply(Point2 p) const;
  double determinant() const;
  bool invertible() const;
  /// Throws SingularTransform.
  Transform2D inverse() const;

  /// Largest elementwise difference between the scale-normalized matrices.
  double distance(const Transform2D& o) const;

 private:
  std::array<double, 9> h_;
};

/// compose(a, b) applies b first, then a.
Transform2D compose(const Transform2D& a, const Transform2D& b);

/// Positive theta maps (x, y) -> (x cos - y sin, x sin + y cos) about `center`;
/// in y-down raster coordinates that turns content visually clockwise.
Transform2D make_rotation(double theta, Point2 center);
Transform2D make_translation(double dx, double dy);
/// Throws NonPositiveScale unless sx, sy > 0.
Transform2D make_scaling(double sx, double sy, Point2 center);

struct QuadWarp {
  std::array<Point2, 4> src;
  std::array<Point2, 4> dst;
};

/// Projective map taking src[i] to dst[i]. Both quads must be convex with the
/// same winding; otherwise DegenerateQuad. SingularSystem if the 8x8 solve fails.
Transform2D make_quad_warp(const QuadWarp& q);

struct TransformStats {
  /// Source mask pixels whose mapped center lands outside the output canvas.
  std::size_t clipped = 0;
};

/// Inverse-mapping resampler. Each destination pixel pulls from t^-1 * dest.
/// The mask is sampled bilinearly and thresholded at 0.5; colors are sampled
/// bilinearly over mask-weighted samples (so black outside the glyph does not
/// bleed into its edges). Sources outside the layer give (0,0,0) / false.
/// Source coordinates within 1e-9 of an integer snap to it, which makes
/// identity, integer translations and quarter turns exact.
ForegroundLayer apply_transform(const ForegroundLayer& layer, const Transform2D& t, Size out_dims,
                                TransformStats* stats = nullptr);

/// Bilinear sample of a scalar field at (x, y), or nullopt-like NaN when outside.
double sample_bilinear(const std::vector<float>& field, Size dims, Point2 p);

/// One user transform from a script ({"rotate": ...}, {"translate": ...},
/// {"scale": ...} or {"warp": ...}).
struct TransformOp {
  enum class Kind { Rotation, Translation, Scaling, Warp };
  Kind kind;
  Transform2D matrix;
};

std::string to_string(TransformOp::Kind kind);

/// Parses one op; centers default to `default_center` when omitted.
TransformOp parse_transform_op(const nlohmann::json& j, Point2 default_center);
/// Parses a list in application order.
std::vector<TransformOp> parse_transform_list(const nlohmann::json& j, Point2 default_center);
/// Composes a list so that ops[0] is applied first.
Transform2D compose_all(const std::vector<TransformOp>& ops);

}  // namespace layertext
