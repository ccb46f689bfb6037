#include "layertext/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "layertext/error.hpp"

namespace layertext {

using nlohmann::json;

namespace {

constexpr double kSingularEps = 1e-12;
constexpr double kSnapEps = 1e-9;

std::array<double, 9> normalized(std::array<double, 9> h) {
  double max_abs = 0.0;
  for (double v : h) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) return h;
  if (std::abs(h[8]) > kSingularEps * max_abs) {
    const double s = h[8];
    for (double& v : h) v /= s;
  } else {
    for (double& v : h) v /= max_abs;
  }
  return h;
}

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < kSnapEps ? r : v;
}

}  // namespace

Transform2D::Transform2D() : h_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Transform2D::Transform2D(const std::array<double, 9>& h) : h_(normalized(h)) {}

Point2 Transform2D::apply(Point2 p) const {
  const double w = h_[6] * p.x + h_[7] * p.y + h_[8];
  return {(h_[0] * p.x + h_[1] * p.y + h_[2]) / w, (h_[3] * p.x + h_[4] * p.y + h_[5]) / w};
}

double Transform2D::determinant() const {
  double max_abs = 0.0;
  for (double v : h_) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) return 0.0;
  auto m = h_;
  for (double& v : m) v /= max_abs;
  return det3(m);
}

bool Transform2D::invertible() const { return std::abs(determinant()) > kSingularEps; }

Transform2D Transform2D::inverse() const {
  if (!invertible()) fail(ErrorCode::SingularTransform, "homography is not invertible");
  const auto& m = h_;
  const double d = det3(m);
  const std::array<double, 9> adj{
      m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
      m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
      m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3],
  };
  std::array<double, 9> inv;
  for (int i = 0; i < 9; ++i) inv[i] = adj[i] / d;
  return Transform2D(inv);
}

double Transform2D::distance(const Transform2D& o) const {
  double d = 0.0;
  for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(h_[i] - o.h_[i]));
  return d;
}

Transform2D compose(const Transform2D& a, const Transform2D& b) {
  std::array<double, 9> m{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(r, k) * b(k, c);
      m[r * 3 + c] = s;
    }
  }
  return Transform2D(m);
}

Transform2D make_translation(double dx, double dy) { return Transform2D({1, 0, dx, 0, 1, dy, 0, 0, 1}); }

Transform2D make_rotation(double theta, Point2 center) {
  if (!std::isfinite(theta)) fail(ErrorCode::InvalidArgument, "rotation angle must be finite");
  const double c = std::cos(theta), s = std::sin(theta);
  const Transform2D rot({c, -s, 0, s, c, 0, 0, 0, 1});
  return compose(make_translation(center.x, center.y), compose(rot, make_translation(-center.x, -center.y)));
}

Transform2D make_scaling(double sx, double sy, Point2 center) {
  if (!(sx > 0.0) || !(sy > 0.0) || !std::isfinite(sx) || !std::isfinite(sy)) {
    fail(ErrorCode::NonPositiveScale, "scale factors must be positive");
  }
  return Transform2D({sx, 0, center.x - sx * center.x, 0, sy, center.y - sy * center.y, 0, 0, 1});
}

// ---------------------------------------------------------------------------
// Quad warp

namespace {

// Sign of the turn at every corner; 0 when a corner is (nearly) collinear or
// the turns disagree (non-convex / self-intersecting).
int quad_orientation(const std::array<Point2, 4>& q) {
  double scale = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) scale = std::max(scale, std::hypot(q[i].x - q[j].x, q[i].y - q[j].y));
  }
  if (!(scale > 0.0)) return 0;
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const Point2& a = q[i];
    const Point2& b = q[(i + 1) % 4];
    const Point2& c = q[(i + 2) % 4];
    const double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    if (std::abs(cross) <= 1e-9 * scale * scale) return 0;
    const int s = cross > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return 0;
  }
  return sign;
}

// Similarity that moves the centroid to the origin and the mean distance to sqrt(2).
Transform2D conditioning(const std::array<Point2, 4>& q) {
  double cx = 0, cy = 0;
  for (const auto& p : q) cx += p.x, cy += p.y;
  cx /= 4.0;
  cy /= 4.0;
  double mean = 0.0;
  for (const auto& p : q) mean += std::hypot(p.x - cx, p.y - cy);
  mean /= 4.0;
  const double s = std::numbers::sqrt2 / mean;
  return Transform2D({s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1});
}

// Gaussian elimination with partial pivoting; false if a pivot vanishes.
bool solve8(std::array<std::array<double, 9>, 8>& a, std::array<double, 8>& x) {
  for (int col = 0; col < 8; ++col) {
    int piv = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < kSingularEps) return false;
    std::swap(a[piv], a[col]);
    for (int r = col + 1; r < 8; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  for (int r = 7; r >= 0; --r) {
    double s = a[r][8];
    for (int c = r + 1; c < 8; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

}  // namespace

Transform2D make_quad_warp(const QuadWarp& q) {
  const int so = quad_orientation(q.src);
  const int d_o = quad_orientation(q.dst);
  if (so == 0) fail(ErrorCode::DegenerateQuad, "source quad is degenerate or not convex");
  if (d_o == 0) fail(ErrorCode::DegenerateQuad, "destination quad is degenerate or not convex");
  if (so != d_o) fail(ErrorCode::DegenerateQuad, "source and destination quads have opposite winding");

  const Transform2D ts = conditioning(q.src);
  const Transform2D td = conditioning(q.dst);
  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const Point2 s = ts.apply(q.src[i]);
    const Point2 d = td.apply(q.dst[i]);
    a[2 * i] = {s.x, s.y, 1, 0, 0, 0, -s.x * d.x, -s.y * d.x, d.x};
    a[2 * i + 1] = {0, 0, 0, s.x, s.y, 1, -s.x * d.y, -s.y * d.y, d.y};
  }
  std::array<double, 8> x{};
  if (!solve8(a, x)) fail(ErrorCode::SingularSystem, "quad correspondence system is singular");
  const Transform2D hn({x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], 1.0});
  return compose(td.inverse(), compose(hn, ts));
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

struct Tap {
  int x0, y0;
  double fx, fy;
};

// Bilinear footprint of p inside a w x h grid, or false when p is outside.
bool footprint(Point2 p, int w, int h, Tap& t) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  const double sx = snap(p.x), sy = snap(p.y);
  if (sx < 0.0 || sy < 0.0 || sx > w - 1 || sy > h - 1) return false;
  t.x0 = static_cast<int>(std::floor(sx));
  t.y0 = static_cast<int>(std::floor(sy));
  t.fx = sx - t.x0;
  t.fy = sy - t.y0;
  return true;
}

template <typename F>
void for_each_tap(const Tap& t, F&& f) {
  const double wx[2] = {1.0 - t.fx, t.fx};
  const double wy[2] = {1.0 - t.fy, t.fy};
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      const double wgt = wx[i] * wy[j];
      if (wgt > 0.0) f(t.x0 + i, t.y0 + j, wgt);
    }
  }
}

// Destination points that map behind the projective horizon are invalid.
bool map_source(const Transform2D& inv, int x, int y, Point2& out) {
  const double w = inv(2, 0) * x + inv(2, 1) * y + inv(2, 2);
  if (!(w > 0.0)) return false;
  out = inv.apply({static_cast<double>(x), static_cast<double>(y)});
  return true;
}

}  // namespace

double sample_bilinear(const std::vector<float>& field, Size dims, Point2 p) {
  Tap t;
  if (!footprint(p, dims.width, dims.height, t)) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  for_each_tap(t, [&](int x, int y, double wgt) { v += wgt * field[static_cast<std::size_t>(y) * dims.width + x]; });
  return v;
}

ForegroundLayer apply_transform(const ForegroundLayer& layer, const Transform2D& t, Size out_dims,
                                TransformStats* stats) {
  const Transform2D inv = t.inverse();
  const int sw = layer.image.width(), sh = layer.image.height();
  ForegroundLayer out{RasterImage(out_dims.width, out_dims.height), BinaryMask(out_dims.width, out_dims.height),
                      layer.regions};
  for (int y = 0; y < out_dims.height; ++y) {
    for (int x = 0; x < out_dims.width; ++x) {
      Point2 src;
      Tap tap;
      if (!map_source(inv, x, y, src) || !footprint(src, sw, sh, tap)) continue;
      double coverage = 0.0;
      double acc[3] = {0, 0, 0};
      for_each_tap(tap, [&](int sx, int sy, double wgt) {
        if (!layer.mask.at(sx, sy)) return;
        coverage += wgt;
        for (int c = 0; c < 3; ++c) acc[c] += wgt * layer.image.at(sx, sy, c);
      });
      if (coverage < 0.5) continue;
      out.mask.set(x, y, true);
      for (int c = 0; c < 3; ++c) {
        out.image.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(acc[c] / coverage + 0.5), 0.0, 255.0));
      }
    }
  }
  if (stats) {
    stats->clipped = 0;
    for (int y = 0; y < sh; ++y) {
      for (int x = 0; x < sw; ++x) {
        if (!layer.mask.at(x, y)) continue;
        const Point2 d = t.apply({static_cast<double>(x), static_cast<double>(y)});
        if (!(d.x >= -0.5 && d.y >= -0.5 && d.x < out_dims.width - 0.5 && d.y < out_dims.height - 0.5)) {
          ++stats->clipped;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Script parsing

std::string to_string(TransformOp::Kind kind) {
  switch (kind) {
    case TransformOp::Kind::Rotation: return "rotation";
    case TransformOp::Kind::Translation: return "translation";
    case TransformOp::Kind::Scaling: return "scaling";
    case TransformOp::Kind::Warp: return "warp";
  }
  return "unknown";
}

namespace {

Point2 parse_point(const json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::InvalidScript, "expected a point [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::array<Point2, 4> parse_quad(const json& j) {
  if (!j.is_array() || j.size() != 4) fail(ErrorCode::InvalidScript, "warp quads need exactly 4 corners");
  return {parse_point(j[0]), parse_point(j[1]), parse_point(j[2]), parse_point(j[3])};
}

}  // namespace

TransformOp parse_transform_op(const json& j, Point2 default_center) {
  if (!j.is_object() || j.size() != 1) {
    fail(ErrorCode::InvalidScript, "a transform must be an object with exactly one key");
  }
  try {
    if (j.contains("rotate")) {
      const json& r = j["rotate"];
      const double deg = r.at("theta_deg").get<double>();
      const Point2 c = r.contains("center") ? parse_point(r["center"]) : default_center;
      return {TransformOp::Kind::Rotation, make_rotation(deg * std::numbers::pi / 180.0, c)};
    }
    if (j.contains("translate")) {
      const Point2 d = parse_point(j["translate"]);
      return {TransformOp::Kind::Translation, make_translation(d.x, d.y)};
    }
    if (j.contains("scale")) {
      const json& s = j["scale"];
      const Point2 c = s.contains("center") ? parse_point(s["center"]) : default_center;
      return {TransformOp::Kind::Scaling, make_scaling(s.at("sx").get<double>(), s.at("sy").get<double>(), c)};
    }
    if (j.contains("warp")) {
      const json& w = j["warp"];
      return {TransformOp::Kind::Warp, make_quad_warp({parse_quad(w.at("src")), parse_quad(w.at("dst"))})};
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidScript, std::string("bad transform: ") + e.what());
  }
  fail(ErrorCode::InvalidScript, "unknown transform '" + j.begin().key() + "'");
}

std::vector<TransformOp> parse_transform_list(const json& j, Point2 default_center) {
  if (j.is_null()) return {};
  if (!j.is_array()) fail(ErrorCode::InvalidScript, "transforms must be a list");
  std::vector<TransformOp> ops;
  for (const auto& op : j) ops.push_back(parse_transform_op(op, default_center));
  return ops;
}

Transform2D compose_all(const std::vector<TransformOp>& ops) {
  Transform2D total;
  for (const auto& op : ops) total = compose(op.matrix, total);
  return total;
}

}  // namespace layertext
