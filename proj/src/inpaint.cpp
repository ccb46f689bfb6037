#include "layertext/inpaint.hpp"

#include <algorithm>
#include <cmath>

#include "layertext/error.hpp"
#include "layertext/image_io.hpp"

namespace layertext {

InpaintMethod parse_inpaint_method(const std::string& name) {
  if (name == "baseline") return InpaintMethod::Baseline;
  if (name == "external") return InpaintMethod::External;
  if (name == "none") return InpaintMethod::None;
  fail(ErrorCode::InvalidScript, "unknown inpaint method '" + name + "'");
}

void InpaintConfig::validate() const {
  if (baseline_max_iter < 1) fail(ErrorCode::InvalidArgument, "inpaint max_iter must be >= 1");
  if (!(baseline_tolerance > 0.0)) fail(ErrorCode::InvalidArgument, "inpaint tolerance must be > 0");
  if (dilation_radius < 0) fail(ErrorCode::InvalidArgument, "inpaint dilation_radius must be >= 0");
}

RasterImage inpaint_baseline(const RasterImage& img, const BinaryMask& mask, const InpaintConfig& cfg,
                             InpaintStats* stats) {
  require_same_size(img.size(), mask.size(), "inpaint_baseline");
  cfg.validate();
  const BinaryMask hole = mask.dilated(cfg.dilation_radius);
  if (hole.all()) fail(ErrorCode::MaskCoversImage, "inpainting mask covers the whole image");

  const int w = img.width();
  const int h = img.height();
  // Index of each hole pixel in the unknown vector, or -1 for known pixels.
  std::vector<int> slot(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::pair<int, int>> unknowns;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (hole.at(x, y)) {
        slot[static_cast<std::size_t>(y) * w + x] = static_cast<int>(unknowns.size());
        unknowns.emplace_back(x, y);
      }
    }
  }
  RasterImage out = img;
  if (unknowns.empty()) {
    if (stats) *stats = {0, true, {}};
    return out;
  }

  // Per unknown: up to 4 in-bounds neighbors, each either an unknown slot or a
  // known constant folded into `known_sum`.
  struct Stencil {
    int nb[4];
    int n_unknown = 0;
    int n_total = 0;
    double known_sum[3] = {0, 0, 0};
  };
  std::vector<Stencil> stencils(unknowns.size());
  double boundary_sum[3] = {0, 0, 0};
  std::size_t boundary_count = 0;
  constexpr int kDx[4] = {1, -1, 0, 0};
  constexpr int kDy[4] = {0, 0, 1, -1};
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const auto [x, y] = unknowns[i];
    Stencil& s = stencils[i];
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx[k], ny = y + kDy[k];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      ++s.n_total;
      const int j = slot[static_cast<std::size_t>(ny) * w + nx];
      if (j >= 0) {
        s.nb[s.n_unknown++] = j;
      } else {
        for (int c = 0; c < 3; ++c) {
          const double v = normalize(img.at(nx, ny, c));
          s.known_sum[c] += v;
          boundary_sum[c] += v;
        }
        ++boundary_count;
      }
    }
  }

  // Starting guess: mean of the row-wise and column-wise linear interpolations
  // between the nearest known pixels. Every estimate is a convex combination of
  // boundary samples; rows and columns with no known pixel fall back to the
  // boundary mean (boundary_count > 0 since the hole is not the whole grid).
  std::vector<double> cur(unknowns.size() * 3), next(unknowns.size() * 3);
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const auto [x, y] = unknowns[i];
    double est[3] = {0, 0, 0};
    int n_est = 0;
    auto interpolate = [&](int dx, int dy) {
      int ax = x, ay = y, bx = x, by = y;
      while (ax >= 0 && ay >= 0 && hole.at(ax, ay)) ax -= dx, ay -= dy;
      while (bx < w && by < h && hole.at(bx, by)) bx += dx, by += dy;
      const bool has_a = ax >= 0 && ay >= 0;
      const bool has_b = bx < w && by < h;
      if (!has_a && !has_b) return;
      const double da = std::abs((x - ax) + (y - ay));
      const double db = std::abs((bx - x) + (by - y));
      for (int c = 0; c < 3; ++c) {
        double v;
        if (has_a && has_b) {
          v = (db * normalize(img.at(ax, ay, c)) + da * normalize(img.at(bx, by, c))) / (da + db);
        } else {
          v = has_a ? normalize(img.at(ax, ay, c)) : normalize(img.at(bx, by, c));
        }
        est[c] += v;
      }
      ++n_est;
    };
    interpolate(1, 0);
    interpolate(0, 1);
    for (int c = 0; c < 3; ++c) {
      cur[i * 3 + c] = n_est > 0 ? est[c] / n_est : boundary_sum[c] / static_cast<double>(boundary_count);
    }
  }

  InpaintStats local;
  for (int iter = 0; iter < cfg.baseline_max_iter; ++iter) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < unknowns.size(); ++i) {
      const Stencil& s = stencils[i];
      for (int c = 0; c < 3; ++c) {
        double sum = s.known_sum[c];
        for (int k = 0; k < s.n_unknown; ++k) sum += cur[static_cast<std::size_t>(s.nb[k]) * 3 + c];
        const double v = sum / s.n_total;
        max_change = std::max(max_change, std::abs(v - cur[i * 3 + c]));
        next[i * 3 + c] = v;
      }
    }
    cur.swap(next);
    local.iterations = iter + 1;
    local.residuals.push_back(max_change);
    if (max_change <= cfg.baseline_tolerance) {
      local.converged = true;
      break;
    }
  }

  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const auto [x, y] = unknowns[i];
    for (int c = 0; c < 3; ++c) out.at(x, y, c) = quantize(cur[i * 3 + c]);
  }
  if (stats) *stats = std::move(local);
  return out;
}

RasterImage inpaint_external(const RasterImage& img, const BinaryMask& mask, const ProviderCommand& provider) {
  require_same_size(img.size(), mask.size(), "inpaint_external");
  if (provider.empty()) fail(ErrorCode::ProviderLaunchFailure, "no inpaint provider configured");
  TempDir tmp;
  const auto in_path = tmp.file("image.png");
  const auto mask_path = tmp.file("mask.png");
  const auto out_path = tmp.file("out.png");
  save_image(img, in_path);
  save_mask(mask, mask_path);
  invoke_provider(provider, {"--image", in_path.string(), "--mask", mask_path.string(), "--out", out_path.string()});

  RasterImage result;
  try {
    result = load_image(out_path);
  } catch (const Error& e) {
    fail(ErrorCode::ProviderBadOutput, "inpaint provider output unreadable: " + std::string(e.what()));
  }
  if (!(result.size() == img.size())) {
    fail(ErrorCode::ProviderBadOutput,
         "inpaint provider returned " + to_string(result.size()) + ", expected " + to_string(img.size()));
  }
  return result;
}

RasterImage inpaint(const RasterImage& img, const BinaryMask& mask, const InpaintConfig& cfg,
                    const ProviderCommand& provider) {
  switch (cfg.method) {
    case InpaintMethod::Baseline: return inpaint_baseline(img, mask, cfg);
    case InpaintMethod::External: return inpaint_external(img, mask, provider);
    case InpaintMethod::None: break;
  }
  require_same_size(img.size(), mask.size(), "inpaint");
  return img;
}

}  // namespace layertext
