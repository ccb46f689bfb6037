#include "layertext/depth.hpp"

#include <algorithm>
#include <cmath>

#include "layertext/error.hpp"
#include "layertext/image_io.hpp"

namespace layertext {

std::optional<DepthPreset> parse_depth_preset(const std::string& name) {
  if (name == "uniform") return DepthPreset::Uniform;
  if (name == "high_variation") return DepthPreset::HighVariation;
  if (name == "hdr") return DepthPreset::Hdr;
  return std::nullopt;
}

std::string to_string(DepthPreset p) {
  switch (p) {
    case DepthPreset::Uniform: return "uniform";
    case DepthPreset::HighVariation: return "high_variation";
    case DepthPreset::Hdr: return "hdr";
  }
  return "unknown";
}

DepthParams DepthParams::from_preset(DepthPreset p) {
  switch (p) {
    case DepthPreset::Uniform: return {0.3, 0.2, p};
    case DepthPreset::HighVariation: return {1.0, 0.5, p};
    case DepthPreset::Hdr: return {1.5, 0.8, p};
  }
  return {};
}

void DepthParams::validate() const {
  if (lambda1 == 0.0 && lambda2 == 0.0) return;
  if (!(lambda1 >= 0.1 && lambda1 <= 2.0)) {
    fail(ErrorCode::InvalidArgument, "lambda1 must lie in [0.1, 2.0] (got " + std::to_string(lambda1) + ")");
  }
  if (!(lambda2 >= 0.05 && lambda2 <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "lambda2 must lie in [0.05, 1.0] (got " + std::to_string(lambda2) + ")");
  }
}

DepthMap estimate_depth_external(const RasterImage& img, const ProviderCommand& provider) {
  if (provider.empty()) fail(ErrorCode::ProviderLaunchFailure, "no depth provider configured");
  TempDir tmp;
  const auto in_path = tmp.file("image.png");
  const auto out_path = tmp.file("depth.pfm");
  save_image(img, in_path);
  invoke_provider(provider, {"--image", in_path.string(), "--out", out_path.string()});
  DepthMap d;
  try {
    d = load_depth(out_path);
  } catch (const Error& e) {
    fail(ErrorCode::ProviderBadOutput, "depth provider output unreadable: " + std::string(e.what()));
  }
  if (!(d.size() == img.size())) {
    fail(ErrorCode::ProviderBadOutput,
         "depth provider returned " + to_string(d.size()) + ", expected " + to_string(img.size()));
  }
  return d;
}

DepthMap foreground_depth(const DepthMap& bg_depth, const BinaryMask& src_mask, const Transform2D& t, Size out_dims) {
  require_same_size(bg_depth.size(), src_mask.size(), "foreground_depth");
  // The transported mask decides where the depth is defined; reuse the layer
  // resampler so both agree pixel for pixel.
  ForegroundLayer shape{RasterImage(src_mask.width(), src_mask.height()), src_mask, {}};
  const BinaryMask moved = apply_transform(shape, t, out_dims).mask;
  const Transform2D inv = t.inverse();

  DepthMap out = DepthMap::constant(out_dims.width, out_dims.height, 0.0f);
  out.raw_min = bg_depth.raw_min;
  out.raw_max = bg_depth.raw_max;
  for (int y = 0; y < out_dims.height; ++y) {
    for (int x = 0; x < out_dims.width; ++x) {
      if (!moved.at(x, y)) continue;
      const double v = sample_bilinear(bg_depth.values, bg_depth.size(),
                                       inv.apply({static_cast<double>(x), static_cast<double>(y)}));
      out.at(x, y) = static_cast<float>(std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0));
    }
  }
  return out;
}

DepthDelta depth_delta(const DepthMap& bg_depth, const DepthMap& fg_depth, const BinaryMask& mask) {
  require_same_size(bg_depth.size(), fg_depth.size(), "depth_delta (depth maps)");
  require_same_size(bg_depth.size(), mask.size(), "depth_delta (mask)");
  DepthDelta d{bg_depth.width, bg_depth.height, std::vector<float>(bg_depth.values.size(), 0.0f)};
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (mask.bits()[i]) d.values[i] = bg_depth.values[i] - fg_depth.values[i];
  }
  return d;
}

ForegroundLayer depth_aware_adjust(const ForegroundLayer& layer, const DepthDelta& delta, const DepthParams& p) {
  require_same_size(layer.size(), delta.size(), "depth_aware_adjust");
  p.validate();
  ForegroundLayer out = layer;
  for (int y = 0; y < layer.image.height(); ++y) {
    for (int x = 0; x < layer.image.width(); ++x) {
      if (!layer.mask.at(x, y)) continue;
      const double dd = delta.at(x, y);
      for (int c = 0; c < 3; ++c) {
        out.image.at(x, y, c) = quantize(depth_adjust_value(normalize(layer.image.at(x, y, c)), dd, p));
      }
    }
  }
  return out;
}

}  // namespace layertext
