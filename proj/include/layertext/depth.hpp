#pragma once

#include <optional>
#include <string>
#include <vector>

#include "layertext/core.hpp"
#include "layertext/foreground.hpp"
#include "layertext/provider.hpp"
#include "layertext/transform.hpp"

namespace layertext {

enum class DepthPreset { Uniform, HighVariation, Hdr };

std::optional<DepthPreset> parse_depth_preset(const std::string& name);
std::string to_string(DepthPreset p);

/// Contrast (lambda1) and brightness (lambda2) factors of the depth-aware
/// adjustment.
struct DepthParams {
  double lambda1 = 0.5;
  double lambda2 = 0.3;
  std::optional<DepthPreset> preset;

  static DepthParams from_preset(DepthPreset p);
  static DepthParams identity() { return {0.0, 0.0, std::nullopt}; }

  /// lambda1 in [0.1, 2.0] and lambda2 in [0.05, 1.0], or exactly (0, 0).
  void validate() const;
};

/// Delta depth (background minus foreground) under the layer mask; 0 elsewhere.
struct DepthDelta {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  Size size() const { return {width, height}; }
  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Provider protocol: `<cmd> --image in.png --out depth.pfm`. The output may be a
/// PFM or a 16-bit PNG and must match the image dimensions.
DepthMap estimate_depth_external(const RasterImage& img, const ProviderCommand& provider);

/// Depth the text carries to its new placement: for each destination pixel of
/// the transformed mask, the background depth sampled at t^-1 * dest. Zero
/// outside the transformed mask.
DepthMap foreground_depth(const DepthMap& bg_depth, const BinaryMask& src_mask, const Transform2D& t,
                          Size out_dims);

DepthDelta depth_delta(const DepthMap& bg_depth, const DepthMap& fg_depth, const BinaryMask& mask);

/// Per masked pixel and channel, in normalized units:
///   out = clamp((1 + lambda1 * dD) * in + lambda2 * dD, 0, 1)
/// Unmasked pixels are copied through.
ForegroundLayer depth_aware_adjust(const ForegroundLayer& layer, const DepthDelta& delta, const DepthParams& p);

/// The scalar form of the adjustment, before clamping and quantization.
inline double depth_adjust_value(double in, double delta, const DepthParams& p) {
  return (1.0 + p.lambda1 * delta) * in + p.lambda2 * delta;
}

}  // namespace layertext
