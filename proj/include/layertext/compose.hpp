#pragma once

#include <optional>
#include <string>

#include "layertext/core.hpp"
#include "layertext/foreground.hpp"

namespace layertext {

enum class ComposeMethod { DepthAware, Linear, Gamma, Histogram, None };

ComposeMethod parse_compose_method(const std::string& name);
std::string to_string(ComposeMethod m);

/// out(p) = fg(p) where the layer mask is set, bg(p) elsewhere. No feathering.
RasterImage compose_hard(const RasterImage& bg, const ForegroundLayer& fg);

/// out = clamp(gamma * in + delta, 0, 1) per masked sample; delta in normalized units.
ForegroundLayer adjust_linear(const ForegroundLayer& fg, double gamma, double delta);

/// out = in ^ gamma per masked sample.
ForegroundLayer adjust_gamma(const ForegroundLayer& fg, double gamma);

/// Per-channel CDF matching of the masked foreground samples against the
/// reference pixels of `bg` (those under `bg_region`, or all of `bg`). Each
/// value v maps to the smallest r with CDF_ref(r) >= CDF_fg(v).
ForegroundLayer histogram_match(const ForegroundLayer& fg, const RasterImage& bg,
                                const std::optional<BinaryMask>& bg_region = std::nullopt);

/// Background pixels within `radius` of the mask but outside it.
BinaryMask annulus_region(const BinaryMask& mask, int radius = 15);

}  // namespace layertext
