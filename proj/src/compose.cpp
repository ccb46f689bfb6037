#include "layertext/compose.hpp"

#include <array>
#include <cmath>
#include <cstdint>

#include "layertext/error.hpp"

namespace layertext {

ComposeMethod parse_compose_method(const std::string& name) {
  if (name == "depth_aware") return ComposeMethod::DepthAware;
  if (name == "linear") return ComposeMethod::Linear;
  if (name == "gamma") return ComposeMethod::Gamma;
  if (name == "histogram") return ComposeMethod::Histogram;
  if (name == "none") return ComposeMethod::None;
  fail(ErrorCode::InvalidScript, "unknown compose method '" + name + "'");
}

std::string to_string(ComposeMethod m) {
  switch (m) {
    case ComposeMethod::DepthAware: return "depth_aware";
    case ComposeMethod::Linear: return "linear";
    case ComposeMethod::Gamma: return "gamma";
    case ComposeMethod::Histogram: return "histogram";
    case ComposeMethod::None: return "none";
  }
  return "unknown";
}

RasterImage compose_hard(const RasterImage& bg, const ForegroundLayer& fg) {
  require_same_size(bg.size(), fg.image.size(), "compose_hard (image)");
  require_same_size(bg.size(), fg.mask.size(), "compose_hard (mask)");
  RasterImage out = bg;
  for (int y = 0; y < bg.height(); ++y) {
    for (int x = 0; x < bg.width(); ++x) {
      if (fg.mask.at(x, y)) out.set_pixel(x, y, fg.image.pixel(x, y));
    }
  }
  return out;
}

namespace {

template <typename F>
ForegroundLayer map_masked(const ForegroundLayer& fg, F&& f) {
  ForegroundLayer out = fg;
  for (int y = 0; y < fg.image.height(); ++y) {
    for (int x = 0; x < fg.image.width(); ++x) {
      if (!fg.mask.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = f(fg.image.at(x, y, c), c);
    }
  }
  return out;
}

}  // namespace

ForegroundLayer adjust_linear(const ForegroundLayer& fg, double gamma, double delta) {
  if (!(gamma > 0.0)) fail(ErrorCode::NonPositiveGamma, "linear scale must be positive");
  return map_masked(fg, [&](std::uint8_t v, int) { return quantize(gamma * normalize(v) + delta); });
}

ForegroundLayer adjust_gamma(const ForegroundLayer& fg, double gamma) {
  if (!(gamma > 0.0)) fail(ErrorCode::NonPositiveGamma, "gamma exponent must be positive");
  std::array<std::uint8_t, 256> lut;
  for (int v = 0; v < 256; ++v) lut[v] = quantize(std::pow(v / 255.0, gamma));
  return map_masked(fg, [&](std::uint8_t v, int) { return lut[v]; });
}

ForegroundLayer histogram_match(const ForegroundLayer& fg, const RasterImage& bg,
                                const std::optional<BinaryMask>& bg_region) {
  if (!fg.mask.any()) fail(ErrorCode::EmptyMask, "foreground mask is empty");
  if (bg_region) require_same_size(bg.size(), bg_region->size(), "histogram_match (reference region)");

  std::array<std::array<std::uint64_t, 256>, 3> src{}, ref{};
  std::uint64_t n_src = 0, n_ref = 0;
  for (int y = 0; y < fg.image.height(); ++y) {
    for (int x = 0; x < fg.image.width(); ++x) {
      if (!fg.mask.at(x, y)) continue;
      ++n_src;
      for (int c = 0; c < 3; ++c) ++src[c][fg.image.at(x, y, c)];
    }
  }
  for (int y = 0; y < bg.height(); ++y) {
    for (int x = 0; x < bg.width(); ++x) {
      if (bg_region && !bg_region->at(x, y)) continue;
      ++n_ref;
      for (int c = 0; c < 3; ++c) ++ref[c][bg.at(x, y, c)];
    }
  }
  if (n_ref == 0) fail(ErrorCode::EmptyReference, "histogram reference region is empty");

  std::array<std::array<std::uint8_t, 256>, 3> lut{};
  for (int c = 0; c < 3; ++c) {
    // CDF_ref(r) >= CDF_src(v)  <=>  cum_ref[r] * n_src >= cum_src[v] * n_ref, in exact integers.
    std::uint64_t cum_src = 0, cum_ref = 0;
    int r = 0;
    cum_ref = ref[c][0];
    for (int v = 0; v < 256; ++v) {
      cum_src += src[c][v];
      while (r < 255 && cum_ref * n_src < cum_src * n_ref) cum_ref += ref[c][++r];
      lut[c][v] = static_cast<std::uint8_t>(r);
    }
  }
  return map_masked(fg, [&](std::uint8_t v, int c) { return lut[c][v]; });
}

BinaryMask annulus_region(const BinaryMask& mask, int radius) {
  return mask.dilated(radius) & mask.complement();
}

}  // namespace layertext
