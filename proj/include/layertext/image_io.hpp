#pragma once

#include <filesystem>
#include <optional>

#include "layertext/core.hpp"

namespace layertext {

struct ImageLoadInfo {
  bool alpha_dropped = false;
};

/// Decodes an 8-bit PNG (RGB, gray, palette without alpha, or with an alpha channel
/// that is dropped) or a binary PPM (P6, maxval 255). Samples are taken verbatim;
/// no gamma or color management is applied.
RasterImage load_image(const std::filesystem::path& path, ImageLoadInfo* info = nullptr);

/// Like load_image but keeps the alpha channel (if any) as a mask: alpha >= 128 => true.
RasterImage load_image_with_alpha(const std::filesystem::path& path, std::optional<BinaryMask>& alpha);

/// Writes an 8-bit RGB PNG.
void save_image(const RasterImage& img, const std::filesystem::path& path);

/// 8-bit gray PNG; a sample >= 128 reads as true. RGB inputs use their first channel.
BinaryMask load_mask(const std::filesystem::path& path);
/// 8-bit gray PNG with 255 for true and 0 for false.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// 16-bit (or 8-bit) single-channel PNG, or a little-endian grayscale PFM ("Pf").
/// Values are normalized to [0,1]; see DepthMap::from_raw.
DepthMap load_depth(const std::filesystem::path& path);

/// Grayscale little-endian PFM holding the normalized values (bottom row first,
/// per the PFM convention).
void save_depth_pfm(const DepthMap& depth, const std::filesystem::path& path);
/// Raw samples, for writing provider fixtures.
void save_pfm(int width, int height, const std::vector<float>& values, const std::filesystem::path& path);
/// 16-bit gray PNG of raw samples.
void save_png16(int width, int height, const std::vector<std::uint16_t>& values, const std::filesystem::path& path);

}  // namespace layertext
