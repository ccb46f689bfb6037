#pragma once

#include <filesystem>

#include "layertext/core.hpp"
#include "layertext/foreground.hpp"

namespace layertext {

/// A horizontally lit scene with a block of dark vertical strokes. Lighting
/// and depth both rise linearly from left to right, so moving the text to the
/// right should brighten it.
struct SyntheticScene {
  RasterImage image;
  /// Depth field, increasing with x.
  DepthMap depth;
  /// One region covering the stroke block plus a background margin.
  DetectionSet detections;
  /// True on stroke pixels.
  BinaryMask glyph_mask;
  /// The same scene rendered with the strokes shifted by `shift` pixels:
  /// what an ideal relocation would produce.
  RasterImage relocated_reference;
  int shift = 0;
};

struct SyntheticSceneOptions {
  int width = 256;
  int height = 128;
  BBox text{40, 44, 60, 40};
  /// Every `stroke_period`-th column of the block is background.
  int stroke_period = 6;
  int margin = 2;
  int shift = 40;
};

SyntheticScene make_ramp_lit_scene(const SyntheticSceneOptions& opts = {});

/// Writes scene.png, depth.pfm, detections.json, reference.png and a
/// script.json that translates the text by `shift`, into `dir`.
void write_synthetic_scene(const SyntheticScene& scene, const std::filesystem::path& dir);

}  // namespace layertext
