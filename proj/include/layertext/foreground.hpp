#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "layertext/core.hpp"

namespace layertext {

/// Detected text regions in document order, plus the dimensions of the image
/// they were detected on.
struct DetectionSet {
  std::vector<TextRegion> regions;
  Size image_dims;
};

/// Parses the detection JSON array: [{"bbox": [x,y,w,h], "text": "...",
/// "tampered_text": "...", "prompt": "..."}, ...].
DetectionSet parse_detections(const nlohmann::json& j, Size image_dims);
DetectionSet load_detections(const std::filesystem::path& path, Size image_dims);
nlohmann::json detections_to_json(const DetectionSet& dets);

/// Text layer: image is zero wherever mask is false.
struct ForegroundLayer {
  RasterImage image;
  BinaryMask mask;
  std::vector<TextRegion> regions;

  Size size() const { return image.size(); }
};

/// Union of all boxes, clipped to the image.
BinaryMask generate_mask(const DetectionSet& dets);

struct KMeansOptions {
  int k = 2;
  std::uint64_t seed = 0;
  int max_iter = 50;
};

/// Two-cluster filtering of RGB values. Each box is clustered independently
/// over the mask pixels it covers; the larger cluster is kept and the smaller
/// cleared. Equal sizes keep the brighter centroid (Rec.601 luma). Regions with
/// fewer than two distinct colors are left alone. A pixel covered by several
/// boxes survives if any of them keeps it.
BinaryMask kmeans_refine(const RasterImage& img, const BinaryMask& mask, std::span<const BBox> regions,
                         const KMeansOptions& opts = {});

/// Whole-mask variant: the mask is treated as a single region.
BinaryMask kmeans_refine(const RasterImage& img, const BinaryMask& mask, const KMeansOptions& opts = {});

/// Assignment of `points` to two clusters; true marks the kept (majority) cluster.
/// Exposed for testing the clustering in isolation.
std::vector<bool> two_means_keep(std::span<const Rgb> points, std::uint64_t seed, int max_iter);

ForegroundLayer extract_foreground(const RasterImage& img, const BinaryMask& mask);

/// Zeroes layer pixels outside `keep` and narrows the mask accordingly.
ForegroundLayer restrict_layer(const ForegroundLayer& layer, const BinaryMask& keep);

}  // namespace layertext
