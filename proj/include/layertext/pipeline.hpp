#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "layertext/compose.hpp"
#include "layertext/core.hpp"
#include "layertext/depth.hpp"
#include "layertext/foreground.hpp"
#include "layertext/inpaint.hpp"
#include "layertext/metrics.hpp"
#include "layertext/provider.hpp"
#include "layertext/transform.hpp"

namespace layertext {

/// Where a region's replacement text layer comes from.
struct TamperSource {
  enum class Kind { Skip, Layer, Provider };
  Kind kind = Kind::Skip;
  /// Kind::Layer: RGB(A) image placed with its top-left corner at the bbox origin.
  std::filesystem::path layer;
  /// Optional sidecar mask; required when the layer image has no alpha channel.
  std::optional<std::filesystem::path> mask;
};

enum class HistogramReference { Annulus, Global };

/// Stage-4 adjustment applied to a region's layer before composition.
struct ComposeSpec {
  ComposeMethod method = ComposeMethod::DepthAware;
  /// Linear scale or gamma exponent. Defaults: 1.1 for linear, 0.8 for gamma.
  std::optional<double> gamma;
  /// Linear offset, normalized units.
  double delta = 0.05;
  HistogramReference histogram_reference = HistogramReference::Annulus;
  int annulus_radius = 15;

  double effective_gamma() const;
};

/// How the foreground depth D_fg is obtained.
enum class ForegroundDepthSource {
  /// Background depth carried along with the transformed glyphs.
  Transport,
  /// The depth provider run on the transformed foreground layer image.
  Provider,
};

struct RegionEdit {
  TamperSource tamper;
  /// Unparsed transform list; centers default to the region's bbox center.
  std::vector<nlohmann::json> transforms;
  std::optional<DepthParams> depth;
  std::optional<ComposeSpec> compose;
};

struct ProviderSet {
  ProviderCommand segment;
  ProviderCommand inpaint;
  ProviderCommand depth;
  ProviderCommand tamper;
};

struct EditScript {
  std::filesystem::path input_image;
  /// Exactly one of these is used: a path, or detections given inline.
  std::optional<std::filesystem::path> detections_path;
  std::optional<nlohmann::json> detections_inline;
  /// Precomputed background depth; used when no depth provider is configured.
  std::optional<std::filesystem::path> depth_map;

  std::uint64_t seed = 0;
  bool kmeans_enabled = true;
  int kmeans_max_iter = 50;
  InpaintConfig inpaint;
  DepthParams depth;
  ForegroundDepthSource depth_source = ForegroundDepthSource::Transport;
  ComposeSpec compose;
  /// Indexed like the detections; missing entries mean "no edit".
  std::vector<RegionEdit> regions;
  ProviderSet providers;

  std::filesystem::path output_dir = "out";
  bool dump_stages = false;

  /// Relative paths in the JSON resolve against `base_dir`.
  static EditScript from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static EditScript load(const std::filesystem::path& path);

  /// Edit for region i, or the default (no tamper, no transform).
  RegionEdit region(std::size_t i) const;
};

/// Result of Stages 1 and 2, shared by any number of subsequent edits.
struct LayerStack {
  RasterImage original;
  DetectionSet detections;
  /// Union of detection boxes (M).
  BinaryMask box_mask;
  /// Refined glyph mask (M-hat).
  BinaryMask glyph_mask;
  ForegroundLayer foreground;
  RasterImage background;
  InpaintStats inpaint_stats;
};

struct ArtifactEntry {
  std::string stage;
  std::filesystem::path path;
};

/// Files written by a run, in write order, plus per-run statistics.
struct StageArtifacts {
  std::filesystem::path output_dir;
  std::vector<ArtifactEntry> files;
  std::filesystem::path final_image;
  std::filesystem::path manifest;
  std::vector<std::size_t> clipped_per_region;
  std::vector<std::string> warnings;

  std::optional<std::filesystem::path> find(const std::string& stage) const;
};

struct EditResult {
  RasterImage image;
  /// Union of the placed (transformed) glyph masks.
  BinaryMask placed_mask;
  DepthMap depth_word;
  DepthMap depth_image;
  std::vector<TextRegion> regions;
  std::vector<std::size_t> clipped_per_region;
  std::vector<std::string> warnings;
};

/// Writes stage files into a directory when enabled and records each one.
class ArtifactWriter {
 public:
  ArtifactWriter() = default;
  ArtifactWriter(std::filesystem::path dir, bool enabled);

  bool enabled() const { return enabled_; }
  void image(const std::string& stage, const std::string& filename, const RasterImage& img);
  void depth(const std::string& stage, const std::string& filename, const DepthMap& d);
  /// Next number in the per-transform sequence (07, 08, ...).
  int next_transform_index() { return next_transform_++; }

  const std::vector<ArtifactEntry>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  bool enabled_ = false;
  int next_transform_ = 7;
  std::vector<ArtifactEntry> files_;
};

/// Stages 1 and 2 on an in-memory image.
LayerStack separate_layers(const EditScript& script, const RasterImage& image, const DetectionSet& dets,
                           ArtifactWriter* writer = nullptr);

/// Stages 3 and 4 for every region, over the shared layers. `bg_depth` must
/// match the canvas.
EditResult recompose(const EditScript& script, const LayerStack& layers, const DepthMap& bg_depth,
                     ArtifactWriter* writer = nullptr);

/// Background depth per the script: depth provider on the background, else the
/// `depth_map` file, else a flat 0.5 field (which zeroes the depth adjustment).
DepthMap background_depth(const EditScript& script, const RasterImage& background, std::vector<std::string>* warnings);

/// Full run from files: loads inputs, runs all stages, writes artifacts,
/// final.png and manifest.json under script.output_dir.
StageArtifacts run_pipeline(const EditScript& script);

/// Replacement layer for `region`, registered at its bbox origin on a canvas
/// of `canvas` size. Kind::Skip is not accepted here.
ForegroundLayer tamper_region(const TextRegion& region, const TamperSource& source, Size canvas,
                              const ProviderCommand& provider = {}, const RasterImage* original = nullptr);

/// Canvas-sized layer holding a filled rectangle: a stand-in glyph for tests.
ForegroundLayer solid_rectangle_layer(Size canvas, const BBox& rect, Rgb color);

/// Histogram report of `edited` against `reference` (global unless a mask is
/// given), plus SA and NED when both strings are present.
MetricReport evaluate(const RasterImage& edited, const RasterImage& reference,
                      const std::optional<BinaryMask>& mask = std::nullopt,
                      const std::optional<std::string>& pred = std::nullopt,
                      const std::optional<std::string>& target = std::nullopt);

MetricReport evaluate_files(const std::filesystem::path& edited, const std::filesystem::path& reference,
                            const std::optional<std::filesystem::path>& mask,
                            const std::optional<std::string>& pred, const std::optional<std::string>& target);

}  // namespace layertext
