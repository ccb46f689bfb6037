#include "layertext/synthetic.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "layertext/error.hpp"
#include "layertext/image_io.hpp"

namespace layertext {

namespace {

constexpr double kBackgroundAlbedo[3] = {0.95, 0.90, 0.85};
constexpr double kTextAlbedo[3] = {0.45, 0.35, 0.30};

double lighting(double u) { return 0.30 + 0.55 * u; }
double scene_depth(double u) { return 0.2 + 0.6 * u; }

RasterImage render(const SyntheticSceneOptions& o, const BinaryMask& strokes) {
  RasterImage img(o.width, o.height);
  for (int y = 0; y < o.height; ++y) {
    for (int x = 0; x < o.width; ++x) {
      const double l = lighting(static_cast<double>(x) / (o.width - 1));
      const double* albedo = strokes.at(x, y) ? kTextAlbedo : kBackgroundAlbedo;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = quantize(l * albedo[c]);
    }
  }
  return img;
}

BinaryMask stroke_mask(const SyntheticSceneOptions& o, int dx) {
  BinaryMask m(o.width, o.height);
  for (int y = o.text.y; y < o.text.y + o.text.h; ++y) {
    for (int x = o.text.x; x < o.text.x + o.text.w; ++x) {
      if ((x - o.text.x) % o.stroke_period == o.stroke_period - 1) continue;
      if (m.contains(x + dx, y)) m.set(x + dx, y, true);
    }
  }
  return m;
}

}  // namespace

SyntheticScene make_ramp_lit_scene(const SyntheticSceneOptions& o) {
  if (o.width < 2 || o.height < 1 || o.stroke_period < 2) fail(ErrorCode::InvalidArgument, "bad synthetic scene size");
  SyntheticScene s;
  s.shift = o.shift;
  s.glyph_mask = stroke_mask(o, 0);
  s.image = render(o, s.glyph_mask);
  s.relocated_reference = render(o, stroke_mask(o, o.shift));

  std::vector<double> raw(static_cast<std::size_t>(o.width) * o.height);
  for (int y = 0; y < o.height; ++y) {
    for (int x = 0; x < o.width; ++x) {
      raw[static_cast<std::size_t>(y) * o.width + x] = scene_depth(static_cast<double>(x) / (o.width - 1));
    }
  }
  s.depth = DepthMap::from_raw(o.width, o.height, raw);

  TextRegion region;
  region.bbox = BBox{o.text.x - o.margin, o.text.y - o.margin, o.text.w + 2 * o.margin, o.text.h + 2 * o.margin}
                    .clipped({o.width, o.height});
  region.text = "IIIII";
  s.detections.regions.push_back(region);
  s.detections.image_dims = {o.width, o.height};
  return s;
}

void write_synthetic_scene(const SyntheticScene& scene, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_image(scene.image, dir / "scene.png");
  save_image(scene.relocated_reference, dir / "reference.png");
  save_mask(scene.glyph_mask, dir / "glyphs.png");
  std::vector<float> raw(scene.depth.values.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<float>(scene.depth.raw_min + scene.depth.values[i] * (scene.depth.raw_max - scene.depth.raw_min));
  }
  save_pfm(scene.depth.width, scene.depth.height, raw, dir / "depth.pfm");

  std::ofstream det(dir / "detections.json");
  det << detections_to_json(scene.detections).dump(2) << '\n';

  const nlohmann::json script = {
      {"input_image", "scene.png"},
      {"detections", "detections.json"},
      {"depth_map", "depth.pfm"},
      {"output_dir", "out"},
      {"dump_stages", true},
      {"compose", {{"method", "depth_aware"}}},
      {"regions", {{{"transforms", {{{"translate", {scene.shift, 0}}}}}}}},
  };
  std::ofstream sc(dir / "script.json");
  sc << script.dump(2) << '\n';
  if (!det || !sc) fail(ErrorCode::IoError, "cannot write synthetic scene files to " + dir.string());
}

}  // namespace layertext
