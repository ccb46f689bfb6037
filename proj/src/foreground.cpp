#include "layertext/foreground.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "layertext/error.hpp"

namespace layertext {

using nlohmann::json;

DetectionSet parse_detections(const json& j, Size image_dims) {
  if (!j.is_array()) fail(ErrorCode::InvalidScript, "detections must be a JSON array");
  DetectionSet dets;
  dets.image_dims = image_dims;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& r = j[i];
    const std::string where = "detection " + std::to_string(i);
    if (!r.is_object() || !r.contains("bbox") || !r["bbox"].is_array() || r["bbox"].size() != 4) {
      fail(ErrorCode::InvalidScript, where + ": missing bbox [x,y,w,h]");
    }
    TextRegion region;
    try {
      const auto& b = r["bbox"];
      region.bbox = {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
      region.text = r.value("text", std::string{});
      if (r.contains("tampered_text")) region.tampered_text = r["tampered_text"].get<std::string>();
      if (r.contains("prompt")) region.prompt = r["prompt"].get<std::string>();
    } catch (const json::exception& e) {
      fail(ErrorCode::InvalidScript, where + ": " + e.what());
    }
    if (region.bbox.w < 1 || region.bbox.h < 1) fail(ErrorCode::InvalidScript, where + ": bbox w and h must be >= 1");
    if (region.text.empty()) fail(ErrorCode::InvalidScript, where + ": text must be non-empty");
    dets.regions.push_back(std::move(region));
  }
  return dets;
}

DetectionSet load_detections(const std::filesystem::path& path, Size image_dims) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FileNotFound, path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidScript, path.string() + ": " + e.what());
  }
  return parse_detections(j, image_dims);
}

json detections_to_json(const DetectionSet& dets) {
  json arr = json::array();
  for (const auto& r : dets.regions) {
    json o{{"bbox", {r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h}}, {"text", r.text}};
    if (r.tampered_text) o["tampered_text"] = *r.tampered_text;
    if (r.prompt) o["prompt"] = *r.prompt;
    arr.push_back(std::move(o));
  }
  return arr;
}

BinaryMask generate_mask(const DetectionSet& dets) {
  if (dets.regions.empty()) fail(ErrorCode::EmptyDetections, "no text regions");
  BinaryMask mask(dets.image_dims.width, dets.image_dims.height);
  bool any = false;
  for (const auto& r : dets.regions) {
    const BBox c = r.bbox.clipped(dets.image_dims);
    if (c.w <= 0 || c.h <= 0) continue;
    any = true;
    for (int y = c.y; y < c.y + c.h; ++y) {
      for (int x = c.x; x < c.x + c.w; ++x) mask.set(x, y, true);
    }
  }
  if (!any) fail(ErrorCode::AllBoxesOutOfBounds, "no bounding box intersects the image");
  return mask;
}

// ---------------------------------------------------------------------------
// k-Means (k = 2)

namespace {

struct Centroid {
  double v[3] = {0, 0, 0};
};

double sq_dist(const Rgb& p, const Centroid& c) {
  const double dr = p.r - c.v[0], dg = p.g - c.v[1], db = p.b - c.v[2];
  return dr * dr + dg * dg + db * db;
}

double luma(const Centroid& c) { return 0.299 * c.v[0] + 0.587 * c.v[1] + 0.114 * c.v[2]; }

Centroid as_centroid(const Rgb& p) { return {{double(p.r), double(p.g), double(p.b)}}; }

// Uniform in [0, n) from a raw 64-bit draw; keeps results identical across
// standard library implementations.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<bool> two_means_keep(std::span<const Rgb> points, std::uint64_t seed, int max_iter) {
  const std::size_t n = points.size();
  std::vector<bool> keep(n, true);
  if (n < 2) return keep;
  {
    std::set<std::uint32_t> distinct;
    for (const auto& p : points) distinct.insert((p.r << 16) | (p.g << 8) | p.b);
    if (distinct.size() < 2) return keep;
  }

  // k-means++ seeding.
  std::mt19937_64 rng(seed);
  Centroid c[2];
  c[0] = as_centroid(points[draw_index(rng, n)]);
  {
    std::vector<double> d2(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += (d2[i] = sq_dist(points[i], c[0]));
    double target = draw_unit(rng) * total;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      pick = i;
      target -= d2[i];
      if (target < 0.0) break;
    }
    c[1] = as_centroid(points[pick]);
  }

  std::vector<std::uint8_t> assign(n, 2);
  for (int iter = 0; iter < std::max(1, max_iter); ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t a = sq_dist(points[i], c[1]) < sq_dist(points[i], c[0]) ? 1 : 0;
      if (a != assign[i]) {
        assign[i] = a;
        changed = true;
      }
    }
    if (!changed) break;
    double sum[2][3] = {};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      const int a = assign[i];
      sum[a][0] += points[i].r;
      sum[a][1] += points[i].g;
      sum[a][2] += points[i].b;
      ++count[a];
    }
    for (int a = 0; a < 2; ++a) {
      if (count[a] == 0) continue;  // empty cluster keeps its previous centroid
      for (int ch = 0; ch < 3; ++ch) c[a].v[ch] = sum[a][ch] / static_cast<double>(count[a]);
    }
  }

  const std::size_t n1 = static_cast<std::size_t>(std::count(assign.begin(), assign.end(), std::uint8_t{1}));
  const std::size_t n0 = n - n1;
  std::uint8_t kept;
  if (n0 != n1) {
    kept = n1 > n0 ? 1 : 0;
  } else {
    kept = luma(c[1]) > luma(c[0]) ? 1 : 0;
  }
  for (std::size_t i = 0; i < n; ++i) keep[i] = assign[i] == kept;
  return keep;
}

BinaryMask kmeans_refine(const RasterImage& img, const BinaryMask& mask, std::span<const BBox> regions,
                         const KMeansOptions& opts) {
  require_same_size(img.size(), mask.size(), "kmeans_refine");
  if (opts.k != 2) fail(ErrorCode::InvalidArgument, "only k = 2 is supported");
  if (mask.popcount() < static_cast<std::size_t>(opts.k)) {
    fail(ErrorCode::TooFewPixels, "mask has fewer than k true pixels");
  }

  BinaryMask out(mask.width(), mask.height());
  BinaryMask covered(mask.width(), mask.height());
  std::vector<Rgb> points;
  std::vector<std::pair<int, int>> coords;
  for (const BBox& box : regions) {
    const BBox c = box.clipped(mask.size());
    points.clear();
    coords.clear();
    for (int y = c.y; y < c.y + c.h; ++y) {
      for (int x = c.x; x < c.x + c.w; ++x) {
        if (!mask.at(x, y)) continue;
        points.push_back(img.pixel(x, y));
        coords.emplace_back(x, y);
        covered.set(x, y, true);
      }
    }
    const std::vector<bool> keep = two_means_keep(points, opts.seed, opts.max_iter);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (keep[i]) out.set(coords[i].first, coords[i].second, true);
    }
  }
  // Mask pixels outside every box are not clustered and pass through.
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) && !covered.at(x, y)) out.set(x, y, true);
    }
  }
  return out;
}

BinaryMask kmeans_refine(const RasterImage& img, const BinaryMask& mask, const KMeansOptions& opts) {
  const BBox whole{0, 0, mask.width(), mask.height()};
  return kmeans_refine(img, mask, std::span<const BBox>(&whole, 1), opts);
}

ForegroundLayer extract_foreground(const RasterImage& img, const BinaryMask& mask) {
  require_same_size(img.size(), mask.size(), "extract_foreground");
  ForegroundLayer layer{RasterImage(img.width(), img.height()), mask, {}};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (mask.at(x, y)) layer.image.set_pixel(x, y, img.pixel(x, y));
    }
  }
  return layer;
}

ForegroundLayer restrict_layer(const ForegroundLayer& layer, const BinaryMask& keep) {
  ForegroundLayer out = extract_foreground(layer.image, layer.mask & keep);
  out.regions = layer.regions;
  return out;
}

}  // namespace layertext
