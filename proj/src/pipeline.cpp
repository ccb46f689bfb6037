#include "layertext/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "layertext/error.hpp"
#include "layertext/image_io.hpp"

namespace layertext {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs `f`, re-throwing any library error tagged with `stage`.
template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(stage);
  }
}

[[noreturn]] void script_error(const std::string& msg) { fail(ErrorCode::InvalidScript, msg); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) script_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) script_error("unknown key '" + key + "' in " + where);
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

ProviderCommand resolve_command(const json& j, const fs::path& base) {
  ProviderCommand cmd = ProviderCommand::from_json(j);
  // Relative program paths (not bare names looked up on PATH) follow the script.
  if (!cmd.empty() && cmd.argv[0].find('/') != std::string::npos && fs::path(cmd.argv[0]).is_relative()) {
    cmd.argv[0] = (base / cmd.argv[0]).string();
  }
  return cmd;
}

DepthParams parse_depth_params(const json& j) {
  check_keys(j, {"lambda1", "lambda2", "preset"}, "depth");
  DepthParams p;
  if (j.contains("preset")) {
    const auto name = j["preset"].get<std::string>();
    const auto preset = parse_depth_preset(name);
    if (!preset) script_error("unknown depth preset '" + name + "'");
    p = DepthParams::from_preset(*preset);
    if (j.contains("lambda1") || j.contains("lambda2")) script_error("depth: give either a preset or lambdas");
  }
  if (j.contains("lambda1")) p.lambda1 = j["lambda1"].get<double>();
  if (j.contains("lambda2")) p.lambda2 = j["lambda2"].get<double>();
  p.validate();
  return p;
}

ComposeSpec parse_compose_spec(const json& j) {
  ComposeSpec s;
  if (j.is_string()) {
    s.method = parse_compose_method(j.get<std::string>());
    return s;
  }
  check_keys(j, {"method", "gamma", "delta", "histogram_reference", "annulus_radius"}, "compose");
  if (j.contains("method")) s.method = parse_compose_method(j["method"].get<std::string>());
  if (j.contains("gamma")) s.gamma = j["gamma"].get<double>();
  if (j.contains("delta")) s.delta = j["delta"].get<double>();
  if (j.contains("histogram_reference")) {
    const auto ref = j["histogram_reference"].get<std::string>();
    if (ref == "annulus") {
      s.histogram_reference = HistogramReference::Annulus;
    } else if (ref == "global") {
      s.histogram_reference = HistogramReference::Global;
    } else {
      script_error("histogram_reference must be 'annulus' or 'global'");
    }
  }
  if (j.contains("annulus_radius")) s.annulus_radius = j["annulus_radius"].get<int>();
  if (s.annulus_radius < 1) script_error("annulus_radius must be >= 1");
  if (!(s.effective_gamma() > 0.0)) fail(ErrorCode::NonPositiveGamma, "compose gamma must be positive");
  return s;
}

TamperSource parse_tamper(const json& j, const fs::path& base) {
  TamperSource t;
  if (j.is_string()) {
    const auto v = j.get<std::string>();
    if (v == "skip") return t;
    if (v == "provider") {
      t.kind = TamperSource::Kind::Provider;
      return t;
    }
    t.kind = TamperSource::Kind::Layer;
    t.layer = resolve(base, v);
    return t;
  }
  check_keys(j, {"layer", "mask"}, "tamper");
  if (!j.contains("layer")) script_error("tamper object needs a 'layer' path");
  t.kind = TamperSource::Kind::Layer;
  t.layer = resolve(base, j["layer"].get<std::string>());
  if (j.contains("mask")) t.mask = resolve(base, j["mask"].get<std::string>());
  return t;
}

RegionEdit parse_region(const json& j, const fs::path& base) {
  check_keys(j, {"tamper", "transforms", "depth", "compose"}, "region");
  RegionEdit r;
  if (j.contains("tamper")) r.tamper = parse_tamper(j["tamper"], base);
  if (j.contains("transforms")) {
    if (!j["transforms"].is_array()) script_error("transforms must be an array");
    for (const auto& op : j["transforms"]) r.transforms.push_back(op);
  }
  if (j.contains("depth")) r.depth = parse_depth_params(j["depth"]);
  if (j.contains("compose")) r.compose = parse_compose_spec(j["compose"]);
  return r;
}

BinaryMask box_mask(const BBox& box, Size dims) {
  BinaryMask m(dims.width, dims.height);
  const BBox c = box.clipped(dims);
  for (int y = c.y; y < c.y + c.h; ++y) {
    for (int x = c.x; x < c.x + c.w; ++x) m.set(x, y, true);
  }
  return m;
}

RasterImage crop(const RasterImage& img, const BBox& box) {
  const BBox c = box.clipped(img.size());
  RasterImage out(std::max(c.w, 1), std::max(c.h, 1));
  for (int y = 0; y < c.h; ++y) {
    for (int x = 0; x < c.w; ++x) out.set_pixel(x, y, img.pixel(c.x + x, c.y + y));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Script

double ComposeSpec::effective_gamma() const {
  if (gamma) return *gamma;
  return method == ComposeMethod::Gamma ? 0.8 : 1.1;
}

EditScript EditScript::from_json(const json& j, const fs::path& base_dir) {
  try {
    check_keys(j,
               {"input_image", "detections", "depth_map", "seed", "kmeans", "inpaint", "depth", "depth_source",
                "compose", "regions", "providers", "output_dir", "dump_stages"},
               "script");
    EditScript s;
    if (!j.contains("input_image")) script_error("script needs 'input_image'");
    s.input_image = resolve(base_dir, j["input_image"].get<std::string>());

    if (!j.contains("detections")) script_error("script needs 'detections'");
    if (j["detections"].is_string()) {
      s.detections_path = resolve(base_dir, j["detections"].get<std::string>());
    } else {
      s.detections_inline = j["detections"];
    }
    if (j.contains("depth_map")) s.depth_map = resolve(base_dir, j["depth_map"].get<std::string>());
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();

    if (j.contains("kmeans")) {
      const auto& k = j["kmeans"];
      check_keys(k, {"enabled", "max_iter"}, "kmeans");
      if (k.contains("enabled")) s.kmeans_enabled = k["enabled"].get<bool>();
      if (k.contains("max_iter")) s.kmeans_max_iter = k["max_iter"].get<int>();
      if (s.kmeans_max_iter < 1) script_error("kmeans max_iter must be >= 1");
    }

    if (j.contains("providers")) {
      const auto& p = j["providers"];
      check_keys(p, {"segment", "inpaint", "depth", "tamper"}, "providers");
      if (p.contains("segment")) s.providers.segment = resolve_command(p["segment"], base_dir);
      if (p.contains("inpaint")) s.providers.inpaint = resolve_command(p["inpaint"], base_dir);
      if (p.contains("depth")) s.providers.depth = resolve_command(p["depth"], base_dir);
      if (p.contains("tamper")) s.providers.tamper = resolve_command(p["tamper"], base_dir);
    }

    // An inpaint provider without an explicit method selects it.
    if (!s.providers.inpaint.empty()) s.inpaint.method = InpaintMethod::External;
    if (j.contains("inpaint")) {
      const auto& in = j["inpaint"];
      check_keys(in, {"method", "max_iter", "tolerance", "dilation_radius"}, "inpaint");
      if (in.contains("method")) s.inpaint.method = parse_inpaint_method(in["method"].get<std::string>());
      if (in.contains("max_iter")) s.inpaint.baseline_max_iter = in["max_iter"].get<int>();
      if (in.contains("tolerance")) s.inpaint.baseline_tolerance = in["tolerance"].get<double>();
      if (in.contains("dilation_radius")) s.inpaint.dilation_radius = in["dilation_radius"].get<int>();
    }
    s.inpaint.validate();
    if (s.inpaint.method == InpaintMethod::External && s.providers.inpaint.empty()) {
      script_error("inpaint method 'external' needs providers.inpaint");
    }

    if (j.contains("depth")) s.depth = parse_depth_params(j["depth"]);
    if (j.contains("depth_source")) {
      const auto src = j["depth_source"].get<std::string>();
      if (src == "transport") {
        s.depth_source = ForegroundDepthSource::Transport;
      } else if (src == "provider") {
        s.depth_source = ForegroundDepthSource::Provider;
      } else {
        script_error("depth_source must be 'transport' or 'provider'");
      }
    }
    if (s.depth_source == ForegroundDepthSource::Provider && s.providers.depth.empty()) {
      script_error("depth_source 'provider' needs providers.depth");
    }
    if (j.contains("compose")) s.compose = parse_compose_spec(j["compose"]);

    if (j.contains("regions")) {
      if (!j["regions"].is_array()) script_error("regions must be an array");
      for (const auto& r : j["regions"]) s.regions.push_back(parse_region(r, base_dir));
    }
    for (const auto& r : s.regions) {
      if (r.tamper.kind == TamperSource::Kind::Provider && s.providers.tamper.empty()) {
        script_error("tamper 'provider' needs providers.tamper");
      }
    }

    if (j.contains("output_dir")) s.output_dir = j["output_dir"].get<std::string>();
    s.output_dir = resolve(base_dir, s.output_dir);
    if (j.contains("dump_stages")) s.dump_stages = j["dump_stages"].get<bool>();
    return s;
  } catch (const json::exception& e) {
    script_error(std::string("malformed script: ") + e.what());
  }
}

EditScript EditScript::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open script " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    script_error("script " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

RegionEdit EditScript::region(std::size_t i) const { return i < regions.size() ? regions[i] : RegionEdit{}; }

std::optional<fs::path> StageArtifacts::find(const std::string& stage) const {
  for (const auto& f : files) {
    if (f.stage == stage) return f.path;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Artifacts

ArtifactWriter::ArtifactWriter(fs::path dir, bool enabled) : dir_(std::move(dir)), enabled_(enabled) {}

void ArtifactWriter::image(const std::string& stage, const std::string& filename, const RasterImage& img) {
  if (!enabled_) return;
  const fs::path p = dir_ / filename;
  save_image(img, p);
  files_.push_back({stage, p});
}

void ArtifactWriter::depth(const std::string& stage, const std::string& filename, const DepthMap& d) {
  if (!enabled_) return;
  const fs::path p = dir_ / filename;
  save_depth_pfm(d, p);
  files_.push_back({stage, p});
}

// ---------------------------------------------------------------------------
// Stages 1 and 2

LayerStack separate_layers(const EditScript& script, const RasterImage& image, const DetectionSet& dets,
                           ArtifactWriter* writer) {
  LayerStack out;
  out.original = image;
  out.detections = dets;

  staged("foreground", [&] {
    require_same_size(image.size(), dets.image_dims, "detections vs image");
    out.box_mask = generate_mask(dets);
    BinaryMask candidate = out.box_mask;
    if (!script.providers.segment.empty()) {
      TempDir tmp;
      save_image(image, tmp.file("image.png"));
      save_mask(out.box_mask, tmp.file("mask.png"));
      invoke_provider(script.providers.segment, {"--image", tmp.file("image.png").string(), "--mask",
                                                 tmp.file("mask.png").string(), "--out", tmp.file("out.png").string()});
      BinaryMask seg;
      try {
        seg = load_mask(tmp.file("out.png"));
      } catch (const Error& e) {
        fail(ErrorCode::ProviderBadOutput, "segment provider output unreadable: " + std::string(e.what()));
      }
      if (!(seg.size() == image.size())) {
        fail(ErrorCode::ProviderBadOutput,
             "segment provider returned " + to_string(seg.size()) + ", expected " + to_string(image.size()));
      }
      candidate = seg & out.box_mask;
    }
    if (script.kmeans_enabled) {
      std::vector<BBox> boxes;
      for (const auto& r : dets.regions) boxes.push_back(r.bbox);
      candidate = kmeans_refine(image, candidate, boxes, {2, script.seed, script.kmeans_max_iter});
    }
    out.glyph_mask = candidate;
    out.foreground = extract_foreground(image, out.glyph_mask);
    out.foreground.regions = dets.regions;
    return 0;
  });
  if (writer) writer->image("foreground", "03_foreground.png", out.foreground.image);

  staged("background", [&] {
    if (script.inpaint.method == InpaintMethod::Baseline) {
      out.background = inpaint_baseline(image, out.box_mask, script.inpaint, &out.inpaint_stats);
    } else {
      out.background = inpaint(image, out.box_mask, script.inpaint, script.providers.inpaint);
    }
    return 0;
  });
  if (writer) writer->image("background", "02_background.png", out.background);
  return out;
}

DepthMap background_depth(const EditScript& script, const RasterImage& background, std::vector<std::string>* warnings) {
  if (!script.providers.depth.empty()) return estimate_depth_external(background, script.providers.depth);
  if (script.depth_map) {
    DepthMap d = load_depth(*script.depth_map);
    require_same_size(d.size(), background.size(), "depth_map vs image");
    return d;
  }
  if (warnings) warnings->push_back("no depth source configured; using a flat depth field (no depth adjustment)");
  return DepthMap::constant(background.width(), background.height(), 0.5f);
}

// ---------------------------------------------------------------------------
// Stage 3

ForegroundLayer tamper_region(const TextRegion& region, const TamperSource& source, Size canvas,
                              const ProviderCommand& provider, const RasterImage* original) {
  RasterImage layer_img;
  std::optional<BinaryMask> alpha;
  std::optional<BinaryMask> sidecar;
  auto load_layer = [&](const fs::path& image_path, const std::optional<fs::path>& mask_path, bool from_provider) {
    try {
      layer_img = load_image_with_alpha(image_path, alpha);
      if (mask_path && fs::exists(*mask_path)) sidecar = load_mask(*mask_path);
    } catch (const Error& e) {
      if (!from_provider) throw;
      fail(ErrorCode::ProviderBadOutput, "tamper provider output unreadable: " + std::string(e.what()));
    }
    if (mask_path && !from_provider && !sidecar) fail(ErrorCode::FileNotFound, "missing mask " + mask_path->string());
  };

  switch (source.kind) {
    case TamperSource::Kind::Skip:
      fail(ErrorCode::InvalidArgument, "tamper_region called with a skip source");
    case TamperSource::Kind::Layer:
      load_layer(source.layer, source.mask, false);
      break;
    case TamperSource::Kind::Provider: {
      if (provider.empty()) fail(ErrorCode::ProviderLaunchFailure, "no tamper provider configured");
      TempDir tmp;
      const RasterImage patch = original ? crop(*original, region.bbox) : RasterImage(region.bbox.w, region.bbox.h);
      save_image(patch, tmp.file("crop.png"));
      std::vector<std::string> args{"--image",    tmp.file("crop.png").string(), "--text",
                                    region.text,  "--out",                       tmp.file("layer.png").string(),
                                    "--out-mask", tmp.file("layer_mask.png").string()};
      if (region.tampered_text) args.insert(args.end(), {"--tampered-text", *region.tampered_text});
      if (region.prompt) args.insert(args.end(), {"--prompt", *region.prompt});
      invoke_provider(provider, args);
      load_layer(tmp.file("layer.png"), tmp.file("layer_mask.png"), true);
      break;
    }
  }

  if (layer_img.width() > canvas.width || layer_img.height() > canvas.height) {
    fail(ErrorCode::OversizedLayer,
         "replacement layer " + to_string(layer_img.size()) + " exceeds canvas " + to_string(canvas));
  }
  const BinaryMask* mask = sidecar ? &*sidecar : alpha ? &*alpha : nullptr;
  if (!mask) fail(ErrorCode::MissingMask, "replacement layer has neither an alpha channel nor a mask file");
  require_same_size(layer_img.size(), mask->size(), "replacement layer vs mask");

  ForegroundLayer out{RasterImage(canvas.width, canvas.height), BinaryMask(canvas.width, canvas.height), {region}};
  for (int y = 0; y < layer_img.height(); ++y) {
    for (int x = 0; x < layer_img.width(); ++x) {
      const int cx = region.bbox.x + x, cy = region.bbox.y + y;
      if (!mask->at(x, y) || cx < 0 || cy < 0 || cx >= canvas.width || cy >= canvas.height) continue;
      out.image.set_pixel(cx, cy, layer_img.pixel(x, y));
      out.mask.set(cx, cy, true);
    }
  }
  return out;
}

ForegroundLayer solid_rectangle_layer(Size canvas, const BBox& rect, Rgb color) {
  ForegroundLayer out{RasterImage(canvas.width, canvas.height), BinaryMask(canvas.width, canvas.height), {}};
  const BBox c = rect.clipped(canvas);
  for (int y = c.y; y < c.y + c.h; ++y) {
    for (int x = c.x; x < c.x + c.w; ++x) {
      out.image.set_pixel(x, y, color);
      out.mask.set(x, y, true);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stages 3 and 4

EditResult recompose(const EditScript& script, const LayerStack& layers, const DepthMap& bg_depth,
                     ArtifactWriter* writer) {
  const Size canvas = layers.background.size();
  require_same_size(bg_depth.size(), canvas, "background depth vs canvas");
  const std::size_t n = layers.detections.regions.size();

  EditResult res;
  res.image = layers.background;
  res.placed_mask = BinaryMask(canvas.width, canvas.height);
  res.depth_word = DepthMap::constant(canvas.width, canvas.height, 0.0f);
  res.depth_image = bg_depth;

  // Stage 3: per-region layers, tampered and transformed.
  struct Placed {
    ForegroundLayer layer;
    Transform2D t;
    ForegroundLayer source;
  };
  std::vector<Placed> placed(n);
  bool any_tamper = false;
  RasterImage tamper_preview(canvas.width, canvas.height);
  for (std::size_t i = 0; i < n; ++i) {
    const TextRegion& region = layers.detections.regions[i];
    const RegionEdit edit = script.region(i);
    ForegroundLayer layer;
    if (edit.tamper.kind == TamperSource::Kind::Skip) {
      layer = restrict_layer(layers.foreground, box_mask(region.bbox, canvas));
      layer.regions = {region};
    } else {
      any_tamper = true;
      layer = staged("tamper", [&] {
        return tamper_region(region, edit.tamper, canvas, script.providers.tamper, &layers.original);
      });
      tamper_preview = compose_hard(tamper_preview, layer);
    }
    res.regions.push_back(layer.regions.empty() ? region : layer.regions.front());

    staged("transform", [&] {
      const Point2 center{region.bbox.center_x(), region.bbox.center_y()};
      const std::vector<TransformOp> ops = parse_transform_list(json(edit.transforms), center);
      placed[i].source = layer;
      placed[i].t = compose_all(ops);
      if (ops.empty()) {
        placed[i].layer = layer;
        res.clipped_per_region.push_back(0);
        return 0;
      }
      Transform2D running;
      for (std::size_t k = 0; k < ops.size(); ++k) {
        running = compose(ops[k].matrix, running);
        if (writer && writer->enabled()) {
          const ForegroundLayer step = apply_transform(layer, running, canvas);
          std::ostringstream name;
          name.width(2);
          name.fill('0');
          name << writer->next_transform_index();
          writer->image("transform", name.str() + "_" + to_string(ops[k].kind) + "_r" + std::to_string(i) + ".png",
                        step.image);
        }
      }
      TransformStats stats;
      placed[i].layer = apply_transform(layer, placed[i].t, canvas, &stats);
      res.clipped_per_region.push_back(stats.clipped);
      return 0;
    });
  }
  if (writer && any_tamper) writer->image("tamper", "04_tamper.png", tamper_preview);

  // Stage 4: adjustment and composition, in document order.
  bool any_depth = false;
  for (std::size_t i = 0; i < n; ++i) {
    const RegionEdit edit = script.region(i);
    const ComposeSpec spec = edit.compose.value_or(script.compose);
    ForegroundLayer layer = placed[i].layer;
    if (!layer.mask.any()) continue;

    if (spec.method == ComposeMethod::DepthAware) {
      any_depth = true;
      layer = staged("depth", [&] {
        DepthMap fg_depth;
        if (script.depth_source == ForegroundDepthSource::Provider) {
          fg_depth = estimate_depth_external(layer.image, script.providers.depth);
        } else {
          fg_depth = foreground_depth(bg_depth, placed[i].source.mask, placed[i].t, canvas);
        }
        for (int y = 0; y < canvas.height; ++y) {
          for (int x = 0; x < canvas.width; ++x) {
            if (layer.mask.at(x, y)) res.depth_word.at(x, y) = fg_depth.at(x, y);
          }
        }
        const DepthDelta delta = depth_delta(bg_depth, fg_depth, layer.mask);
        return depth_aware_adjust(layer, delta, edit.depth.value_or(script.depth));
      });
    }

    layer = staged("compose", [&] {
      switch (spec.method) {
        case ComposeMethod::Linear: return adjust_linear(layer, spec.effective_gamma(), spec.delta);
        case ComposeMethod::Gamma: return adjust_gamma(layer, spec.effective_gamma());
        case ComposeMethod::Histogram:
          if (spec.histogram_reference == HistogramReference::Global) {
            return histogram_match(layer, layers.background);
          }
          return histogram_match(layer, layers.background, annulus_region(layer.mask, spec.annulus_radius));
        case ComposeMethod::DepthAware:
        case ComposeMethod::None: break;
      }
      return layer;
    });
    res.image = staged("compose", [&] { return compose_hard(res.image, layer); });
    res.placed_mask = res.placed_mask | layer.mask;
  }
  if (writer && any_depth) {
    writer->depth("depth_word", "05_depth_word.pfm", res.depth_word);
    writer->depth("depth_image", "06_depth_image.pfm", res.depth_image);
  }
  return res;
}

// ---------------------------------------------------------------------------

StageArtifacts run_pipeline(const EditScript& script) {
  StageArtifacts art;
  art.output_dir = script.output_dir;
  std::error_code ec;
  fs::create_directories(script.output_dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + script.output_dir.string());
  ArtifactWriter writer(script.output_dir, script.dump_stages);

  const RasterImage image = staged("input", [&] { return load_image(script.input_image); });
  writer.image("original", "01_original.png", image);
  const DetectionSet dets = staged("input", [&] {
    return script.detections_path ? load_detections(*script.detections_path, image.size())
                                  : parse_detections(*script.detections_inline, image.size());
  });

  // Artifacts written so far stay on disk if a later stage throws.
  const LayerStack layers = separate_layers(script, image, dets, &writer);
  std::vector<std::string> warnings;
  const DepthMap bg_depth = staged("depth", [&] { return background_depth(script, layers.background, &warnings); });
  EditResult edit = recompose(script, layers, bg_depth, &writer);
  warnings.insert(warnings.end(), edit.warnings.begin(), edit.warnings.end());

  art.final_image = script.output_dir / "final.png";
  save_image(edit.image, art.final_image);
  art.files = writer.files();
  art.clipped_per_region = edit.clipped_per_region;
  art.warnings = warnings;

  json manifest;
  manifest["final"] = "final.png";
  json files = json::array();
  for (const auto& f : art.files) files.push_back({{"stage", f.stage}, {"file", f.path.filename().string()}});
  manifest["artifacts"] = files;
  json regions = json::array();
  for (std::size_t i = 0; i < edit.regions.size(); ++i) {
    const auto& r = edit.regions[i];
    json o{{"bbox", {r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h}}, {"text", r.text}, {"clipped", edit.clipped_per_region[i]}};
    if (r.tampered_text) o["tampered_text"] = *r.tampered_text;
    regions.push_back(o);
  }
  manifest["regions"] = regions;
  manifest["inpaint"] = {{"method", script.inpaint.method == InpaintMethod::Baseline   ? "baseline"
                                    : script.inpaint.method == InpaintMethod::External ? "external"
                                                                                       : "none"},
                         {"iterations", layers.inpaint_stats.iterations},
                         {"converged", layers.inpaint_stats.converged}};
  manifest["warnings"] = warnings;
  art.manifest = script.output_dir / "manifest.json";
  std::ofstream out(art.manifest);
  out << manifest.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "cannot write " + art.manifest.string());
  return art;
}

// ---------------------------------------------------------------------------

MetricReport evaluate(const RasterImage& edited, const RasterImage& reference, const std::optional<BinaryMask>& mask,
                      const std::optional<std::string>& pred, const std::optional<std::string>& target) {
  MetricReport r = compare_images(edited, reference, mask);
  if (pred && target) {
    r.sa = sentence_accuracy(*pred, *target);
    r.ned = ned(*pred, *target);
  } else if (pred || target) {
    fail(ErrorCode::InvalidArgument, "text metrics need both a prediction and a target");
  }
  return r;
}

MetricReport evaluate_files(const fs::path& edited, const fs::path& reference, const std::optional<fs::path>& mask,
                            const std::optional<std::string>& pred, const std::optional<std::string>& target) {
  const RasterImage a = load_image(edited);
  const RasterImage b = load_image(reference);
  std::optional<BinaryMask> m;
  if (mask) m = load_mask(*mask);
  return evaluate(a, b, m, pred, target);
}

}  // namespace layertext
