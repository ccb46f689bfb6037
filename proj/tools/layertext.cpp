// layertext command-line front end.
//
// Exit status: 0 success, 2 validation or I/O error, 3 provider error,
// 1 anything unexpected.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "layertext/compose.hpp"
#include "layertext/depth.hpp"
#include "layertext/error.hpp"
#include "layertext/image_io.hpp"
#include "layertext/inpaint.hpp"
#include "layertext/metrics.hpp"
#include "layertext/pipeline.hpp"
#include "layertext/synthetic.hpp"
#include "layertext/transform.hpp"

namespace lt = layertext;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path);
  out << text;
  if (!out) lt::fail(lt::ErrorCode::IoError, "cannot write " + *path);
}

json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    lt::fail(lt::ErrorCode::InvalidArgument, what + " is not valid JSON: " + e.what());
  }
}

lt::ForegroundLayer load_layer(const std::string& image, const std::optional<std::string>& mask) {
  std::optional<lt::BinaryMask> alpha;
  lt::RasterImage img = lt::load_image_with_alpha(image, alpha);
  lt::BinaryMask m;
  if (mask) {
    m = lt::load_mask(*mask);
  } else if (alpha) {
    m = *alpha;
  } else {
    lt::fail(lt::ErrorCode::MissingMask, "layer " + image + " has no alpha channel and no --mask was given");
  }
  lt::require_same_size(img.size(), m.size(), "layer vs mask");
  return lt::extract_foreground(img, m);
}

struct RunArgs {
  std::string script;
};

struct EvaluateArgs {
  std::string edited, reference;
  std::optional<std::string> mask, pred, target, out, histogram_csv;
};

struct InpaintArgs {
  std::string image, mask, out;
  std::string method = "baseline";
  std::optional<std::string> provider;
  int max_iter = 2000;
  double tolerance = 1e-4;
  int dilation_radius = 2;
};

struct TransformArgs {
  std::string layer, out;
  std::optional<std::string> mask, out_mask, ops, ops_file;
  std::optional<double> cx, cy;
  std::optional<int> width, height;
};

struct ComposeArgs {
  std::string background, layer, out;
  std::optional<std::string> mask, bg_depth, fg_depth, preset;
  std::string method = "none";
  std::optional<double> gamma;
  double delta = 0.05;
  double lambda1 = 0.5, lambda2 = 0.3;
  std::string histogram_reference = "annulus";
};

struct SynthArgs {
  std::string out;
  int shift = 40;
};

int cmd_run(const RunArgs& a) {
  const lt::EditScript script = lt::EditScript::load(a.script);
  const lt::StageArtifacts art = lt::run_pipeline(script);
  for (const auto& w : art.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << art.final_image.string() << '\n';
  return 0;
}

int cmd_evaluate(const EvaluateArgs& a) {
  std::optional<fs::path> mask;
  if (a.mask) mask = *a.mask;
  const lt::MetricReport r = lt::evaluate_files(a.edited, a.reference, mask, a.pred, a.target);
  write_text(r.to_json().dump(2) + "\n", a.out);
  if (a.histogram_csv) {
    std::optional<lt::BinaryMask> m;
    if (mask) m = lt::load_mask(*mask);
    const lt::RasterImage edited = lt::load_image(a.edited);
    write_text(lt::histogram_csv(lt::intensity_histogram(edited, m)), a.histogram_csv);
  }
  return 0;
}

int cmd_inpaint(const InpaintArgs& a) {
  lt::InpaintConfig cfg;
  cfg.method = lt::parse_inpaint_method(a.method);
  cfg.baseline_max_iter = a.max_iter;
  cfg.baseline_tolerance = a.tolerance;
  cfg.dilation_radius = a.dilation_radius;
  lt::ProviderCommand provider;
  if (a.provider) provider = lt::ProviderCommand::parse(*a.provider);
  const lt::RasterImage img = lt::load_image(a.image);
  const lt::BinaryMask mask = lt::load_mask(a.mask);
  lt::save_image(lt::inpaint(img, mask, cfg, provider), a.out);
  return 0;
}

int cmd_transform(const TransformArgs& a) {
  const lt::ForegroundLayer layer = load_layer(a.layer, a.mask);
  json ops;
  if (a.ops_file) {
    std::ifstream in(*a.ops_file);
    if (!in) lt::fail(lt::ErrorCode::FileNotFound, "cannot open " + *a.ops_file);
    ops = parse_json_arg(std::string(std::istreambuf_iterator<char>(in), {}), *a.ops_file);
  } else if (a.ops) {
    ops = parse_json_arg(*a.ops, "--ops");
  } else {
    lt::fail(lt::ErrorCode::InvalidArgument, "give --ops or --ops-file");
  }
  const lt::Point2 center{a.cx.value_or((layer.size().width - 1) / 2.0),
                          a.cy.value_or((layer.size().height - 1) / 2.0)};
  const lt::Transform2D t = lt::compose_all(lt::parse_transform_list(ops, center));
  const lt::Size dims{a.width.value_or(layer.size().width), a.height.value_or(layer.size().height)};
  lt::TransformStats stats;
  const lt::ForegroundLayer out = lt::apply_transform(layer, t, dims, &stats);
  lt::save_image(out.image, a.out);
  if (a.out_mask) lt::save_mask(out.mask, *a.out_mask);
  if (stats.clipped > 0) std::cerr << "clipped " << stats.clipped << " source pixels outside the canvas\n";
  return 0;
}

int cmd_compose(const ComposeArgs& a) {
  const lt::RasterImage bg = lt::load_image(a.background);
  lt::ForegroundLayer layer = load_layer(a.layer, a.mask);
  lt::require_same_size(bg.size(), layer.size(), "background vs layer");
  const lt::ComposeMethod method = lt::parse_compose_method(a.method);
  switch (method) {
    case lt::ComposeMethod::DepthAware: {
      if (!a.bg_depth || !a.fg_depth) {
        lt::fail(lt::ErrorCode::InvalidArgument, "depth_aware needs --bg-depth and --fg-depth");
      }
      lt::DepthParams p{a.lambda1, a.lambda2, std::nullopt};
      if (a.preset) {
        const auto preset = lt::parse_depth_preset(*a.preset);
        if (!preset) lt::fail(lt::ErrorCode::InvalidArgument, "unknown preset " + *a.preset);
        p = lt::DepthParams::from_preset(*preset);
      }
      p.validate();
      const lt::DepthMap dbg = lt::load_depth(*a.bg_depth);
      const lt::DepthMap dfg = lt::load_depth(*a.fg_depth);
      layer = lt::depth_aware_adjust(layer, lt::depth_delta(dbg, dfg, layer.mask), p);
      break;
    }
    case lt::ComposeMethod::Linear:
      layer = lt::adjust_linear(layer, a.gamma.value_or(1.1), a.delta);
      break;
    case lt::ComposeMethod::Gamma:
      layer = lt::adjust_gamma(layer, a.gamma.value_or(0.8));
      break;
    case lt::ComposeMethod::Histogram:
      if (a.histogram_reference == "global") {
        layer = lt::histogram_match(layer, bg);
      } else if (a.histogram_reference == "annulus") {
        layer = lt::histogram_match(layer, bg, lt::annulus_region(layer.mask));
      } else {
        lt::fail(lt::ErrorCode::InvalidArgument, "--histogram-reference must be annulus or global");
      }
      break;
    case lt::ComposeMethod::None:
      break;
  }
  lt::save_image(lt::compose_hard(bg, layer), a.out);
  return 0;
}

int cmd_synth(const SynthArgs& a) {
  lt::SyntheticSceneOptions opts;
  opts.shift = a.shift;
  lt::write_synthetic_scene(lt::make_ramp_lit_scene(opts), a.out);
  std::cout << (fs::path(a.out) / "script.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered scene-text editing: separate, edit, and recompose text in images"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an edit script end to end");
  run_cmd->add_option("script", run.script, "Edit script (JSON)")->required();

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Histogram and text metrics of an edited image");
  ev_cmd->add_option("--edited", ev.edited, "Edited image")->required();
  ev_cmd->add_option("--reference", ev.reference, "Reference image")->required();
  ev_cmd->add_option("--mask", ev.mask, "Restrict histograms to this mask");
  ev_cmd->add_option("--pred", ev.pred, "Recognized text");
  ev_cmd->add_option("--target", ev.target, "Intended text");
  ev_cmd->add_option("--out", ev.out, "Write the JSON report here instead of stdout");
  ev_cmd->add_option("--histogram-csv", ev.histogram_csv, "Dump the edited image's histogram as CSV");

  InpaintArgs in;
  auto* in_cmd = app.add_subcommand("inpaint", "Fill masked pixels of an image");
  in_cmd->add_option("--image", in.image)->required();
  in_cmd->add_option("--mask", in.mask)->required();
  in_cmd->add_option("--out", in.out)->required();
  in_cmd->add_option("--method", in.method, "baseline | external | none")->capture_default_str();
  in_cmd->add_option("--provider", in.provider, "Command for the external method");
  in_cmd->add_option("--max-iter", in.max_iter)->capture_default_str();
  in_cmd->add_option("--tolerance", in.tolerance)->capture_default_str();
  in_cmd->add_option("--dilation-radius", in.dilation_radius)->capture_default_str();

  TransformArgs tr;
  auto* tr_cmd = app.add_subcommand("transform", "Apply geometric transforms to a text layer");
  tr_cmd->add_option("--layer", tr.layer, "Layer image (RGBA, or RGB with --mask)")->required();
  tr_cmd->add_option("--mask", tr.mask);
  tr_cmd->add_option("--out", tr.out)->required();
  tr_cmd->add_option("--out-mask", tr.out_mask);
  auto* ops_opt = tr_cmd->add_option("--ops", tr.ops, R"(JSON list, e.g. '[{"rotate": {"theta_deg": 15}}]')");
  tr_cmd->add_option("--ops-file", tr.ops_file)->excludes(ops_opt);
  tr_cmd->add_option("--cx", tr.cx, "Default center x (layer center if omitted)");
  tr_cmd->add_option("--cy", tr.cy, "Default center y");
  tr_cmd->add_option("--width", tr.width, "Output canvas width");
  tr_cmd->add_option("--height", tr.height, "Output canvas height");

  ComposeArgs co;
  auto* co_cmd = app.add_subcommand("compose", "Adjust a text layer and paste it onto a background");
  co_cmd->add_option("--background", co.background)->required();
  co_cmd->add_option("--layer", co.layer)->required();
  co_cmd->add_option("--mask", co.mask);
  co_cmd->add_option("--out", co.out)->required();
  co_cmd->add_option("--method", co.method, "depth_aware | linear | gamma | histogram | none")->capture_default_str();
  co_cmd->add_option("--gamma", co.gamma, "Linear scale (default 1.1) or gamma exponent (default 0.8)");
  co_cmd->add_option("--delta", co.delta)->capture_default_str();
  co_cmd->add_option("--lambda1", co.lambda1)->capture_default_str();
  co_cmd->add_option("--lambda2", co.lambda2)->capture_default_str();
  co_cmd->add_option("--preset", co.preset, "uniform | high_variation | hdr");
  co_cmd->add_option("--bg-depth", co.bg_depth, "Background depth (PFM or 16-bit PNG)");
  co_cmd->add_option("--fg-depth", co.fg_depth, "Foreground depth at the layer's placement");
  co_cmd->add_option("--histogram-reference", co.histogram_reference, "annulus | global")->capture_default_str();

  SynthArgs sy;
  auto* sy_cmd = app.add_subcommand("synth", "Write the synthetic ramp-lit test scene and a sample script");
  sy_cmd->add_option("--out", sy.out)->required();
  sy_cmd->add_option("--shift", sy.shift)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run);
    if (ev_cmd->parsed()) return cmd_evaluate(ev);
    if (in_cmd->parsed()) return cmd_inpaint(in);
    if (tr_cmd->parsed()) return cmd_transform(tr);
    if (co_cmd->parsed()) return cmd_compose(co);
    if (sy_cmd->parsed()) return cmd_synth(sy);
  } catch (const lt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lt::is_provider_error(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
