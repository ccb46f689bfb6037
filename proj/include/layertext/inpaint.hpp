#pragma once

#include <vector>

#include "layertext/core.hpp"
#include "layertext/provider.hpp"

namespace layertext {

enum class InpaintMethod { Baseline, External, None };

InpaintMethod parse_inpaint_method(const std::string& name);

struct InpaintConfig {
  InpaintMethod method = InpaintMethod::Baseline;
  int baseline_max_iter = 2000;
  /// Stop once no sample changes by more than this (normalized units).
  double baseline_tolerance = 1e-4;
  /// Applied to the mask before filling.
  int dilation_radius = 2;

  void validate() const;
};

struct InpaintStats {
  int iterations = 0;
  bool converged = false;
  /// Max per-sample change of each sweep, in normalized units.
  std::vector<double> residuals;
};

/// Harmonic fill: Jacobi iteration of the discrete Laplace equation over the
/// (dilated) mask, with the unmasked pixels as fixed boundary values. Holes
/// start from row/column linear interpolation of the nearest known pixels;
/// neighbors outside the image are ignored. Pixels outside the dilated mask are returned untouched.
RasterImage inpaint_baseline(const RasterImage& img, const BinaryMask& mask, const InpaintConfig& cfg,
                             InpaintStats* stats = nullptr);

/// Provider protocol: `<cmd> --image in.png --mask mask.png --out out.png`, where
/// the mask PNG holds 255 for holes. The provider must write an 8-bit RGB PNG of
/// the input's dimensions and exit 0.
RasterImage inpaint_external(const RasterImage& img, const BinaryMask& mask, const ProviderCommand& provider);

/// Dispatches on cfg.method; None returns the input unchanged.
RasterImage inpaint(const RasterImage& img, const BinaryMask& mask, const InpaintConfig& cfg,
                    const ProviderCommand& provider = {});

}  // namespace layertext
