#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "layertext/core.hpp"

namespace layertext {

/// 256 bins per channel, three channels (R, G, B).
struct ChannelHistogram {
  std::array<std::array<double, 256>, 3> bins{};
  bool normalized = false;

  /// Divides each channel by its sum. Channels summing to zero are left as is.
  ChannelHistogram normalized_copy() const;
};

ChannelHistogram intensity_histogram(const RasterImage& img, const std::optional<BinaryMask>& mask = std::nullopt,
                                     bool normalize = true);

/// Hellinger form of the Bhattacharyya measure, averaged over channels:
/// sqrt(max(0, 1 - sum sqrt(p q))). 0 for identical histograms.
double metric_bc(const ChannelHistogram& h1, const ChannelHistogram& h2);

enum class ChiSquareForm {
  /// sum over p_i > 0 of (p_i - q_i)^2 / p_i, with h1 as p.
  ReferenceFirst,
  /// sum over p_i + q_i > 0 of (p_i - q_i)^2 / (p_i + q_i).
  Symmetric,
};

/// Summed over channels.
double metric_chi_square(const ChannelHistogram& h1, const ChannelHistogram& h2,
                         ChiSquareForm form = ChiSquareForm::ReferenceFirst);

/// Pearson correlation of the 768 concatenated bins. ZeroVariance if either
/// vector is constant.
double metric_correlation(const ChannelHistogram& h1, const ChannelHistogram& h2);

/// sum over channels of sum_i min(p_i, q_i), in [0, 3].
double metric_intersection(const ChannelHistogram& h1, const ChannelHistogram& h2);

/// Decodes UTF-8 to code points; malformed bytes become U+FFFD.
std::u32string utf8_to_codepoints(std::string_view s);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// 1.0 when the strings match exactly after trimming surrounding whitespace.
double sentence_accuracy(std::string_view pred, std::string_view target);

/// 1 - Levenshtein / max length, over code points; 1.0 when both are empty.
double ned(std::string_view pred, std::string_view target);

struct MetricReport {
  double bc = 0.0;
  double cs = 0.0;
  double corr = 0.0;
  double inter = 0.0;
  std::optional<double> sa;
  std::optional<double> ned;

  nlohmann::json to_json() const;
};

/// Histogram metrics of `edited` against `reference`, both normalized; `h1`
/// (the chi-square reference) is the reference image.
MetricReport compare_images(const RasterImage& edited, const RasterImage& reference,
                            const std::optional<BinaryMask>& mask = std::nullopt);

/// CSV dump: header "bin,R,G,B" then 256 rows.
std::string histogram_csv(const ChannelHistogram& h);

}  // namespace layertext
