#include "layertext/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "layertext/error.hpp"

namespace layertext {

ChannelHistogram ChannelHistogram::normalized_copy() const {
  ChannelHistogram out = *this;
  for (auto& ch : out.bins) {
    const double s = std::accumulate(ch.begin(), ch.end(), 0.0);
    if (s > 0.0) {
      for (double& b : ch) b /= s;
    }
  }
  out.normalized = true;
  return out;
}

ChannelHistogram intensity_histogram(const RasterImage& img, const std::optional<BinaryMask>& mask, bool normalize) {
  if (mask) {
    require_same_size(img.size(), mask->size(), "intensity_histogram");
    if (!mask->any()) fail(ErrorCode::EmptyMask, "histogram mask has no true pixels");
  }
  ChannelHistogram h;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (mask && !mask->at(x, y)) continue;
      for (int c = 0; c < 3; ++c) h.bins[c][img.at(x, y, c)] += 1.0;
    }
  }
  return normalize ? h.normalized_copy() : h;
}

namespace {

void require_normalized(const ChannelHistogram& h, const char* what) {
  for (const auto& ch : h.bins) {
    double s = 0.0;
    for (double b : ch) {
      if (!(b >= 0.0)) fail(ErrorCode::NotNormalized, std::string(what) + ": negative bin");
      s += b;
    }
    if (std::abs(s - 1.0) > 1e-9) fail(ErrorCode::NotNormalized, std::string(what) + ": channel sum is not 1");
  }
}

}  // namespace

double metric_bc(const ChannelHistogram& h1, const ChannelHistogram& h2) {
  require_normalized(h1, "metric_bc");
  require_normalized(h2, "metric_bc");
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    // 1 - sum sqrt(pq) written as half the squared Hellinger sum, which is
    // exactly 0 for identical inputs.
    double d2 = 0.0;
    for (int i = 0; i < 256; ++i) {
      const double diff = std::sqrt(h1.bins[c][i]) - std::sqrt(h2.bins[c][i]);
      d2 += diff * diff;
    }
    total += std::sqrt(0.5 * d2);
  }
  return total / 3.0;
}

double metric_chi_square(const ChannelHistogram& h1, const ChannelHistogram& h2, ChiSquareForm form) {
  require_normalized(h1, "metric_chi_square");
  require_normalized(h2, "metric_chi_square");
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 256; ++i) {
      const double p = h1.bins[c][i], q = h2.bins[c][i];
      const double denom = form == ChiSquareForm::ReferenceFirst ? p : p + q;
      if (denom > 0.0) total += (p - q) * (p - q) / denom;
    }
  }
  return total;
}

double metric_correlation(const ChannelHistogram& h1, const ChannelHistogram& h2) {
  require_normalized(h1, "metric_correlation");
  require_normalized(h2, "metric_correlation");
  constexpr double n = 768.0;
  double m1 = 0.0, m2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 256; ++i) {
      m1 += h1.bins[c][i];
      m2 += h2.bins[c][i];
    }
  }
  m1 /= n;
  m2 /= n;
  double cov = 0.0, v1 = 0.0, v2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 256; ++i) {
      const double a = h1.bins[c][i] - m1, b = h2.bins[c][i] - m2;
      cov += a * b;
      v1 += a * a;
      v2 += b * b;
    }
  }
  if (v1 <= 0.0 || v2 <= 0.0) fail(ErrorCode::ZeroVariance, "histogram with zero variance");
  return std::clamp(cov / std::sqrt(v1 * v2), -1.0, 1.0);
}

double metric_intersection(const ChannelHistogram& h1, const ChannelHistogram& h2) {
  require_normalized(h1, "metric_intersection");
  require_normalized(h2, "metric_intersection");
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 256; ++i) total += std::min(h1.bins[c][i], h2.bins[c][i]);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Strings

std::u32string utf8_to_codepoints(std::string_view s) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1, cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (ok && (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

bool is_space(char32_t c) {
  return c == U' ' || (c >= U'\t' && c <= U'\r') || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000 || c == 0xFEFF;
}

std::u32string trimmed(std::u32string s) {
  const auto first = std::find_if_not(s.begin(), s.end(), is_space);
  const auto last = std::find_if_not(s.rbegin(), s.rend(), is_space).base();
  return first < last ? std::u32string(first, last) : std::u32string{};
}

}  // namespace

double sentence_accuracy(std::string_view pred, std::string_view target) {
  return trimmed(utf8_to_codepoints(pred)) == trimmed(utf8_to_codepoints(target)) ? 1.0 : 0.0;
}

double ned(std::string_view pred, std::string_view target) {
  const std::u32string a = utf8_to_codepoints(pred);
  const std::u32string b = utf8_to_codepoints(target);
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

// ---------------------------------------------------------------------------

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j{{"bc", bc}, {"cs", cs}, {"corr", corr}, {"inter", inter}};
  if (sa) j["sa"] = *sa;
  if (ned) j["ned"] = *ned;
  return j;
}

MetricReport compare_images(const RasterImage& edited, const RasterImage& reference,
                            const std::optional<BinaryMask>& mask) {
  require_same_size(edited.size(), reference.size(), "compare_images");
  const ChannelHistogram ref = intensity_histogram(reference, mask);
  const ChannelHistogram ed = intensity_histogram(edited, mask);
  MetricReport r;
  r.bc = metric_bc(ref, ed);
  r.cs = metric_chi_square(ref, ed);
  r.corr = metric_correlation(ref, ed);
  r.inter = metric_intersection(ref, ed);
  return r;
}

std::string histogram_csv(const ChannelHistogram& h) {
  std::ostringstream os;
  os.precision(17);
  os << "bin,R,G,B\n";
  for (int i = 0; i < 256; ++i) os << i << ',' << h.bins[0][i] << ',' << h.bins[1][i] << ',' << h.bins[2][i] << '\n';
  return os.str();
}

}  // namespace layertext
