#include "layertext/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "layertext/error.hpp"

namespace layertext {

std::string to_string(Size s) { return std::to_string(s.width) + "x" + std::to_string(s.height); }

std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

void require_same_size(Size a, Size b, const char* what) {
  if (!(a == b)) {
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": " + to_string(a) + " vs " + to_string(b));
  }
}

// ---------------------------------------------------------------------------
// RasterImage

RasterImage::RasterImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) fail(ErrorCode::InvalidArgument, "negative image dimensions");
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) fail(ErrorCode::InvalidArgument, "negative image dimensions");
  if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
    fail(ErrorCode::InvalidArgument, "sample count does not match " + to_string(size()) + "x3");
  }
}

Rgb RasterImage::pixel(int x, int y) const {
  const std::size_t i = index(x, y) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void RasterImage::set_pixel(int x, int y, Rgb p) {
  const std::size_t i = index(x, y) * 3;
  data_[i] = p.r;
  data_[i + 1] = p.g;
  data_[i + 2] = p.b;
}

FloatImage RasterImage::to_float() const {
  FloatImage f{width_, height_, std::vector<float>(data_.size())};
  std::transform(data_.begin(), data_.end(), f.data.begin(), normalize);
  return f;
}

RasterImage RasterImage::from_float(const FloatImage& f) {
  std::vector<std::uint8_t> out(f.data.size());
  std::transform(f.data.begin(), f.data.end(), out.begin(), [](float v) { return quantize(v); });
  return RasterImage(f.width, f.height, std::move(out));
}

// ---------------------------------------------------------------------------
// BinaryMask

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {
  if (width < 0 || height < 0) fail(ErrorCode::InvalidArgument, "negative mask dimensions");
}

std::size_t BinaryMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::complement() const {
  BinaryMask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

BinaryMask BinaryMask::operator|(const BinaryMask& o) const {
  require_same_size(size(), o.size(), "mask union");
  BinaryMask out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = (bits_[i] | o.bits_[i]);
  return out;
}

BinaryMask BinaryMask::operator&(const BinaryMask& o) const {
  require_same_size(size(), o.size(), "mask intersection");
  BinaryMask out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = (bits_[i] & o.bits_[i]);
  return out;
}

bool BinaryMask::subset_of(const BinaryMask& o) const {
  if (!(size() == o.size())) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !o.bits_[i]) return false;
  }
  return true;
}

namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
  std::vector<std::pair<int, int>> offs;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) offs.emplace_back(dx, dy);
    }
  }
  return offs;
}

}  // namespace

BinaryMask BinaryMask::dilated(int radius) const {
  if (radius <= 0) return *this;
  const auto offs = disk_offsets(radius);
  BinaryMask out(width_, height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!at(x, y)) continue;
      for (auto [dx, dy] : offs) {
        if (contains(x + dx, y + dy)) out.set(x + dx, y + dy, true);
      }
    }
  }
  return out;
}

BinaryMask BinaryMask::eroded(int radius) const {
  if (radius <= 0) return *this;
  // Pixels outside the image count as background.
  return complement().dilated(radius).complement() & [&] {
    BinaryMask inner(width_, height_);
    for (int y = radius; y < height_ - radius; ++y) {
      for (int x = radius; x < width_ - radius; ++x) inner.set(x, y, true);
    }
    return inner;
  }();
}

// ---------------------------------------------------------------------------
// DepthMap

DepthMap DepthMap::from_raw(int width, int height, const std::vector<double>& raw) {
  if (raw.size() != static_cast<std::size_t>(width) * height || raw.empty()) {
    fail(ErrorCode::CorruptData, "depth sample count does not match dimensions");
  }
  for (double v : raw) {
    if (!std::isfinite(v)) fail(ErrorCode::CorruptData, "non-finite depth sample");
  }
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  DepthMap d;
  d.width = width;
  d.height = height;
  d.raw_min = *lo;
  d.raw_max = *hi;
  d.values.resize(raw.size());
  if (!(d.raw_max > d.raw_min)) {
    d.degenerate_range = true;
    std::fill(d.values.begin(), d.values.end(), 0.5f);
    return d;
  }
  const double span = d.raw_max - d.raw_min;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    d.values[i] = static_cast<float>(std::clamp((raw[i] - d.raw_min) / span, 0.0, 1.0));
  }
  return d;
}

DepthMap DepthMap::constant(int width, int height, float value) {
  DepthMap d;
  d.width = width;
  d.height = height;
  d.values.assign(static_cast<std::size_t>(width) * height, value);
  d.raw_min = d.raw_max = value;
  return d;
}

// ---------------------------------------------------------------------------
// BBox

bool BBox::intersects(Size image) const {
  const BBox c = clipped(image);
  return c.w > 0 && c.h > 0;
}

BBox BBox::clipped(Size image) const {
  const int x0 = std::max(x, 0);
  const int y0 = std::max(y, 0);
  const int x1 = std::min(x + w, image.width);
  const int y1 = std::min(y + h, image.height);
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

}  // namespace layertext
