#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace layertext {

// Coordinates: x to the right, y downward, origin at the center of the top-left pixel.

struct Size {
  int width = 0;
  int height = 0;

  std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  friend bool operator==(const Size&, const Size&) = default;
};

std::string to_string(Size s);

/// Normalized [0,1] -> 8-bit. Clamps, then rounds half up.
std::uint8_t quantize(double v);

/// 8-bit -> normalized [0,1].
inline double normalize(std::uint8_t v) { return static_cast<double>(v) / 255.0; }

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Normalized float view of a RasterImage, interleaved RGB.
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  float& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  float at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
};

/// H x W x 3 image of 8-bit samples, row-major, interleaved RGB.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = {});
  RasterImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  Size size() const { return {width_, height_}; }
  bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y) * 3 + c]; }
  Rgb pixel(int x, int y) const;
  void set_pixel(int x, int y, Rgb p);

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  FloatImage to_float() const;
  static RasterImage from_float(const FloatImage& f);

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// H x W boolean field; true marks text / foreground.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  Size size() const { return {width_, height_}; }

  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::size_t popcount() const;
  bool any() const { return popcount() > 0; }
  bool all() const { return popcount() == bits_.size(); }

  BinaryMask complement() const;
  BinaryMask operator|(const BinaryMask& o) const;
  BinaryMask operator&(const BinaryMask& o) const;
  /// Every true bit here is also true in `o`.
  bool subset_of(const BinaryMask& o) const;

  /// Euclidean-disk dilation / erosion by an integer radius.
  BinaryMask dilated(int radius) const;
  BinaryMask eroded(int radius) const;

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Per-pixel scene depth normalized to [0,1], plus the raw range seen at load time.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;
  double raw_min = 0.0;
  double raw_max = 0.0;
  bool degenerate_range = false;

  Size size() const { return {width, height}; }
  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

  /// (v - min) / (max - min); a constant field becomes 0.5 everywhere with the flag set.
  static DepthMap from_raw(int width, int height, const std::vector<double>& raw);
  static DepthMap constant(int width, int height, float value);
};

struct BBox {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  bool intersects(Size image) const;
  /// Intersection with the image bounds; w or h may be 0 when disjoint.
  BBox clipped(Size image) const;
  double center_x() const { return x + (w - 1) / 2.0; }
  double center_y() const { return y + (h - 1) / 2.0; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct TextRegion {
  BBox bbox;
  std::string text;
  std::optional<std::string> tampered_text;
  std::optional<std::string> prompt;
};

void require_same_size(Size a, Size b, const char* what);

}  // namespace layertext
