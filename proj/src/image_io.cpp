#include "layertext/image_io.hpp"

#include <png.h>

#include <bit>
#include <cctype>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "layertext/error.hpp"

namespace layertext {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec) || fs::is_directory(path, ec)) {
    fail(ErrorCode::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

bool has_png_signature(const std::vector<std::uint8_t>& buf) {
  return buf.size() >= 8 && png_sig_cmp(buf.data(), 0, 8) == 0;
}

// ---------------------------------------------------------------------------
// PNG via libpng. Errors longjmp back into the decode/encode frame; all state
// that must survive the jump lives behind a pointer that is set before setjmp.

struct PngPixels {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  int bit_depth = 0;  // 8 or 16 after expansion
  std::vector<std::uint16_t> samples;
};

enum class PngStatus { Ok, Corrupt, PaletteAlpha };

struct DecodeState {
  const std::vector<std::uint8_t>* buf = nullptr;
  std::size_t offset = 0;
  PngPixels px;
  std::vector<std::uint8_t> raw;
  std::vector<png_bytep> rows;
  std::string message;
};

void png_read_from_buffer(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<DecodeState*>(png_get_io_ptr(png));
  if (st->offset + len > st->buf->size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, st->buf->data() + st->offset, len);
  st->offset += len;
}

void png_error_to_state(png_structp png, png_const_charp msg) {
  auto* st = static_cast<DecodeState*>(png_get_error_ptr(png));
  if (st) st->message = msg;
  png_longjmp(png, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

PngStatus decode_png(DecodeState* st) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, st, png_error_to_state, png_warning_ignore);
  if (!png) return PngStatus::Corrupt;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return PngStatus::Corrupt;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::Corrupt;
  }
  png_set_read_fn(png, st, png_read_from_buffer);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
      png_destroy_read_struct(&png, &info, nullptr);
      return PngStatus::PaletteAlpha;
    }
    png_set_palette_to_rgb(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  st->px.width = static_cast<int>(png_get_image_width(png, info));
  st->px.height = static_cast<int>(png_get_image_height(png, info));
  st->px.channels = png_get_channels(png, info);
  st->px.bit_depth = png_get_bit_depth(png, info);
  const png_size_t rowbytes = png_get_rowbytes(png, info);
  st->raw.resize(rowbytes * static_cast<std::size_t>(st->px.height));
  st->rows.resize(static_cast<std::size_t>(st->px.height));
  for (int y = 0; y < st->px.height; ++y) st->rows[y] = st->raw.data() + rowbytes * y;
  png_read_image(png, st->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return PngStatus::Ok;
}

PngPixels read_png(const std::vector<std::uint8_t>& buf, const fs::path& path) {
  auto st = std::make_unique<DecodeState>();
  st->buf = &buf;
  const PngStatus status = decode_png(st.get());
  if (status == PngStatus::PaletteAlpha) {
    fail(ErrorCode::UnsupportedFormat, "palette PNG with transparency: " + path.string());
  }
  if (status == PngStatus::Corrupt) {
    fail(ErrorCode::CorruptData, path.string() + (st->message.empty() ? "" : ": " + st->message));
  }
  PngPixels px = std::move(st->px);
  const std::size_t n = static_cast<std::size_t>(px.width) * px.height * px.channels;
  px.samples.resize(n);
  if (px.bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      px.samples[i] = static_cast<std::uint16_t>((st->raw[2 * i] << 8) | st->raw[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) px.samples[i] = st->raw[i];
  }
  return px;
}

struct EncodeState {
  std::vector<std::uint8_t> out;
  std::string message;
};

void png_write_to_buffer(png_structp png, png_bytep data, png_size_t len) {
  auto* st = static_cast<EncodeState*>(png_get_io_ptr(png));
  st->out.insert(st->out.end(), data, data + len);
}

void png_flush_noop(png_structp) {}

void png_encode_error(png_structp png, png_const_charp msg) {
  auto* st = static_cast<EncodeState*>(png_get_error_ptr(png));
  if (st) st->message = msg;
  png_longjmp(png, 1);
}

// `rows` holds big-endian samples when bit_depth == 16.
bool encode_png(EncodeState* st, int width, int height, int color_type, int bit_depth,
                const std::vector<png_bytep>* rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, st, png_encode_error, png_warning_ignore);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, st, png_write_to_buffer, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows->data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_png(const fs::path& path, int width, int height, int color_type, int bit_depth, int channels,
               std::vector<std::uint8_t>& bytes) {
  if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "cannot encode an empty image");
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = bytes.data() + rowbytes * y;
  auto st = std::make_unique<EncodeState>();
  if (!encode_png(st.get(), width, height, color_type, bit_depth, &rows)) {
    fail(ErrorCode::IoError, "PNG encode failed for " + path.string() + ": " + st->message);
  }
  write_file(path, st->out);
}

// ---------------------------------------------------------------------------
// Netpbm-style headers (PPM P6 and PFM)

struct HeaderReader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < buf.size()) {
      if (buf[pos] == '#') {
        while (pos < buf.size() && buf[pos] != '\n') ++pos;
      } else if (std::isspace(buf[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  }

  std::string token() {
    skip_space_and_comments();
    std::string t;
    while (pos < buf.size() && !std::isspace(buf[pos])) t.push_back(static_cast<char>(buf[pos++]));
    return t;
  }
};

int parse_positive(const std::string& t, const fs::path& path) {
  try {
    std::size_t used = 0;
    const long v = std::stol(t, &used);
    if (used != t.size() || v <= 0 || v > (1 << 24)) throw std::out_of_range("dim");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    fail(ErrorCode::CorruptData, "bad header field '" + t + "' in " + path.string());
  }
}

RasterImage decode_ppm(const std::vector<std::uint8_t>& buf, const fs::path& path) {
  HeaderReader r{buf};
  r.token();  // "P6"
  const int w = parse_positive(r.token(), path);
  const int h = parse_positive(r.token(), path);
  const int maxval = parse_positive(r.token(), path);
  if (maxval != 255) fail(ErrorCode::UnsupportedFormat, "PPM maxval " + std::to_string(maxval) + ": " + path.string());
  // Exactly one whitespace byte separates the header from the raster.
  if (r.pos >= buf.size() || !std::isspace(buf[r.pos])) fail(ErrorCode::CorruptData, "truncated PPM header");
  ++r.pos;
  const std::size_t n = static_cast<std::size_t>(w) * h * 3;
  if (buf.size() - r.pos < n) fail(ErrorCode::CorruptData, "truncated PPM raster: " + path.string());
  return RasterImage(w, h, std::vector<std::uint8_t>(buf.begin() + r.pos, buf.begin() + r.pos + n));
}

DepthMap decode_pfm(const std::vector<std::uint8_t>& buf, const fs::path& path) {
  HeaderReader r{buf};
  const std::string magic = r.token();
  if (magic == "PF") fail(ErrorCode::UnsupportedFormat, "color PFM is not a depth map: " + path.string());
  const int w = parse_positive(r.token(), path);
  const int h = parse_positive(r.token(), path);
  const std::string scale_tok = r.token();
  double scale = 0.0;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    fail(ErrorCode::CorruptData, "bad PFM scale in " + path.string());
  }
  if (scale == 0.0) fail(ErrorCode::CorruptData, "zero PFM scale in " + path.string());
  if (r.pos >= buf.size() || !std::isspace(buf[r.pos])) fail(ErrorCode::CorruptData, "truncated PFM header");
  ++r.pos;
  const bool little = scale < 0.0;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (buf.size() - r.pos < n * 4) fail(ErrorCode::CorruptData, "truncated PFM raster: " + path.string());
  const bool host_little = std::endian::native == std::endian::little;
  std::vector<double> raw(n);
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;  // PFM rows run bottom to top
    for (int x = 0; x < w; ++x) {
      std::uint8_t b[4];
      std::memcpy(b, buf.data() + r.pos + (static_cast<std::size_t>(row) * w + x) * 4, 4);
      if (little != host_little) std::swap(b[0], b[3]), std::swap(b[1], b[2]);
      float f;
      std::memcpy(&f, b, 4);
      raw[static_cast<std::size_t>(y) * w + x] = f;
    }
  }
  return DepthMap::from_raw(w, h, raw);
}

bool starts_with(const std::vector<std::uint8_t>& buf, const char* magic) {
  const std::size_t n = std::strlen(magic);
  return buf.size() > n && std::memcmp(buf.data(), magic, n) == 0 && std::isspace(buf[n]);
}

}  // namespace

// ---------------------------------------------------------------------------

RasterImage load_image_with_alpha(const fs::path& path, std::optional<BinaryMask>& alpha) {
  alpha.reset();
  const auto buf = read_file(path);
  if (starts_with(buf, "P6")) return decode_ppm(buf, path);
  if (!has_png_signature(buf)) fail(ErrorCode::UnsupportedFormat, "not a PNG or binary PPM: " + path.string());

  const PngPixels px = read_png(buf, path);
  if (px.bit_depth != 8) {
    fail(ErrorCode::UnsupportedFormat, std::to_string(px.bit_depth) + "-bit PNG image: " + path.string());
  }
  RasterImage img(px.width, px.height);
  const bool color = px.channels >= 3;
  const bool has_alpha = px.channels == 2 || px.channels == 4;
  if (has_alpha) alpha.emplace(px.width, px.height);
  auto& out = img.data();
  for (int y = 0; y < px.height; ++y) {
    for (int x = 0; x < px.width; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * px.width + x;
      const std::uint16_t* s = &px.samples[p * px.channels];
      for (int c = 0; c < 3; ++c) out[p * 3 + c] = static_cast<std::uint8_t>(color ? s[c] : s[0]);
      if (has_alpha) alpha->set(x, y, s[px.channels - 1] >= 128);
    }
  }
  return img;
}

RasterImage load_image(const fs::path& path, ImageLoadInfo* info) {
  std::optional<BinaryMask> alpha;
  RasterImage img = load_image_with_alpha(path, alpha);
  if (info) info->alpha_dropped = alpha.has_value();
  return img;
}

void save_image(const RasterImage& img, const fs::path& path) {
  std::vector<std::uint8_t> bytes = img.data();
  write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8, 3, bytes);
}

BinaryMask load_mask(const fs::path& path) {
  const auto buf = read_file(path);
  if (!has_png_signature(buf)) fail(ErrorCode::UnsupportedFormat, "mask must be a PNG: " + path.string());
  const PngPixels px = read_png(buf, path);
  if (px.bit_depth != 8) fail(ErrorCode::UnsupportedFormat, "mask PNG must be 8-bit: " + path.string());
  BinaryMask m(px.width, px.height);
  for (int y = 0; y < px.height; ++y) {
    for (int x = 0; x < px.width; ++x) {
      m.set(x, y, px.samples[(static_cast<std::size_t>(y) * px.width + x) * px.channels] >= 128);
    }
  }
  return m;
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  std::vector<std::uint8_t> bytes(mask.bits().size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.bits()[i] ? 255 : 0;
  write_png(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, 1, bytes);
}

DepthMap load_depth(const fs::path& path) {
  const auto buf = read_file(path);
  if (starts_with(buf, "Pf") || starts_with(buf, "PF")) return decode_pfm(buf, path);
  if (!has_png_signature(buf)) fail(ErrorCode::UnsupportedFormat, "depth must be PNG or PFM: " + path.string());
  const PngPixels px = read_png(buf, path);
  if (px.channels > 2) fail(ErrorCode::UnsupportedFormat, "depth PNG must be single-channel: " + path.string());
  std::vector<double> raw(static_cast<std::size_t>(px.width) * px.height);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = px.samples[i * px.channels];
  return DepthMap::from_raw(px.width, px.height, raw);
}

void save_pfm(int width, int height, const std::vector<float>& values, const fs::path& path) {
  if (values.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::InvalidArgument, "PFM sample count does not match dimensions");
  }
  std::ostringstream header;
  header << "Pf\n" << width << ' ' << height << "\n-1.0\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  const bool host_little = std::endian::native == std::endian::little;
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      std::uint8_t b[4];
      std::memcpy(b, &values[static_cast<std::size_t>(y) * width + x], 4);
      if (!host_little) std::swap(b[0], b[3]), std::swap(b[1], b[2]);
      bytes.insert(bytes.end(), b, b + 4);
    }
  }
  write_file(path, bytes);
}

void save_depth_pfm(const DepthMap& depth, const fs::path& path) {
  save_pfm(depth.width, depth.height, depth.values, path);
}

void save_png16(int width, int height, const std::vector<std::uint16_t>& values, const fs::path& path) {
  if (values.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::InvalidArgument, "PNG sample count does not match dimensions");
  }
  std::vector<std::uint8_t> bytes(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    bytes[2 * i] = static_cast<std::uint8_t>(values[i] >> 8);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(values[i] & 0xFF);
  }
  write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 16, 1, bytes);
}

}  // namespace layertext
