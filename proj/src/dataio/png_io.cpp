#include "sketchvos/dataio/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace sketchvos::dataio {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    if (mode[0] == 'r') throw NotFoundError("cannot open " + path.string());
    throw Error("cannot create " + path.string());
  }
  return f;
}

enum class PngKind { rgb, gray, palette };

void write_png(const std::filesystem::path& path, int width, int height, PngKind kind,
               const std::vector<std::uint8_t>& pixels) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("failed writing PNG " + path.string());
  }
  png_init_io(png, f.get());
  png_set_compression_level(png, 6);
  const int color_type = kind == PngKind::rgb    ? PNG_COLOR_TYPE_RGB
                         : kind == PngKind::gray ? PNG_COLOR_TYPE_GRAY
                                                 : PNG_COLOR_TYPE_PALETTE;
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (kind == PngKind::palette) {
    std::vector<png_color> colors(256);
    const auto& pal = davis_palette();
    for (int i = 0; i < 256; ++i) colors[i] = png_color{pal[i][0], pal[i][1], pal[i][2]};
    png_set_PLTE(png, info, colors.data(), 256);
  }
  png_write_info(png, info);
  const int channels = kind == PngKind::rgb ? 3 : 1;
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct DecodedPng {
  int width = 0, height = 0, channels = 0;
  bool palette = false;
  std::vector<std::uint8_t> pixels;
};

// Decodes to 8-bit samples. Palette images keep their indices unless
// `expand_palette` is set.
DecodedPng read_png(const std::filesystem::path& path, bool expand_palette) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IntegrityError("failed reading PNG " + path.string());
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  DecodedPng out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  out.palette = color_type == PNG_COLOR_TYPE_PALETTE;
  if (bit_depth == 16) png_set_strip_16(png);
  if (out.palette) {
    if (expand_palette) {
      png_set_palette_to_rgb(png);
    } else if (bit_depth < 8) {
      png_set_packing(png);
    }
  } else if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.pixels.resize(stride * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

const Palette& davis_palette() {
  static const Palette palette = [] {
    Palette p{};
    for (int i = 0; i < 256; ++i) {
      int c = i, r = 0, g = 0, b = 0;
      for (int j = 0; j < 8; ++j) {
        r |= ((c >> 0) & 1) << (7 - j);
        g |= ((c >> 1) & 1) << (7 - j);
        b |= ((c >> 2) & 1) << (7 - j);
        c >>= 3;
      }
      p[i] = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
    }
    return p;
  }();
  return palette;
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& img) {
  write_png(path, img.width(), img.height(), PngKind::rgb, img.data());
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  DecodedPng d = read_png(path, /*expand_palette=*/true);
  RgbImage img(d.height, d.width);
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      const std::uint8_t* src = d.pixels.data() + (static_cast<std::size_t>(y) * d.width + x) * d.channels;
      std::uint8_t* dst = img.px(y, x);
      for (int c = 0; c < 3; ++c) dst[c] = d.channels >= 3 ? src[c] : src[0];
    }
  }
  return img;
}

void write_label_png(const std::filesystem::path& path, const LabelMap& labels) {
  write_png(path, labels.width(), labels.height(), PngKind::palette, labels.data());
}

LabelMap read_label_png(const std::filesystem::path& path) {
  DecodedPng d = read_png(path, /*expand_palette=*/false);
  if (d.channels != 1) throw IntegrityError("expected a palette or grayscale PNG: " + path.string());
  LabelMap labels(d.height, d.width);
  labels.data() = std::move(d.pixels);
  return labels;
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint8_t> px(mask.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = mask.data()[i] ? 255 : 0;
  write_png(path, mask.width(), mask.height(), PngKind::gray, px);
}

Mask read_mask_png(const std::filesystem::path& path) {
  DecodedPng d = read_png(path, /*expand_palette=*/false);
  Mask m(d.height, d.width);
  for (std::size_t i = 0; i < m.size(); ++i) {
    bool on = false;
    for (int c = 0; c < d.channels; ++c) on = on || d.pixels[i * d.channels + c] != 0;
    m.data()[i] = on ? 1 : 0;
  }
  return m;
}

}  // namespace sketchvos::dataio
