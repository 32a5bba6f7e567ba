#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

#include "dfs/io.hpp"

namespace dfs::io {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Imaged read_png(const std::string& path, double gamma) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("PNG: cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("PNG: allocation failure");
  }
  std::vector<png_byte> raw;
  std::vector<png_bytep> rows;
  int w = 0, h = 0, channels = 0, bit_depth = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("PNG: decode failed for " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  if (png_get_bit_depth(png, info) == 16) png_set_swap(png);  // file is big-endian
  png_read_update_info(png, info);
  w = int(png_get_image_width(png, info));
  h = int(png_get_image_height(png, info));
  channels = int(png_get_channels(png, info));
  bit_depth = int(png_get_bit_depth(png, info));
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("PNG: unsupported channel count in " + path);
  }
  const size_t stride = png_get_rowbytes(png, info);
  raw.resize(stride * size_t(h));
  rows.resize(size_t(h));
  for (int y = 0; y < h; ++y) rows[size_t(y)] = raw.data() + stride * size_t(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
  Imaged img(w, h, channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) {
        double v;
        if (bit_depth == 16) {
          const png_byte* p = rows[size_t(y)] + (size_t(x) * channels + c) * 2;
          v = double(*reinterpret_cast<const std::uint16_t*>(p));
        } else {
          v = double(rows[size_t(y)][size_t(x) * channels + c]);
        }
        img[c](y, x) = std::pow(v / maxv, gamma);  // to linear light
      }
  return img;
}

void write_png(const std::string& path, const Imaged& img, int bit_depth, double gamma) {
  img.require_consistent();
  if (bit_depth != 8 && bit_depth != 16) throw std::invalid_argument("PNG: bit depth must be 8 or 16");
  if (img.channels() != 1 && img.channels() != 3)
    throw std::invalid_argument("PNG: only 1 or 3 channels");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("PNG: cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG: allocation failure");
  }
  // volatile: live across setjmp below, keeps the values defined after longjmp
  const volatile int w = img.width(), h = img.height(), nc = img.channels();
  const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
  const size_t stride = size_t(w) * size_t(nc) * size_t(bit_depth / 8);
  std::vector<png_byte> raw(stride * size_t(h));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nc; ++c) {
        const double lin = std::clamp(img[c](y, x), 0.0, 1.0);
        const double enc = std::pow(lin, 1.0 / gamma);
        const auto q = std::uint32_t(std::lround(enc * maxv));
        png_byte* p = raw.data() + stride * size_t(y) + (size_t(x) * nc + c) * size_t(bit_depth / 8);
        if (bit_depth == 16)
          *reinterpret_cast<std::uint16_t*>(p) = std::uint16_t(std::min(q, 65535u));
        else
          *p = png_byte(std::min(q, 255u));
      }
  std::vector<png_bytep> rows(size_t(h), nullptr);
  for (int y = 0; y < h; ++y) rows[size_t(y)] = raw.data() + stride * size_t(y);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG: encode failed for " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, png_uint_32(w), png_uint_32(h), bit_depth,
               nc == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // emit big-endian samples
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace dfs::io
