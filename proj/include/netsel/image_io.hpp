#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "netsel/error.hpp"
#include "netsel/features.hpp"

namespace netsel {

namespace detail {

inline std::uint32_t read_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::int32_t read_i32le(const std::uint8_t* p) {
  return static_cast<std::int32_t>(read_u32le(p));
}

inline std::uint16_t read_u16le(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void write_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

inline void write_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

// Uncompressed 24/32-bit BMP, bottom-up or top-down.
inline RasterImage load_bmp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (data.size() < 54 || data[0] != 'B' || data[1] != 'M')
    fail(errc::malformed_file, path + ": not a BMP file");

  const std::uint32_t pixel_offset = detail::read_u32le(&data[10]);
  const std::uint32_t header_size = detail::read_u32le(&data[14]);
  if (header_size < 40) fail(errc::malformed_file, path + ": unsupported BMP header");
  const std::int32_t width = detail::read_i32le(&data[18]);
  const std::int32_t raw_height = detail::read_i32le(&data[22]);
  const std::uint16_t bpp = detail::read_u16le(&data[28]);
  const std::uint32_t compression = detail::read_u32le(&data[30]);
  if (width <= 0 || raw_height == 0) fail(errc::malformed_file, path + ": bad BMP dimensions");
  if (compression != 0 || (bpp != 24 && bpp != 32))
    fail(errc::malformed_file, path + ": only uncompressed 24/32-bit BMP is supported");

  const bool top_down = raw_height < 0;
  const int height = top_down ? -raw_height : raw_height;
  const std::size_t bytes_per_pixel = bpp / 8;
  const std::size_t row_stride = ((static_cast<std::size_t>(width) * bytes_per_pixel + 3) / 4) * 4;
  if (data.size() < pixel_offset + row_stride * height)
    fail(errc::malformed_file, path + ": truncated BMP pixel data");

  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3);
  for (int y = 0; y < height; ++y) {
    const int src_row = top_down ? y : height - 1 - y;
    const std::uint8_t* row = &data[pixel_offset + row_stride * src_row];
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* px = row + x * bytes_per_pixel;
      std::uint8_t* dst = &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
      dst[0] = px[2];  // BMP stores BGR
      dst[1] = px[1];
      dst[2] = px[0];
    }
  }
  return RasterImage(width, height, std::move(rgb));
}

inline void save_bmp(const RasterImage& img, const std::string& path) {
  const std::size_t row_stride = ((static_cast<std::size_t>(img.width) * 3 + 3) / 4) * 4;
  const std::uint32_t pixel_bytes = static_cast<std::uint32_t>(row_stride * img.height);

  std::vector<std::uint8_t> out;
  out.reserve(54 + pixel_bytes);
  out.push_back('B');
  out.push_back('M');
  detail::write_u32le(out, 54 + pixel_bytes);
  detail::write_u32le(out, 0);
  detail::write_u32le(out, 54);
  detail::write_u32le(out, 40);
  detail::write_u32le(out, static_cast<std::uint32_t>(img.width));
  detail::write_u32le(out, static_cast<std::uint32_t>(img.height));
  detail::write_u16le(out, 1);
  detail::write_u16le(out, 24);
  detail::write_u32le(out, 0);
  detail::write_u32le(out, pixel_bytes);
  detail::write_u32le(out, 2835);
  detail::write_u32le(out, 2835);
  detail::write_u32le(out, 0);
  detail::write_u32le(out, 0);
  for (int y = img.height - 1; y >= 0; --y) {
    const std::size_t row_start = out.size();
    for (int x = 0; x < img.width; ++x) {
      const std::uint8_t* px = img.at(x, y);
      out.push_back(px[2]);
      out.push_back(px[1]);
      out.push_back(px[0]);
    }
    while (out.size() - row_start < row_stride) out.push_back(0);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(errc::io_error, "cannot write " + path);
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

// PNG decode to 8-bit RGB; palette, grayscale, 16-bit and alpha variants are
// converted on the fly.
inline RasterImage load_png(const std::string& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(errc::io_error, "cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(errc::io_error, "libpng initialization failed");
  }

  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> row_ptrs;
  int width = 0, height = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(errc::malformed_file, path + ": invalid PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(errc::malformed_file, path + ": unexpected PNG row layout");
  }
  pixels.resize(static_cast<std::size_t>(width) * height * 3);
  row_ptrs.resize(height);
  for (int y = 0; y < height; ++y)
    row_ptrs[y] = pixels.data() + static_cast<std::size_t>(y) * width * 3;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return RasterImage(width, height, std::move(pixels));
}

inline void save_png(const RasterImage& img, const std::string& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(errc::io_error, "cannot write " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(errc::io_error, "libpng initialization failed");
  }
  std::vector<png_bytep> row_ptrs(img.height);
  for (int y = 0; y < img.height; ++y)
    row_ptrs[y] =
        const_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(y) * img.width * 3);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(errc::io_error, path + ": PNG write failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Dispatch on magic bytes, not on extension.
inline RasterImage load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::uint8_t magic[8] = {};
  in.read(reinterpret_cast<char*>(magic), sizeof magic);
  in.close();
  static const std::uint8_t png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (std::memcmp(magic, png_sig, 8) == 0) return load_png(path);
  if (magic[0] == 'B' && magic[1] == 'M') return load_bmp(path);
  fail(errc::malformed_file, path + ": unsupported image format (PNG and BMP only)");
}

}  // namespace netsel
