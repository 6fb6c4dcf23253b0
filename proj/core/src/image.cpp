// Copyright 2026 The piecefit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pf/image.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "pf/error.hpp"

namespace pf {

Image crop(const Image& img, int top, int left, int h, int w) {
  if (top < 0 || left < 0 || h < 0 || w < 0 || top + h > img.height || left + w > img.width) {
    throw DataError("crop window outside image");
  }
  Image out(w, h, img.channels);
  const std::size_t row_bytes = static_cast<std::size_t>(w) * img.channels;
  for (int r = 0; r < h; ++r) {
    const auto* src = &img.data[(static_cast<std::size_t>(top + r) * img.width + left) * img.channels];
    std::copy(src, src + row_bytes, &out.data[static_cast<std::size_t>(r) * row_bytes]);
  }
  return out;
}

Image to_gray(const Image& img) {
  if (img.channels == 1) return img;
  Image out(img.width, img.height, 1);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      const int y = 299 * img.at(r, c, 0) + 587 * img.at(r, c, 1) + 114 * img.at(r, c, 2);
      out.at(r, c) = static_cast<std::uint8_t>((y + 500) / 1000);
    }
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace

Image read_png(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng init failed for " + path.string());
  }
  Image img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode PNG " + path.string() + ": " + err);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_packing(png);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = static_cast<int>(png_get_channels(png, info));
  img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  rows.resize(static_cast<std::size_t>(img.height));
  for (int r = 0; r < img.height; ++r) {
    rows[r] = &img.data[static_cast<std::size_t>(r) * img.width * img.channels];
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  if (img.channels != 1 && img.channels != 3) throw DataError("unsupported PNG layout in " + path.string());
  return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw DataError("PNG output needs 1 or 3 channels");
  FilePtr f = open_file(path, "wb");
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng init failed for " + path.string());
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot write PNG " + path.string() + ": " + err);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (int r = 0; r < img.height; ++r) {
    rows[r] = const_cast<png_bytep>(&img.data[static_cast<std::size_t>(r) * img.width * img.channels]);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(f.get()) != 0) throw IoError("cannot write " + path.string());
}

void write_pgm(const std::filesystem::path& path, const Image& img) {
  if (img.channels != 1) throw DataError("PGM output needs a single channel image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255) throw DataError("unsupported PGM " + path.string());
  in.get();
  Image img(w, h, 1);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (!in) throw IoError("short PGM payload in " + path.string());
  return img;
}

void write_image(const std::filesystem::path& path, const Image& img) {
  if (path.extension() == ".pgm") write_pgm(path, img);
  else write_png(path, img);
}

Image read_image(const std::filesystem::path& path) {
  if (path.extension() == ".pgm") return read_pgm(path);
  return read_png(path);
}

}  // namespace pf
