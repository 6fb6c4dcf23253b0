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

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace pf {

/// Interleaved 8-bit image, row-major.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  std::uint8_t& at(int row, int col, int ch = 0) noexcept {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
  std::uint8_t at(int row, int col, int ch = 0) const noexcept {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }

  bool empty() const noexcept { return data.empty(); }
  friend bool operator==(const Image&, const Image&) = default;
};

/// Copies the h x w window starting at (top, left).
Image crop(const Image& img, int top, int left, int h, int w);

/// Luma (BT.601 integer weights) of an RGB image; grayscale input is returned as is.
Image to_gray(const Image& img);

/// Reads 8-bit gray, gray+alpha, RGB, RGBA or palette PNGs. Alpha is dropped,
/// 16-bit samples are reduced to 8 bits.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

/// Binary PGM (P5). Multi-channel images are rejected.
void write_pgm(const std::filesystem::path& path, const Image& img);
Image read_pgm(const std::filesystem::path& path);

/// Picks PGM for a .pgm extension and PNG otherwise.
void write_image(const std::filesystem::path& path, const Image& img);
Image read_image(const std::filesystem::path& path);

}  // namespace pf
