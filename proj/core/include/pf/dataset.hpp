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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pf/image.hpp"
#include "pf/model.hpp"

namespace pf {

/// Where a bundle's pixels came from inside the source image(s).
struct CropInfo {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;
};

/// A bundle plus the metadata written next to it.
struct BundleManifest {
  PuzzleBundle bundle;
  std::uint64_t seed = 0;
  std::string source;
  CropInfo crop;
};

/// Center-crops to a multiple of `piece_size`, tiles row-major, shuffles piece
/// ids and (Type-2) rotates every piece by a seeded random quarter turn. The
/// ground truth records the turn that restores each piece. Throws DataError
/// for images smaller than one piece.
BundleManifest cut_and_scramble(const Image& image, int piece_size, PuzzleType type, std::uint64_t seed);

/// Zeroes the outer `t`-pixel frame of every piece in every channel.
/// Throws DataError unless t < min(height, width) / 2.
PuzzleBundle erode(const PuzzleBundle& bundle, int t);

/// One drawn augmentation of a P x 2P pair image.
struct AugmentDraw {
  int frame = 0;     // 0 none, 1 one-pixel frame, 2 two-pixel frame
  int shift_x[2] = {0, 0};  // left shift per half, 0..2
  int shift_y[2] = {0, 0};  // upward shift per half, 0..2
};

AugmentDraw draw_augmentation(std::uint64_t seed);

/// Applies frame zeroing then shifts to each P x P half independently,
/// zero-filling vacated pixels. Throws DataError unless width == 2 * height.
Image apply_augmentation(const Image& pair, const AugmentDraw& draw);

Image augment_pair(const Image& pair, std::uint64_t seed);

/// Cuts pages into full-height vertical strips of `strip_width` pixels (each
/// page center-cropped to a multiple), concatenates the pages left to right,
/// and shuffles strip ids. Pages must share their height; RGB pages are kept
/// as RGB, gray pages as one channel.
BundleManifest shred(std::span<const Image> pages, int strip_width, std::uint64_t seed);

/// floor(height / chunk) chunks of chunk x width; the residue is dropped.
std::vector<Image> chunk_strip(const Image& strip, int chunk);

Image piece_image(const Piece& p);

/// Draws every piece at its placement. Output is (rows * h) x (cols * w).
Image render(const PuzzleBundle& bundle, const Arrangement& a);

/// Bundle directory: one PNG per piece ("00000.png", ...) plus manifest.json.
/// The manifest is written last.
void save_bundle(const std::filesystem::path& dir, const BundleManifest& m);
BundleManifest load_bundle(const std::filesystem::path& dir);

/// manifest.json bytes for a bundle.
std::string manifest_json(const BundleManifest& m);

}  // namespace pf
