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

#include "pf/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "pf/error.hpp"
#include "pf/rng.hpp"

namespace pf {

namespace {

Piece piece_from(const Image& img, int id) { return Piece(id, img.height, img.width, img.channels, img.data); }

std::string piece_file_name(int id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05d.png", id);
  return buf;
}

void zero_frame(Piece& p, int t) {
  for (int r = 0; r < p.height(); ++r)
    for (int c = 0; c < p.width(); ++c) {
      const bool frame = r < t || c < t || r >= p.height() - t || c >= p.width() - t;
      if (!frame) continue;
      for (int ch = 0; ch < p.channels(); ++ch) p.at(r, c, ch) = 0;
    }
}

}  // namespace

BundleManifest cut_and_scramble(const Image& image, int piece_size, PuzzleType type, std::uint64_t seed) {
  if (piece_size <= 0) throw DataError("piece size must be positive");
  if (image.width < piece_size || image.height < piece_size) {
    throw DataError("image smaller than one " + std::to_string(piece_size) + "x" + std::to_string(piece_size) + " piece");
  }
  const int rows = image.height / piece_size;
  const int cols = image.width / piece_size;
  const int n = rows * cols;
  BundleManifest m;
  m.seed = seed;
  m.crop = {(image.height - rows * piece_size) / 2, (image.width - cols * piece_size) / 2, rows * piece_size,
            cols * piece_size};

  Rng rng(seed);
  std::vector<int> cell_of(static_cast<std::size_t>(n));
  std::iota(cell_of.begin(), cell_of.end(), 0);
  rng.shuffle(cell_of);

  PuzzleBundle& b = m.bundle;
  b.type = type;
  b.known_dims = Dims{rows, cols};
  GroundTruth gt{{rows, cols}, std::vector<Placement>(static_cast<std::size_t>(n))};
  b.pieces.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    const int cell = cell_of[static_cast<std::size_t>(id)];
    const int r = cell / cols, c = cell % cols;
    const int o = type == PuzzleType::Type2 ? static_cast<int>(rng.below(4)) : 0;
    const Image tile = crop(image, m.crop.top + r * piece_size, m.crop.left + c * piece_size, piece_size, piece_size);
    // Stored turned back by o, so showing it with orientation o restores the tile.
    b.pieces.push_back(rotated_copy(piece_from(tile, id), (4 - o) & 3));
    gt.placements[static_cast<std::size_t>(id)] = {r, c, o};
  }
  b.ground_truth = std::move(gt);
  return m;
}

PuzzleBundle erode(const PuzzleBundle& bundle, int t) {
  const int side = std::min(bundle.piece_height(), bundle.piece_width());
  if (t < 0 || 2 * t >= side) {
    throw DataError("erosion width " + std::to_string(t) + " must be below half the piece size " + std::to_string(side));
  }
  PuzzleBundle out = bundle;
  for (Piece& p : out.pieces) zero_frame(p, t);
  out.erosion_width = std::max(out.erosion_width, t);
  return out;
}

AugmentDraw draw_augmentation(std::uint64_t seed) {
  Rng rng(seed);
  AugmentDraw d;
  d.frame = static_cast<int>(rng.below(3));
  for (int half = 0; half < 2; ++half) {
    d.shift_x[half] = static_cast<int>(rng.below(3));
    d.shift_y[half] = static_cast<int>(rng.below(3));
  }
  return d;
}

Image apply_augmentation(const Image& pair, const AugmentDraw& draw) {
  if (pair.width != 2 * pair.height) throw DataError("pair image must be P x 2P");
  const int p = pair.height;
  Image out(pair.width, pair.height, pair.channels);
  for (int half = 0; half < 2; ++half) {
    Piece piece = piece_from(crop(pair, 0, half * p, p, p), half);
    if (draw.frame > 0) zero_frame(piece, draw.frame);
    const int dx = draw.shift_x[half], dy = draw.shift_y[half];
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) {
        const int sr = r + dy, sc = c + dx;
        const bool inside = sr < p && sc < p;
        for (int ch = 0; ch < pair.channels; ++ch) {
          out.at(r, half * p + c, ch) = inside ? piece.at(sr, sc, ch) : 0;
        }
      }
  }
  return out;
}

Image augment_pair(const Image& pair, std::uint64_t seed) { return apply_augmentation(pair, draw_augmentation(seed)); }

BundleManifest shred(std::span<const Image> pages, int strip_width, std::uint64_t seed) {
  if (pages.empty()) throw DataError("no pages to shred");
  if (strip_width <= 0) throw DataError("strip width must be positive");
  const int height = pages.front().height;
  const int channels = pages.front().channels;
  std::vector<Image> strips;
  BundleManifest m;
  m.seed = seed;
  for (const Image& page : pages) {
    if (page.width < strip_width) throw DataError("page narrower than one strip");
    if (page.height != height || page.channels != channels) throw DataError("pages differ in height or channels");
    const int count = page.width / strip_width;
    const int left = (page.width - count * strip_width) / 2;
    if (strips.empty()) m.crop = {0, left, height, count * strip_width};
    for (int k = 0; k < count; ++k) strips.push_back(crop(page, 0, left + k * strip_width, height, strip_width));
  }
  const int n = static_cast<int>(strips.size());
  Rng rng(seed);
  std::vector<int> slot_of(static_cast<std::size_t>(n));
  std::iota(slot_of.begin(), slot_of.end(), 0);
  rng.shuffle(slot_of);

  PuzzleBundle& b = m.bundle;
  b.type = PuzzleType::Type1;
  b.known_dims = Dims{1, n};
  GroundTruth gt{{1, n}, std::vector<Placement>(static_cast<std::size_t>(n))};
  for (int id = 0; id < n; ++id) {
    const int slot = slot_of[static_cast<std::size_t>(id)];
    b.pieces.push_back(piece_from(strips[static_cast<std::size_t>(slot)], id));
    gt.placements[static_cast<std::size_t>(id)] = {0, slot, 0};
  }
  b.ground_truth = std::move(gt);
  return m;
}

std::vector<Image> chunk_strip(const Image& strip, int chunk) {
  if (chunk <= 0) throw DataError("chunk height must be positive");
  std::vector<Image> out;
  for (int top = 0; top + chunk <= strip.height; top += chunk) out.push_back(crop(strip, top, 0, chunk, strip.width));
  return out;
}

Image piece_image(const Piece& p) {
  Image img(p.width(), p.height(), p.channels());
  std::copy(p.pixels().begin(), p.pixels().end(), img.data.begin());
  return img;
}

Image render(const PuzzleBundle& bundle, const Arrangement& a) {
  if (!a.complete()) throw DataError("arrangement not complete");
  if (a.size() != bundle.size()) throw DataError("arrangement and bundle differ in piece count");
  const Dims d = a.dims();
  const int ch = bundle.channels();
  // Every oriented piece shares one shape; take it from the first piece's placement.
  const int h = bundle.pieces.front().oriented_height(a.placement(0).orientation);
  const int w = bundle.pieces.front().oriented_width(a.placement(0).orientation);
  Image img(d.cols * w, d.rows * h, ch);
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const Piece& p = bundle.pieces[i];
    const Placement& pl = a.placement(static_cast<int>(i));
    if (p.oriented_height(pl.orientation) != h || p.oriented_width(pl.orientation) != w) {
      throw DataError("non-square pieces cannot be turned");
    }
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        for (int k = 0; k < ch; ++k) img.at(pl.row * h + r, pl.col * w + c, k) = p.oriented(pl.orientation, r, c, k);
  }
  return img;
}

std::string manifest_json(const BundleManifest& m) {
  const PuzzleBundle& b = m.bundle;
  nlohmann::ordered_json j;
  j["format"] = "piecefit-bundle";
  j["version"] = 1;
  if (!b.pieces.empty() && b.pieces.front().square()) j["piece_size"] = b.piece_height();
  j["piece_height"] = b.piece_height();
  j["piece_width"] = b.piece_width();
  j["channels"] = b.channels();
  j["rows"] = b.known_dims ? b.known_dims->rows : 0;
  j["cols"] = b.known_dims ? b.known_dims->cols : 0;
  j["puzzle_type"] = static_cast<int>(b.type);
  j["erosion_width"] = b.erosion_width;
  j["seed"] = m.seed;
  j["source"] = m.source;
  j["crop"] = {{"top", m.crop.top}, {"left", m.crop.left}, {"height", m.crop.height}, {"width", m.crop.width}};
  nlohmann::ordered_json pieces = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    nlohmann::ordered_json p;
    p["file"] = piece_file_name(static_cast<int>(i));
    if (b.ground_truth) {
      const Placement& pl = b.ground_truth->placements[i];
      p["row"] = pl.row;
      p["col"] = pl.col;
      p["orientation"] = pl.orientation;
    }
    pieces.push_back(std::move(p));
  }
  j["pieces"] = std::move(pieces);
  return j.dump(2) + "\n";
}

void save_bundle(const std::filesystem::path& dir, const BundleManifest& m) {
  m.bundle.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const Piece& p : m.bundle.pieces) write_png(dir / piece_file_name(p.id()), piece_image(p));
  const std::filesystem::path manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + manifest.string());
  out << manifest_json(m);
  if (!out) throw IoError("cannot write " + manifest.string());
}

BundleManifest load_bundle(const std::filesystem::path& dir) {
  const std::filesystem::path manifest = dir / "manifest.json";
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw IoError("cannot open " + manifest.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + manifest.string() + ": " + e.what());
  }
  BundleManifest m;
  try {
    if (j.value("format", "") != "piecefit-bundle") throw DataError("not a bundle manifest: " + manifest.string());
    PuzzleBundle& b = m.bundle;
    const int type = j.at("puzzle_type").get<int>();
    if (type != 1 && type != 2) throw DataError("puzzle_type must be 1 or 2");
    b.type = static_cast<PuzzleType>(type);
    b.erosion_width = j.at("erosion_width").get<int>();
    m.seed = j.value("seed", std::uint64_t{0});
    m.source = j.value("source", "");
    if (j.contains("crop")) {
      const auto& c = j["crop"];
      m.crop = {c.at("top").get<int>(), c.at("left").get<int>(), c.at("height").get<int>(), c.at("width").get<int>()};
    }
    const int rows = j.at("rows").get<int>(), cols = j.at("cols").get<int>();
    if (rows > 0 && cols > 0) b.known_dims = Dims{rows, cols};
    const int ph = j.at("piece_height").get<int>(), pw = j.at("piece_width").get<int>();
    const int channels = j.at("channels").get<int>();
    const auto& pieces = j.at("pieces");
    GroundTruth gt{b.known_dims.value_or(Dims{}), {}};
    bool has_gt = true;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const auto& e = pieces[i];
      const std::string file = e.at("file").get<std::string>();
      const Image img = read_png(dir / file);
      if (img.height != ph || img.width != pw || img.channels != channels) {
        throw DataError("piece " + file + " does not match the manifest shape");
      }
      b.pieces.push_back(piece_from(img, static_cast<int>(i)));
      if (e.contains("row") && e.contains("col")) {
        gt.placements.push_back({e["row"].get<int>(), e["col"].get<int>(), e.value("orientation", 0)});
      } else {
        has_gt = false;
      }
    }
    if (has_gt && b.known_dims) b.ground_truth = std::move(gt);
    b.validate();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + manifest.string() + ": " + e.what());
  }
  return m;
}

}  // namespace pf
