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

#include "pf/model.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pf/error.hpp"

namespace pf {

const char* edge_name(Edge e) noexcept {
  switch (e) {
    case Edge::Top: return "top";
    case Edge::Right: return "right";
    case Edge::Bottom: return "bottom";
    case Edge::Left: return "left";
  }
  return "?";
}

std::optional<Edge> parse_edge(std::string_view name) {
  for (Edge e : kEdges) {
    if (name == edge_name(e)) return e;
  }
  return std::nullopt;
}

int relation_index(PuzzleType t, Relation r) noexcept {
  if (t == PuzzleType::Type1) {
    return r.candidate_edge == opposite(r.anchor_edge) ? index(r.anchor_edge) : -1;
  }
  return 4 * index(r.anchor_edge) + index(r.candidate_edge);
}

Relation relation_at(PuzzleType t, int idx) noexcept {
  if (t == PuzzleType::Type1) return {edge_from(idx), opposite(edge_from(idx))};
  return {edge_from(idx / 4), edge_from(idx % 4)};
}

Piece::Piece(int id, int height, int width, int channels, std::vector<std::uint8_t> pixels)
    : id_(id), height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)) {
  if (id < 0 || height <= 0 || width <= 0 || (channels != 1 && channels != 3)) {
    throw DataError("invalid piece shape for piece " + std::to_string(id));
  }
  if (pixels_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw DataError("pixel buffer size mismatch for piece " + std::to_string(id));
  }
}

std::uint8_t Piece::oriented(int orientation, int row, int col, int ch) const noexcept {
  switch (orientation & 3) {
    case 0: return at(row, col, ch);
    case 1: return at(height_ - 1 - col, row, ch);
    case 2: return at(height_ - 1 - row, width_ - 1 - col, ch);
    default: return at(col, width_ - 1 - row, ch);
  }
}

Piece rotated_copy(const Piece& p, int quarter_turns) {
  const int o = quarter_turns & 3;
  const int h = p.oriented_height(o);
  const int w = p.oriented_width(o);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(h) * w * p.channels());
  std::size_t k = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < p.channels(); ++ch) out[k++] = p.oriented(o, r, c, ch);
  return Piece(p.id(), h, w, p.channels(), std::move(out));
}

void GroundTruth::validate(PuzzleType type) const {
  if (dims.rows <= 0 || dims.cols <= 0) throw DataError("ground truth has empty dims");
  if (static_cast<std::size_t>(dims.area()) != placements.size()) {
    throw DataError("ground truth dims do not match piece count");
  }
  std::vector<char> seen(placements.size(), 0);
  for (const Placement& p : placements) {
    if (p.row < 0 || p.row >= dims.rows || p.col < 0 || p.col >= dims.cols) {
      throw DataError("ground truth position outside the grid");
    }
    if (p.orientation < 0 || p.orientation > 3) throw DataError("ground truth orientation out of range");
    if (type == PuzzleType::Type1 && p.orientation != 0) {
      throw DataError("Type-1 ground truth must have orientation 0");
    }
    auto& s = seen[static_cast<std::size_t>(p.row) * dims.cols + p.col];
    if (s) throw DataError("ground truth positions overlap");
    s = 1;
  }
}

void PuzzleBundle::validate() const {
  if (pieces.empty()) throw DataError("bundle has no pieces");
  const Piece& first = pieces.front();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    if (p.id() != static_cast<int>(i)) throw DataError("piece ids must be dense 0..N-1");
    if (p.height() != first.height() || p.width() != first.width() || p.channels() != first.channels()) {
      throw DataError("pieces differ in shape");
    }
  }
  if (type == PuzzleType::Type2 && !first.square()) throw DataError("Type-2 puzzles need square pieces");
  if (known_dims && static_cast<std::size_t>(known_dims->area()) != pieces.size()) {
    throw DataError("known dims do not match piece count");
  }
  if (erosion_width < 0 || 2 * erosion_width >= std::min(first.height(), first.width())) {
    throw DataError("erosion width must be below half the piece size");
  }
  if (ground_truth) {
    if (ground_truth->placements.size() != pieces.size()) throw DataError("ground truth size mismatch");
    ground_truth->validate(type);
  }
}

CompatibilityTensor::CompatibilityTensor(std::size_t n, PuzzleType type, float fill)
    : n_(n), type_(type), scores_(n * n * static_cast<std::size_t>(relation_count(type)), fill) {}

float CompatibilityTensor::score(std::size_t a, Edge ea, std::size_t b, Edge eb) const noexcept {
  const int rel = type_ == PuzzleType::Type1 ? index(ea) : 4 * index(ea) + index(eb);
  return at(a, rel, b);
}

void CompatibilityTensor::reset_diagonal() {
  float lo = std::numeric_limits<float>::infinity();
  const int rels = relations();
  for (std::size_t a = 0; a < n_; ++a)
    for (int r = 0; r < rels; ++r)
      for (std::size_t b = 0; b < n_; ++b)
        if (a != b) lo = std::min(lo, at(a, r, b));
  if (n_ < 2) lo = 0.0f;
  for (std::size_t a = 0; a < n_; ++a)
    for (int r = 0; r < rels; ++r) at(a, r, a) = lo;
}

Adjacency canonical(Adjacency adj) noexcept {
  if (adj.b < adj.a || (adj.b == adj.a && index(adj.eb) < index(adj.ea))) {
    return {adj.b, adj.eb, adj.a, adj.ea};
  }
  return adj;
}

Arrangement::Arrangement(Dims dims, std::vector<Placement> cells)
    : dims_(dims), cells_(std::move(cells)) {
  if (dims_.rows < 0 || dims_.cols < 0) throw DataError("negative arrangement dims");
  grid_.assign(static_cast<std::size_t>(dims_.rows) * dims_.cols, -1);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Placement& p = cells_[i];
    if (!p.placed()) continue;
    if (p.row >= dims_.rows || p.col >= dims_.cols) throw DataError("placement outside arrangement dims");
    int& slot = grid_[static_cast<std::size_t>(p.row) * dims_.cols + p.col];
    // a second occupant leaves the arrangement incomplete
    if (slot == -1) slot = static_cast<int>(i);
    else slot = -2;
  }
}

Arrangement Arrangement::from_ground_truth(const GroundTruth& gt) {
  return Arrangement(gt.dims, gt.placements);
}

int Arrangement::piece_at(int row, int col) const noexcept {
  if (row < 0 || col < 0 || row >= dims_.rows || col >= dims_.cols) return -1;
  const int v = grid_[static_cast<std::size_t>(row) * dims_.cols + col];
  return v < 0 ? -1 : v;
}

bool Arrangement::complete() const noexcept {
  if (cells_.empty() || static_cast<std::size_t>(dims_.area()) != cells_.size()) return false;
  return std::all_of(grid_.begin(), grid_.end(), [](int v) { return v >= 0; });
}

Arrangement Arrangement::rotated_cw() const {
  // (r, c) in an R x C grid lands on (c, R - 1 - r) in the C x R grid.
  std::vector<Placement> cells = cells_;
  for (Placement& p : cells) {
    if (!p.placed()) continue;
    p = {p.col, dims_.rows - 1 - p.row, (p.orientation + 1) & 3};
  }
  return Arrangement({dims_.cols, dims_.rows}, std::move(cells));
}

GroundTruth Arrangement::to_ground_truth() const {
  if (!complete()) throw DataError("arrangement not complete");
  return GroundTruth{dims_, cells_};
}

std::vector<Adjacency> adjacent_pairs(const Arrangement& a) {
  if (!a.complete()) throw DataError("arrangement not complete");
  const Dims d = a.dims();
  std::vector<Adjacency> out;
  out.reserve(boundary_count(d));
  auto add = [&](int left_or_top, Edge side, int other) {
    const int ox = a.placement(left_or_top).orientation;
    const int oy = a.placement(other).orientation;
    out.push_back({left_or_top, edge_facing(side, ox), other, edge_facing(opposite(side), oy)});
  };
  for (int r = 0; r < d.rows; ++r)
    for (int c = 0; c + 1 < d.cols; ++c) add(a.piece_at(r, c), Edge::Right, a.piece_at(r, c + 1));
  for (int r = 0; r + 1 < d.rows; ++r)
    for (int c = 0; c < d.cols; ++c) add(a.piece_at(r, c), Edge::Bottom, a.piece_at(r + 1, c));
  return out;
}

}  // namespace pf
