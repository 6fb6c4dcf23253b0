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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pf {

/// Side of a piece in its own pixel frame. Turning a piece a quarter turn
/// clockwise carries Top -> Right -> Bottom -> Left -> Top.
enum class Edge : std::uint8_t { Top = 0, Right = 1, Bottom = 2, Left = 3 };

inline constexpr std::array<Edge, 4> kEdges = {Edge::Top, Edge::Right, Edge::Bottom, Edge::Left};

constexpr int index(Edge e) noexcept { return static_cast<int>(e); }
constexpr Edge edge_from(int i) noexcept { return static_cast<Edge>(i & 3); }
constexpr Edge opposite(Edge e) noexcept { return edge_from(index(e) + 2); }

/// Where the piece's own edge `e` ends up after `quarter_turns` clockwise turns.
constexpr Edge rotate_cw(Edge e, int quarter_turns) noexcept {
  return edge_from(index(e) + quarter_turns);
}

/// Which of the piece's own edges faces physical side `side` when the piece
/// is shown with `orientation` clockwise quarter turns.
constexpr Edge edge_facing(Edge side, int orientation) noexcept {
  return edge_from(index(side) - orientation);
}

const char* edge_name(Edge e) noexcept;
std::optional<Edge> parse_edge(std::string_view name);

enum class PuzzleType : std::uint8_t { Type1 = 1, Type2 = 2 };

/// Anchor edge meets candidate edge. Both are expressed in each piece's own frame.
struct Relation {
  Edge anchor_edge = Edge::Right;
  Edge candidate_edge = Edge::Left;

  friend bool operator==(const Relation&, const Relation&) = default;
};

/// 4 relations for Type-1 (candidate edge opposite the anchor edge), 16 for Type-2.
constexpr int relation_count(PuzzleType t) noexcept { return t == PuzzleType::Type1 ? 4 : 16; }

/// Storage index of a relation: the anchor edge for Type-1,
/// 4 * anchor_edge + candidate_edge for Type-2. Returns -1 for a relation
/// that Type-1 does not admit.
int relation_index(PuzzleType t, Relation r) noexcept;
Relation relation_at(PuzzleType t, int idx) noexcept;

/// Relation with anchor and candidate swapped.
constexpr Relation mirror(Relation r) noexcept { return {r.candidate_edge, r.anchor_edge}; }

/// One tile (or strip) of 8-bit pixels, row-major, channels interleaved.
class Piece {
 public:
  Piece() = default;
  Piece(int id, int height, int width, int channels, std::vector<std::uint8_t> pixels);
  Piece(int id, int size, int channels, std::vector<std::uint8_t> pixels)
      : Piece(id, size, size, channels, std::move(pixels)) {}

  int id() const noexcept { return id_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  bool square() const noexcept { return height_ == width_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> mutable_pixels() noexcept { return pixels_; }

  std::uint8_t at(int row, int col, int ch) const noexcept {
    return pixels_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }
  std::uint8_t& at(int row, int col, int ch) noexcept {
    return pixels_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }

  /// Pixel of the piece as displayed after `orientation` clockwise quarter
  /// turns. Coordinates are in the rotated frame. Pixel data is not touched.
  std::uint8_t oriented(int orientation, int row, int col, int ch) const noexcept;

  int oriented_height(int orientation) const noexcept { return (orientation & 1) ? width_ : height_; }
  int oriented_width(int orientation) const noexcept { return (orientation & 1) ? height_ : width_; }

 private:
  int id_ = 0;
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Returns a new piece holding the pixels rotated `quarter_turns` clockwise.
Piece rotated_copy(const Piece& p, int quarter_turns);

/// Grid cell plus orientation (clockwise quarter turns, 0..3).
struct Placement {
  int row = -1;
  int col = -1;
  int orientation = 0;

  bool placed() const noexcept { return row >= 0 && col >= 0; }
  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Dims {
  int rows = 0;
  int cols = 0;

  int area() const noexcept { return rows * cols; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Original position of every piece. Placing piece i at placements[i] restores the source image.
struct GroundTruth {
  Dims dims;
  std::vector<Placement> placements;

  /// Throws DataError if the positions do not tile dims exactly once.
  void validate(PuzzleType type) const;
};

struct PuzzleBundle {
  std::vector<Piece> pieces;
  PuzzleType type = PuzzleType::Type1;
  std::optional<Dims> known_dims;
  std::optional<GroundTruth> ground_truth;
  int erosion_width = 0;

  std::size_t size() const noexcept { return pieces.size(); }
  int piece_height() const noexcept { return pieces.empty() ? 0 : pieces.front().height(); }
  int piece_width() const noexcept { return pieces.empty() ? 0 : pieces.front().width(); }
  int channels() const noexcept { return pieces.empty() ? 0 : pieces.front().channels(); }

  /// Checks the cross-piece invariants (shared shape, dense ids, dims, erosion).
  void validate() const;
};

/// Scores indexed by (anchor piece, relation, candidate piece). Higher means
/// more compatible. Self pairs hold the tensor minimum.
class CompatibilityTensor {
 public:
  CompatibilityTensor() = default;
  CompatibilityTensor(std::size_t n, PuzzleType type, float fill = 0.0f);

  std::size_t size() const noexcept { return n_; }
  PuzzleType type() const noexcept { return type_; }
  int relations() const noexcept { return relation_count(type_); }

  float at(std::size_t anchor, int rel, std::size_t candidate) const noexcept {
    return scores_[offset(anchor, rel, candidate)];
  }
  float& at(std::size_t anchor, int rel, std::size_t candidate) noexcept {
    return scores_[offset(anchor, rel, candidate)];
  }

  /// Score for anchor edge `ea` of piece a meeting edge `eb` of piece b.
  /// Type-1 tensors are keyed by the anchor edge alone, so `eb` is assumed
  /// to be opposite(ea) there.
  float score(std::size_t a, Edge ea, std::size_t b, Edge eb) const noexcept;

  std::span<const float> values() const noexcept { return scores_; }
  std::span<float> values() noexcept { return scores_; }

  bool normalized = false;
  bool symmetric = false;

  /// Sets every self-pair entry to the minimum off-diagonal value.
  void reset_diagonal();

  std::size_t offset(std::size_t anchor, int rel, std::size_t candidate) const noexcept {
    return (anchor * static_cast<std::size_t>(relations()) + static_cast<std::size_t>(rel)) * n_ + candidate;
  }

 private:
  std::size_t n_ = 0;
  PuzzleType type_ = PuzzleType::Type1;
  std::vector<float> scores_;
};

/// Piece `a` meets piece `b`; `ea` and `eb` are the touching edges in each piece's own frame.
struct Adjacency {
  int a = 0;
  Edge ea = Edge::Right;
  int b = 0;
  Edge eb = Edge::Left;

  friend bool operator==(const Adjacency&, const Adjacency&) = default;
  friend auto operator<=>(const Adjacency&, const Adjacency&) = default;
};

/// Same boundary regardless of which side is called the anchor.
Adjacency canonical(Adjacency adj) noexcept;

/// A chromosome: every piece at a cell of a rows x cols grid with an orientation.
class Arrangement {
 public:
  Arrangement() = default;
  Arrangement(Dims dims, std::vector<Placement> cells);

  static Arrangement from_ground_truth(const GroundTruth& gt);

  Dims dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return cells_.size(); }
  const std::vector<Placement>& cells() const noexcept { return cells_; }
  const Placement& placement(int piece) const { return cells_.at(static_cast<std::size_t>(piece)); }

  /// Piece at (row, col) or -1.
  int piece_at(int row, int col) const noexcept;

  /// Every piece placed once, no shared cells, and the placements fill dims.
  bool complete() const noexcept;

  /// Returns a copy rotated a quarter turn clockwise as a whole (grid and pieces).
  Arrangement rotated_cw() const;

  /// Ground truth view of a complete arrangement.
  GroundTruth to_ground_truth() const;

  friend bool operator==(const Arrangement& x, const Arrangement& y) {
    return x.dims_ == y.dims_ && x.cells_ == y.cells_;
  }

 private:
  Dims dims_;
  std::vector<Placement> cells_;
  std::vector<int> grid_;
};

/// Every internal boundary of a complete arrangement exactly once, horizontal
/// boundaries first in row-major order, then vertical ones. Edges are in each
/// piece's own frame. Throws DataError("arrangement not complete").
std::vector<Adjacency> adjacent_pairs(const Arrangement& a);

/// rows * (cols - 1) + cols * (rows - 1)
constexpr std::size_t boundary_count(Dims d) noexcept {
  if (d.rows <= 0 || d.cols <= 0) return 0;
  return static_cast<std::size_t>(d.rows * (d.cols - 1) + d.cols * (d.rows - 1));
}

}  // namespace pf
