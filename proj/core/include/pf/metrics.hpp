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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pf/image.hpp"
#include "pf/model.hpp"

namespace pf {

/// Fraction of ground-truth boundaries realized by the arrangement. Boundaries
/// are compared in each piece's own edge frame, so a Type-2 solution that is
/// a whole-puzzle rotation of the truth scores the same as the truth. Throws
/// DataError if the piece sets differ.
double neighbor_accuracy(const Arrangement& a, const GroundTruth& gt, PuzzleType type);

struct TopCurve {
  std::vector<double> top;     // top[i-1] = Top-i
  std::size_t boundaries = 0;  // anchor edges with a true neighbor
};

/// For every anchor edge that has a true neighbor, ranks all candidate
/// (piece, edge) pairs by score; ties rank the lower (piece, edge) first.
/// Top-i is the fraction whose true neighbor ranks within i.
TopCurve top_i(const CompatibilityTensor& t, const GroundTruth& gt, int i_max);

/// Boundary-weighted average of several puzzles' curves.
TopCurve aggregate_top_i(std::span<const TopCurve> curves);

struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/// Mean score of each cell's piece over its grid neighbors.
Grid local_fitness_grid(const Arrangement& a, const CompatibilityTensor& t);

/// 100 * (truth - solved) / |truth|; 0 when the truth fitness is 0.
double fitness_gap_percent(double truth_fitness, double solved_fitness);

/// N x N score matrix for one physical relation (anchor side `anchor_side`,
/// candidate on the opposite side), pieces ordered row-major by ground truth.
/// Rows are anchors. Min-max rescaled to 0..255; a constant matrix is all 0.
Image score_map(const CompatibilityTensor& t, const GroundTruth& gt, Edge anchor_side);

/// Grid values in [0, 1] drawn as `cell` x `cell` gray blocks.
Image grid_image(const Grid& g, int cell = 1);

struct EvalReport {
  double neighbor_accuracy = 0.0;
  bool perfect = false;
  std::vector<double> top_i;
  std::optional<double> fitness;
  std::optional<double> truth_fitness;
  std::optional<double> fitness_gap_percent;
  Grid local_fitness;

  /// Stable key order JSON document.
  std::string to_json() const;
  /// One "key=value" line per field.
  std::string to_text() const;
};

}  // namespace pf
