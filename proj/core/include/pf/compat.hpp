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

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pf/model.hpp"

namespace pf {

enum class MeasureKind { SsdRgb, SsdLab, Mgc, L1Asym, Prediction, Oracle, External };

const char* measure_name(MeasureKind k) noexcept;
/// Accepts the command line spellings: ssd-rgb, ssd-lab, mgc, l1, prediction, oracle.
std::optional<MeasureKind> parse_measure(std::string_view name);

/// Pixel lines on both sides of one seam. Each line has length * channels
/// values, ordered along the seam with the anchor shown on the left and the
/// candidate on the right. `skip` pixels next to the cut are ignored.
struct BoundaryColumns {
  int length = 0;
  int channels = 0;
  std::vector<double> anchor_last;
  std::vector<double> anchor_penultimate;
  std::vector<double> candidate_first;
  std::vector<double> candidate_second;
};

BoundaryColumns boundary_columns(const Piece& a, const Piece& b, Relation rel, int skip_eroded);

/// Lower is more compatible. Throws DataError on shape mismatch or when
/// skip_eroded is not below half the piece size minus one.
///
/// SsdRgb      sum of squared differences across the seam.
/// SsdLab      the same after converting both lines to CIE-LAB (D65).
/// Mgc         Mahalanobis gradient compatibility, D_LR(a,b) + D_RL(b,a).
/// L1Asym      L1 distance between each side and the other side's linear
///             extrapolation (2*last - penultimate), both directions summed.
/// Prediction  as L1Asym with squared differences.
double dissimilarity(MeasureKind kind, const Piece& a, const Piece& b, Relation rel, int skip_eroded);

/// 1.0 on every true adjacency (pieces, edges and relative orientation), 0.0 elsewhere.
CompatibilityTensor oracle_tensor(const PuzzleBundle& bundle);

/// Negated dissimilarity for every ordered pair and relation. Self pairs get the
/// tensor minimum. Parallel over anchors; the result does not depend on `workers`.
CompatibilityTensor full_tensor(MeasureKind kind, const PuzzleBundle& bundle, int skip_eroded,
                                int workers = 1);

/// Score of a strip pair from its chunk scores: the plain sum. Throws on an empty list.
double strip_pair_score(std::span<const double> chunk_scores);

/// sRGB (8-bit) to CIE-LAB under D65.
std::array<double, 3> srgb_to_lab(double r8, double g8, double b8) noexcept;

}  // namespace pf
