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

#include "pf/postprocess.hpp"

#include <algorithm>
#include <limits>

#include "pf/error.hpp"

namespace pf {

namespace {

/// Relation indices whose anchor edge is `e`.
std::vector<int> relations_of(PuzzleType type, Edge e) {
  if (type == PuzzleType::Type1) return {index(e)};
  return {4 * index(e), 4 * index(e) + 1, 4 * index(e) + 2, 4 * index(e) + 3};
}

}  // namespace

CompatibilityTensor minmax_normalize(const CompatibilityTensor& t, PostprocessStats* stats) {
  CompatibilityTensor out = t;
  const std::size_t n = t.size();
  PostprocessStats local;
  for (std::size_t a = 0; a < n; ++a) {
    for (Edge e : kEdges) {
      const std::vector<int> rels = relations_of(t.type(), e);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (int r : rels)
        for (std::size_t b = 0; b < n; ++b) {
          if (b == a) continue;
          lo = std::min<double>(lo, t.at(a, r, b));
          hi = std::max<double>(hi, t.at(a, r, b));
        }
      ++local.slices;
      const bool degenerate = !(hi > lo);
      if (degenerate) ++local.degenerate_slices;
      for (int r : rels)
        for (std::size_t b = 0; b < n; ++b) {
          float& v = out.at(a, r, b);
          v = (b == a || degenerate) ? 0.0f : static_cast<float>((t.at(a, r, b) - lo) / (hi - lo));
        }
    }
  }
  out.normalized = true;
  out.symmetric = false;
  if (stats) *stats = local;
  return out;
}

CompatibilityTensor symmetrize(const CompatibilityTensor& t) {
  if (!t.normalized) throw DataError("normalize first");
  CompatibilityTensor out = t;
  const std::size_t n = t.size();
  const int rels = t.relations();
  for (std::size_t a = 0; a < n; ++a)
    for (int r = 0; r < rels; ++r) {
      const int mr = relation_index(t.type(), mirror(relation_at(t.type(), r)));
      for (std::size_t b = a; b < n; ++b) {
        // Visit each mirrored pair once: for a == b only the lower relation index.
        if (b == a && mr < r) continue;
        const float mean = static_cast<float>((static_cast<double>(t.at(a, r, b)) + t.at(b, mr, a)) / 2.0);
        out.at(a, r, b) = mean;
        out.at(b, mr, a) = mean;
      }
    }
  out.symmetric = true;
  return out;
}

CompatibilityTensor postprocess(const CompatibilityTensor& t, PostprocessStats* stats) {
  CompatibilityTensor out = t.normalized ? t : minmax_normalize(t, stats);
  return out.symmetric ? out : symmetrize(out);
}

}  // namespace pf
