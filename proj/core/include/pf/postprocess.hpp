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

#include "pf/model.hpp"

namespace pf {

struct PostprocessStats {
  std::size_t slices = 0;
  std::size_t degenerate_slices = 0;  // max == min; written as all zeros
};

/// Per (anchor piece, anchor edge) min-max scaling to [0, 1] over every
/// candidate piece and candidate edge. Self pairs are left out of the
/// min/max and set to 0.
CompatibilityTensor minmax_normalize(const CompatibilityTensor& t, PostprocessStats* stats = nullptr);

/// Replaces each entry and its mirror (anchor and candidate swapped, edges
/// swapped) by their mean. Throws DataError("normalize first") on raw input.
CompatibilityTensor symmetrize(const CompatibilityTensor& t);

/// normalize, then symmetrize; skips a step the tensor's flags say is done.
CompatibilityTensor postprocess(const CompatibilityTensor& t, PostprocessStats* stats = nullptr);

}  // namespace pf
