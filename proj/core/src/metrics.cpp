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

#include "pf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pf/error.hpp"

namespace pf {

double neighbor_accuracy(const Arrangement& a, const GroundTruth& gt, PuzzleType type) {
  if (a.size() != gt.placements.size()) throw DataError("arrangement and ground truth cover different piece sets");
  gt.validate(type);
  const std::vector<Adjacency> truth = adjacent_pairs(Arrangement::from_ground_truth(gt));
  if (truth.empty()) return 1.0;
  std::set<Adjacency> solved;
  for (const Adjacency& adj : adjacent_pairs(a)) solved.insert(canonical(adj));
  std::size_t hits = 0;
  for (const Adjacency& adj : truth) hits += solved.count(canonical(adj));
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

TopCurve top_i(const CompatibilityTensor& t, const GroundTruth& gt, int i_max) {
  if (i_max < 1) throw DataError("i_max must be positive");
  if (t.size() != gt.placements.size()) throw DataError("tensor and ground truth cover different piece sets");
  const std::vector<Adjacency> truth = adjacent_pairs(Arrangement::from_ground_truth(gt));
  const std::size_t n = t.size();
  const bool type1 = t.type() == PuzzleType::Type1;

  std::vector<std::size_t> hist(static_cast<std::size_t>(i_max) + 1, 0);
  TopCurve curve;
  auto rank_of = [&](int a, Edge ea, int b, Edge eb) {
    const float s = t.score(a, ea, b, eb);
    std::size_t rank = 1;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == static_cast<std::size_t>(a)) continue;
      for (Edge ey : kEdges) {
        if (type1 && ey != opposite(ea)) continue;
        if (static_cast<int>(y) == b && ey == eb) continue;
        const float v = t.score(a, ea, y, ey);
        const bool ahead = v > s || (v == s && (static_cast<int>(y) < b || (static_cast<int>(y) == b && index(ey) < index(eb))));
        if (ahead) ++rank;
      }
    }
    return rank;
  };
  for (const Adjacency& adj : truth) {
    for (const Adjacency& dir : {adj, Adjacency{adj.b, adj.eb, adj.a, adj.ea}}) {
      const std::size_t r = rank_of(dir.a, dir.ea, dir.b, dir.eb);
      ++curve.boundaries;
      if (r <= static_cast<std::size_t>(i_max)) ++hist[r];
    }
  }
  curve.top.resize(static_cast<std::size_t>(i_max));
  std::size_t cum = 0;
  for (int i = 1; i <= i_max; ++i) {
    cum += hist[static_cast<std::size_t>(i)];
    curve.top[static_cast<std::size_t>(i - 1)] =
        curve.boundaries ? static_cast<double>(cum) / static_cast<double>(curve.boundaries) : 0.0;
  }
  return curve;
}

TopCurve aggregate_top_i(std::span<const TopCurve> curves) {
  TopCurve out;
  if (curves.empty()) return out;
  const std::size_t len = curves.front().top.size();
  out.top.assign(len, 0.0);
  for (const TopCurve& c : curves) {
    if (c.top.size() != len) throw DataError("Top-i curves differ in length");
    out.boundaries += c.boundaries;
    for (std::size_t i = 0; i < len; ++i) out.top[i] += c.top[i] * static_cast<double>(c.boundaries);
  }
  if (out.boundaries)
    for (double& v : out.top) v /= static_cast<double>(out.boundaries);
  return out;
}

Grid local_fitness_grid(const Arrangement& a, const CompatibilityTensor& t) {
  if (!a.complete()) throw DataError("arrangement not complete");
  const Dims d = a.dims();
  Grid g{d.rows, d.cols, std::vector<double>(static_cast<std::size_t>(d.area()), 0.0)};
  for (int r = 0; r < d.rows; ++r)
    for (int c = 0; c < d.cols; ++c) {
      const int x = a.piece_at(r, c);
      const int ox = a.placement(x).orientation;
      double sum = 0.0;
      int count = 0;
      for (Edge side : kEdges) {
        const int nr = r + (side == Edge::Bottom) - (side == Edge::Top);
        const int nc = c + (side == Edge::Right) - (side == Edge::Left);
        const int y = a.piece_at(nr, nc);
        if (y < 0) continue;
        sum += t.score(x, edge_facing(side, ox), y, edge_facing(opposite(side), a.placement(y).orientation));
        ++count;
      }
      g.values[static_cast<std::size_t>(r) * d.cols + c] = count ? sum / count : 0.0;
    }
  return g;
}

double fitness_gap_percent(double truth_fitness, double solved_fitness) {
  if (truth_fitness == 0.0) return 0.0;
  return 100.0 * (truth_fitness - solved_fitness) / std::abs(truth_fitness);
}

Image score_map(const CompatibilityTensor& t, const GroundTruth& gt, Edge anchor_side) {
  const std::size_t n = t.size();
  if (gt.placements.size() != n) throw DataError("tensor and ground truth cover different piece sets");
  std::vector<int> order(n);
  for (std::size_t p = 0; p < n; ++p) {
    const Placement& pl = gt.placements[p];
    order[static_cast<std::size_t>(pl.row) * gt.dims.cols + pl.col] = static_cast<int>(p);
  }
  std::vector<double> m(n * n);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const int a = order[i], b = order[j];
      const Edge ea = edge_facing(anchor_side, gt.placements[a].orientation);
      const Edge eb = edge_facing(opposite(anchor_side), gt.placements[b].orientation);
      const double v = t.score(a, ea, b, eb);
      m[i * n + j] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  Image img(static_cast<int>(n), static_cast<int>(n), 1);
  for (std::size_t k = 0; k < m.size(); ++k) {
    img.data[k] = hi > lo ? static_cast<std::uint8_t>(std::lround(255.0 * (m[k] - lo) / (hi - lo))) : 0;
  }
  return img;
}

Image grid_image(const Grid& g, int cell) {
  if (cell < 1) throw DataError("cell size must be positive");
  Image img(g.cols * cell, g.rows * cell, 1);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      const double v = std::clamp(g.at(r / cell, c / cell), 0.0, 1.0);
      img.at(r, c) = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  return img;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["neighbor_accuracy"] = neighbor_accuracy;
  j["perfect"] = perfect;
  if (fitness) j["fitness"] = *fitness;
  if (truth_fitness) j["truth_fitness"] = *truth_fitness;
  if (fitness_gap_percent) j["fitness_gap_percent"] = *fitness_gap_percent;
  j["top_i"] = top_i;
  j["local_fitness"] = {{"rows", local_fitness.rows}, {"cols", local_fitness.cols}, {"values", local_fitness.values}};
  return j.dump(2) + "\n";
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "neighbor_accuracy=" << neighbor_accuracy << "\n";
  out << "perfect=" << (perfect ? "true" : "false") << "\n";
  if (fitness) out << "fitness=" << *fitness << "\n";
  if (truth_fitness) out << "truth_fitness=" << *truth_fitness << "\n";
  if (fitness_gap_percent) out << "fitness_gap_percent=" << *fitness_gap_percent << "\n";
  for (std::size_t i = 0; i < top_i.size(); ++i) out << "top_" << (i + 1) << "=" << top_i[i] << "\n";
  out << "local_fitness_rows=" << local_fitness.rows << "\n";
  out << "local_fitness_cols=" << local_fitness.cols << "\n";
  return out.str();
}

}  // namespace pf
