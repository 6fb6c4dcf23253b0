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

#include "pf/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "pf/error.hpp"
#include "pf/parallel.hpp"

namespace pf {

namespace {

constexpr std::array<const char*, kPhaseCount> kPhaseLabels = {"1.1", "1.2", "2", "3", "4.1", "4.2", "5"};
constexpr std::array<Phase, kPhaseCount> kPhaseOrder = {Phase::FitterParent,   Phase::WeakerParent,
                                                        Phase::Agreement,      Phase::BestBuddies,
                                                        Phase::MostCompatible, Phase::SecondCompatible,
                                                        Phase::Random};

constexpr int kRowStep[4] = {-1, 0, 1, 0};  // indexed by Edge: neighbor above, right, below, left
constexpr int kColStep[4] = {0, 1, 0, -1};

constexpr double kRouletteFloor = 1e-9;

}  // namespace

const char* phase_label(Phase p) noexcept { return kPhaseLabels[static_cast<int>(p)]; }

std::optional<Phase> parse_phase(std::string_view label) {
  for (int i = 0; i < kPhaseCount; ++i) {
    if (label == kPhaseLabels[i]) return static_cast<Phase>(i);
  }
  return std::nullopt;
}

void GaConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (population < 2) throw DataError("population must be at least 2");
  if (elitism < 0 || elitism >= population) throw DataError("elitism must be in [0, population)");
  if (stall_generations < 1) throw DataError("stall generations must be positive");
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw DataError("alpha0 must be in (0, 1)");
  if (!prob(skip_phase1_prob) || !prob(skip_phase23_prob)) throw DataError("skip probabilities must be in [0, 1]");
  if (restarts < 1) throw DataError("restarts must be positive");
  if (max_generations < 0) throw DataError("max generations must be non-negative");
  for (Phase p : {Phase::MostCompatible, Phase::SecondCompatible, Phase::Random}) {
    if (!enabled(p)) throw DataError(std::string("phase ") + phase_label(p) + " cannot be disabled");
  }
}

GaConfig ablate(const GaConfig& cfg, std::span<const Phase> disabled) {
  GaConfig out = cfg;
  for (Phase p : disabled) {
    if (p == Phase::MostCompatible || p == Phase::SecondCompatible || p == Phase::Random) {
      throw DataError(std::string("phase ") + phase_label(p) + " cannot be disabled");
    }
    out.disabled[static_cast<int>(p)] = true;
  }
  return out;
}

double fitness(const Arrangement& a, const CompatibilityTensor& t) {
  double sum = 0.0;
  for (const Adjacency& adj : adjacent_pairs(a)) sum += t.score(adj.a, adj.ea, adj.b, adj.eb);
  return sum;
}

std::vector<Dims> allowed_shapes(std::size_t n, PuzzleType type, DimsMode mode, std::optional<Dims> known) {
  std::vector<Dims> shapes;
  if (mode == DimsMode::Known) {
    if (!known) throw DataError("known dims requested but the bundle has none");
    if (static_cast<std::size_t>(known->area()) != n) throw DataError("known dims do not match piece count");
    shapes.push_back(*known);
    if (type == PuzzleType::Type2 && known->rows != known->cols) shapes.push_back({known->cols, known->rows});
    return shapes;
  }
  for (std::size_t r = 1; r <= n; ++r) {
    if (n % r == 0) shapes.push_back({static_cast<int>(r), static_cast<int>(n / r)});
  }
  return shapes;
}

Dims most_square_dims(std::size_t n) {
  std::size_t rows = 1;
  for (std::size_t r = 1; r * r <= n; ++r) {
    if (n % r == 0) rows = r;
  }
  return {static_cast<int>(rows), static_cast<int>(rows ? n / rows : 0)};
}

Arrangement random_arrangement(std::size_t n, PuzzleType type, Dims dims, Rng& rng) {
  if (static_cast<std::size_t>(dims.area()) != n) throw DataError("dims do not match piece count");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<Placement> cells(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int o = type == PuzzleType::Type2 ? static_cast<int>(rng.below(4)) : 0;
    cells[static_cast<std::size_t>(order[k])] = {static_cast<int>(k) / dims.cols, static_cast<int>(k) % dims.cols, o};
  }
  return Arrangement(dims, std::move(cells));
}

Chromosome::Chromosome(Arrangement a, const CompatibilityTensor& t) : arrangement_(std::move(a)) {
  if (!arrangement_.complete()) throw DataError("arrangement not complete");
  const std::size_t n = arrangement_.size();
  piece_score_.assign(n, 0.0);
  neighbors_.assign(n * 4, EdgeRef{});
  std::vector<int> degree(n, 0);
  const Dims d = arrangement_.dims();
  auto link = [&](int x, Edge side, int y) {
    const Edge ex = edge_facing(side, arrangement_.placement(x).orientation);
    const Edge ey = edge_facing(opposite(side), arrangement_.placement(y).orientation);
    const double s = t.score(static_cast<std::size_t>(x), ex, static_cast<std::size_t>(y), ey);
    fitness_ += s;
    neighbors_[static_cast<std::size_t>(x) * 4 + index(ex)] = {y, ey};
    neighbors_[static_cast<std::size_t>(y) * 4 + index(ey)] = {x, ex};
    piece_score_[static_cast<std::size_t>(x)] += s;
    piece_score_[static_cast<std::size_t>(y)] += s;
    ++degree[static_cast<std::size_t>(x)];
    ++degree[static_cast<std::size_t>(y)];
  };
  // Same summation order as fitness(): horizontal boundaries, then vertical.
  for (int r = 0; r < d.rows; ++r)
    for (int c = 0; c + 1 < d.cols; ++c) link(arrangement_.piece_at(r, c), Edge::Right, arrangement_.piece_at(r, c + 1));
  for (int r = 0; r + 1 < d.rows; ++r)
    for (int c = 0; c < d.cols; ++c) link(arrangement_.piece_at(r, c), Edge::Bottom, arrangement_.piece_at(r + 1, c));
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] > 0) piece_score_[i] /= degree[i];
  }
  const std::size_t boundaries = boundary_count(d);
  mean_score_ = boundaries ? fitness_ / static_cast<double>(boundaries) : 0.0;
}

// ---------------------------------------------------------------------------
// Crossover

struct Crossover::Tables {
  const CompatibilityTensor* tensor = nullptr;
  std::size_t n = 0;
  PuzzleType type = PuzzleType::Type1;
  int max_rows = 0;
  int max_cols = 0;
  std::vector<int> max_cols_for_rows;  // [h]: widest allowed shape with at least h rows
  std::vector<EdgeRef> best;
  std::vector<EdgeRef> second;
  // Candidates of every (piece, edge), best first; ties by (piece, edge).
  std::size_t ranked_len = 0;
  std::vector<EdgeRef> ranked;
  std::vector<float> ranked_score;
  double alpha0 = 0.8;
  double skip_phase1_prob = 0.0;
  double skip_phase23_prob = 0.0;
  std::array<bool, kPhaseCount> disabled{};
};

struct Crossover::Workspace {
  int grid_rows = 0;
  int grid_cols = 0;
  std::vector<int> grid;  // piece id or -1
  std::vector<int> touched;
  std::set<int> frontier;  // empty cells next to the kernel, row-major
  std::vector<char> in_frontier;
  std::vector<int> cell_of;
  std::vector<int> orientation;
  std::vector<int> unused;
  std::vector<int> unused_pos;
  std::vector<std::size_t> cursor;  // per (piece, edge): no unused candidate before this rank
  int min_r = 0, max_r = 0, min_c = 0, max_c = 0;
  std::size_t placed = 0;

  explicit Workspace(const Tables& tb)
      : grid_rows(2 * tb.max_rows - 1),
        grid_cols(2 * tb.max_cols - 1),
        grid(static_cast<std::size_t>(grid_rows) * grid_cols, -1),
        in_frontier(grid.size(), 0),
        cell_of(tb.n, -1),
        orientation(tb.n, 0),
        unused_pos(tb.n, -1),
        cursor(tb.n * 4, 0) {}
};

Crossover::Crossover(const CompatibilityTensor& t, std::vector<Dims> shapes, const GaConfig& cfg) {
  if (shapes.empty()) throw DataError("no admissible puzzle shape");
  auto tb = std::make_shared<Tables>();
  tb->tensor = &t;
  tb->n = t.size();
  tb->type = t.type();
  for (const Dims& s : shapes) {
    if (static_cast<std::size_t>(s.area()) != tb->n) throw DataError("shape area does not match piece count");
    tb->max_rows = std::max(tb->max_rows, s.rows);
    tb->max_cols = std::max(tb->max_cols, s.cols);
  }
  tb->max_cols_for_rows.assign(static_cast<std::size_t>(tb->max_rows) + 1, 0);
  for (int h = 1; h <= tb->max_rows; ++h)
    for (const Dims& s : shapes)
      if (s.rows >= h) tb->max_cols_for_rows[h] = std::max(tb->max_cols_for_rows[h], s.cols);
  tb->alpha0 = cfg.alpha0;
  tb->skip_phase1_prob = cfg.skip_phase1_prob;
  tb->skip_phase23_prob = cfg.skip_phase23_prob;
  tb->disabled = cfg.disabled;

  // Strict top-3 per edge. Ties leave the rank empty.
  const std::size_t n = tb->n;
  tb->best.assign(n * 4, EdgeRef{});
  tb->second.assign(n * 4, EdgeRef{});
  for (std::size_t x = 0; x < n; ++x)
    for (Edge e : kEdges) {
      float s1 = 0, s2 = 0, s3 = 0;
      EdgeRef r1, r2;
      int count = 0;
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x) continue;
        for (Edge ey : kEdges) {
          if (tb->type == PuzzleType::Type1 && ey != opposite(e)) continue;
          const float s = t.score(x, e, y, ey);
          const EdgeRef ref{static_cast<int>(y), ey};
          if (count == 0 || s > s1) {
            s3 = s2; s2 = s1; r2 = r1; s1 = s; r1 = ref;
          } else if (count == 1 || s > s2) {
            s3 = s2; s2 = s; r2 = ref;
          } else if (count == 2 || s > s3) {
            s3 = s;
          }
          ++count;
        }
      }
      const std::size_t k = x * 4 + static_cast<std::size_t>(index(e));
      if (count >= 1 && (count == 1 || s1 > s2)) tb->best[k] = r1;
      if (count >= 2 && s1 > s2 && (count == 2 || s2 > s3)) tb->second[k] = r2;
    }

  tb->ranked_len = (tb->type == PuzzleType::Type1 ? 1 : 4) * (n - 1);
  tb->ranked.resize(n * 4 * tb->ranked_len);
  tb->ranked_score.resize(tb->ranked.size());
  std::vector<std::pair<float, EdgeRef>> list;
  for (std::size_t x = 0; x < n; ++x)
    for (Edge e : kEdges) {
      list.clear();
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x) continue;
        for (Edge ey : kEdges) {
          if (tb->type == PuzzleType::Type1 && ey != opposite(e)) continue;
          list.emplace_back(t.score(x, e, y, ey), EdgeRef{static_cast<int>(y), ey});
        }
      }
      // y and ey ascend during the fill, so a stable sort keeps ties in (piece, edge) order.
      std::stable_sort(list.begin(), list.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
      const std::size_t base = (x * 4 + static_cast<std::size_t>(index(e))) * tb->ranked_len;
      for (std::size_t i = 0; i < list.size(); ++i) {
        tb->ranked_score[base + i] = list[i].first;
        tb->ranked[base + i] = list[i].second;
      }
    }
  tables_ = std::move(tb);
  work_ = std::make_unique<Workspace>(*tables_);
}

Crossover::Crossover(const Crossover& other)
    : tables_(other.tables_), work_(std::make_unique<Workspace>(*other.tables_)) {}

Crossover& Crossover::operator=(const Crossover& other) {
  if (this != &other) {
    tables_ = other.tables_;
    work_ = std::make_unique<Workspace>(*tables_);
  }
  return *this;
}

Crossover::Crossover(Crossover&&) noexcept = default;
Crossover& Crossover::operator=(Crossover&&) noexcept = default;
Crossover::~Crossover() = default;

EdgeRef Crossover::best(int piece, Edge e) const noexcept {
  return tables_->best[static_cast<std::size_t>(piece) * 4 + static_cast<std::size_t>(index(e))];
}

EdgeRef Crossover::second(int piece, Edge e) const noexcept {
  return tables_->second[static_cast<std::size_t>(piece) * 4 + static_cast<std::size_t>(index(e))];
}

Arrangement Crossover::operator()(const Chromosome& pa, const Chromosome& pb, Rng& rng, CrossoverTrace* trace) {
  const Tables& tb = *tables_;
  Workspace& w = *work_;
  const std::size_t n = tb.n;
  if (pa.arrangement().size() != n || pb.arrangement().size() != n) {
    throw DataError("parents do not match the tensor piece count");
  }
  const bool type2 = tb.type == PuzzleType::Type2;
  const Chromosome& fitter = pb.fitness() > pa.fitness() ? pb : pa;
  const Chromosome& weaker = &fitter == &pa ? pb : pa;

  // reset
  for (int cell : w.touched) {
    w.grid[static_cast<std::size_t>(cell)] = -1;
    w.in_frontier[static_cast<std::size_t>(cell)] = 0;
  }
  w.touched.clear();
  w.frontier.clear();
  w.unused.resize(n);
  std::iota(w.unused.begin(), w.unused.end(), 0);
  std::iota(w.unused_pos.begin(), w.unused_pos.end(), 0);
  std::fill(w.cursor.begin(), w.cursor.end(), 0);
  w.placed = 0;

  auto row_of = [&](int cell) { return cell / w.grid_cols; };
  auto col_of = [&](int cell) { return cell % w.grid_cols; };

  auto legal = [&](int cell) {
    const int r = row_of(cell), c = col_of(cell);
    const int h = std::max(w.max_r, r) - std::min(w.min_r, r) + 1;
    const int wd = std::max(w.max_c, c) - std::min(w.min_c, c) + 1;
    return h <= tb.max_rows && wd <= tb.max_cols_for_rows[static_cast<std::size_t>(h)];
  };

  auto place = [&](int piece, int cell, int orient) {
    w.grid[static_cast<std::size_t>(cell)] = piece;
    w.touched.push_back(cell);
    if (w.in_frontier[static_cast<std::size_t>(cell)]) {
      w.frontier.erase(cell);
      w.in_frontier[static_cast<std::size_t>(cell)] = 0;
    }
    w.cell_of[static_cast<std::size_t>(piece)] = cell;
    w.orientation[static_cast<std::size_t>(piece)] = orient;
    const int pos = w.unused_pos[static_cast<std::size_t>(piece)];
    const int last = w.unused.back();
    w.unused[static_cast<std::size_t>(pos)] = last;
    w.unused_pos[static_cast<std::size_t>(last)] = pos;
    w.unused.pop_back();
    w.unused_pos[static_cast<std::size_t>(piece)] = -1;
    const int r = row_of(cell), c = col_of(cell);
    if (w.placed == 0) {
      w.min_r = w.max_r = r;
      w.min_c = w.max_c = c;
    } else {
      w.min_r = std::min(w.min_r, r);
      w.max_r = std::max(w.max_r, r);
      w.min_c = std::min(w.min_c, c);
      w.max_c = std::max(w.max_c, c);
    }
    ++w.placed;
    for (int d = 0; d < 4; ++d) {
      const int nr = r + kRowStep[d], nc = c + kColStep[d];
      if (nr < 0 || nc < 0 || nr >= w.grid_rows || nc >= w.grid_cols) continue;
      const int ncell = nr * w.grid_cols + nc;
      if (w.grid[static_cast<std::size_t>(ncell)] >= 0 || w.in_frontier[static_cast<std::size_t>(ncell)]) continue;
      w.in_frontier[static_cast<std::size_t>(ncell)] = 1;
      w.touched.push_back(ncell);
      w.frontier.insert(ncell);
    }
  };

  auto is_unused = [&](int piece) { return w.unused_pos[static_cast<std::size_t>(piece)] >= 0; };

  struct Choice {
    int piece = -1;
    int cell = -1;
    int orientation = 0;
  };

  // Visits every free edge: kernel piece x whose edge e faces legal empty cell
  // `cell`; `dir` is the direction from the cell towards x. Stops when f returns true.
  auto for_each_free_edge = [&](auto&& f) {
    for (int cell : w.frontier) {
      if (!legal(cell)) continue;
      const int r = row_of(cell), c = col_of(cell);
      for (int d = 0; d < 4; ++d) {
        const int nr = r + kRowStep[d], nc = c + kColStep[d];
        if (nr < 0 || nc < 0 || nr >= w.grid_rows || nc >= w.grid_cols) continue;
        const int x = w.grid[static_cast<std::size_t>(nr * w.grid_cols + nc)];
        if (x < 0) continue;
        const Edge dir = edge_from(d);
        const Edge e = edge_facing(opposite(dir), w.orientation[static_cast<std::size_t>(x)]);
        if (f(x, e, cell, dir)) return;
      }
    }
  };

  // A candidate edge `ey` of y meeting the kernel from direction `dir`.
  auto orient_for = [](Edge dir, Edge ey) { return (index(dir) - index(ey)) & 3; };

  auto parent_phase = [&](const Chromosome& parent, Choice& out) {
    const double alpha = std::max(tb.alpha0, parent.mean_score());
    bool found = false;
    for_each_free_edge([&](int x, Edge e, int cell, Edge dir) {
      const EdgeRef nb = parent.neighbor(x, e);
      if (!nb.valid() || !is_unused(nb.piece)) return false;
      if (parent.piece_score(x) > alpha && parent.piece_score(nb.piece) > alpha) {
        out = {nb.piece, cell, orient_for(dir, nb.edge)};
        found = true;
      }
      return found;
    });
    return found;
  };

  auto agreement_phase = [&](Choice& out) {
    bool found = false;
    for_each_free_edge([&](int x, Edge e, int cell, Edge dir) {
      const EdgeRef na = pa.neighbor(x, e);
      if (na.valid() && is_unused(na.piece) && na == pb.neighbor(x, e)) {
        out = {na.piece, cell, orient_for(dir, na.edge)};
        found = true;
      }
      return found;
    });
    return found;
  };

  auto buddies_phase = [&](Choice& out) {
    bool found = false;
    for (const Chromosome* parent : {&fitter, &weaker}) {
      for_each_free_edge([&](int x, Edge e, int cell, Edge dir) {
        const EdgeRef nb = parent->neighbor(x, e);
        if (!nb.valid() || !is_unused(nb.piece)) return false;
        if (best(x, e) == nb && best(nb.piece, nb.edge) == EdgeRef{x, e}) {
          out = {nb.piece, cell, orient_for(dir, nb.edge)};
          found = true;
        }
        return found;
      });
      if (found) return true;
    }
    return false;
  };

  // Ranks only unused candidates. Rank 1 is the top score when a single
  // candidate holds it; rank 2 is the next lower score level when a single
  // candidate holds that. Ties leave the rank empty.
  auto available_rank = [&](int x, Edge e, bool use_second, EdgeRef& ref, float& score) {
    const std::size_t k = static_cast<std::size_t>(x) * 4 + static_cast<std::size_t>(index(e));
    const std::size_t base = k * tb.ranked_len;
    const std::size_t end = base + tb.ranked_len;
    std::size_t i = base + w.cursor[k];
    while (i < end && !is_unused(tb.ranked[i].piece)) ++i;
    w.cursor[k] = i - base;
    auto next_unused = [&](std::size_t j) {
      for (++j; j < end && !is_unused(tb.ranked[j].piece); ++j) {
      }
      return j;
    };
    if (i >= end) return false;
    std::size_t j = next_unused(i);
    // A lone candidate is not "most compatible" with anything; Phase 5 takes it.
    if (j >= end) return false;
    if (use_second) {
      const float top = tb.ranked_score[i];
      while (j < end && tb.ranked_score[j] == top) j = next_unused(j);
      if (j >= end) return false;
      i = j;
      j = next_unused(i);
    }
    if (j < end && tb.ranked_score[j] == tb.ranked_score[i]) return false;
    ref = tb.ranked[i];
    score = tb.ranked_score[i];
    return true;
  };

  auto ranked_phase = [&](bool use_second, Choice& out) {
    bool found = false;
    float best_score = 0.0f;
    EdgeRef best_ref;
    for_each_free_edge([&](int x, Edge e, int cell, Edge dir) {
      EdgeRef cand;
      float s = 0.0f;
      if (!available_rank(x, e, use_second, cand, s)) return false;
      const bool better = !found || s > best_score ||
                          (s == best_score && (cand.piece < best_ref.piece ||
                                               (cand.piece == best_ref.piece && index(cand.edge) < index(best_ref.edge))));
      if (better) {
        found = true;
        best_score = s;
        best_ref = cand;
        out = {cand.piece, cell, orient_for(dir, cand.edge)};
      }
      return false;
    });
    return found;
  };

  std::vector<int> legal_cells;
  auto random_phase = [&](Choice& out) {
    legal_cells.clear();
    for (int cell : w.frontier)
      if (legal(cell)) legal_cells.push_back(cell);
    if (legal_cells.empty() || w.unused.empty()) return false;
    const int piece = w.unused[static_cast<std::size_t>(rng.below(w.unused.size()))];
    const int cell = legal_cells[static_cast<std::size_t>(rng.below(legal_cells.size()))];
    out = {piece, cell, type2 ? static_cast<int>(rng.below(4)) : 0};
    return true;
  };

  // seed
  {
    const int seed_piece = static_cast<int>(rng.below(n));
    const int seed_orient = type2 ? static_cast<int>(rng.below(4)) : 0;
    place(seed_piece, (tb.max_rows - 1) * w.grid_cols + (tb.max_cols - 1), seed_orient);
  }

  while (w.placed < n) {
    const bool skip1 = rng.bernoulli(tb.skip_phase1_prob);
    const bool skip23 = rng.bernoulli(tb.skip_phase23_prob);
    Choice choice;
    std::optional<Phase> used;
    for (Phase ph : kPhaseOrder) {
      if (tb.disabled[static_cast<int>(ph)]) continue;
      bool ok = false;
      switch (ph) {
        case Phase::FitterParent: ok = !skip1 && parent_phase(fitter, choice); break;
        case Phase::WeakerParent: ok = !skip1 && parent_phase(weaker, choice); break;
        case Phase::Agreement: ok = !skip23 && agreement_phase(choice); break;
        case Phase::BestBuddies: ok = !skip23 && buddies_phase(choice); break;
        case Phase::MostCompatible: ok = ranked_phase(false, choice); break;
        case Phase::SecondCompatible: ok = ranked_phase(true, choice); break;
        case Phase::Random: ok = random_phase(choice); break;
      }
      if (ok) {
        used = ph;
        break;
      }
    }
    if (!used) throw DataError("crossover found no admissible placement");
    place(choice.piece, choice.cell, choice.orientation);
    if (trace) trace->add(*used);
  }

  const Dims dims{w.max_r - w.min_r + 1, w.max_c - w.min_c + 1};
  std::vector<Placement> cells(n);
  for (std::size_t p = 0; p < n; ++p) {
    const int cell = w.cell_of[p];
    cells[p] = {row_of(cell) - w.min_r, col_of(cell) - w.min_c, w.orientation[p]};
  }
  Arrangement child(dims, std::move(cells));
  if (!child.complete()) throw DataError("crossover produced an incomplete arrangement");
  return child;
}

Arrangement crossover(const Arrangement& a, const Arrangement& b, const CompatibilityTensor& t, const GaConfig& cfg,
                      Rng& rng, CrossoverTrace* trace) {
  Crossover op(t, allowed_shapes(t.size(), t.type(), cfg.dims_mode, a.dims()), cfg);
  return op(Chromosome(a, t), Chromosome(b, t), rng, trace);
}

// ---------------------------------------------------------------------------
// Evolution

namespace {

struct RunResult {
  Arrangement best;
  double best_fitness = 0.0;
  int generations = 0;
  std::vector<double> trace;
  PhaseCounts counts{};
};

std::size_t roulette(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

RunResult run_once(std::size_t n, PuzzleType type, const CompatibilityTensor& t, const GaConfig& cfg, Dims init_dims,
                   std::vector<Crossover>& crossers, std::uint64_t run_seed) {
  const std::size_t pop = static_cast<std::size_t>(cfg.population);
  std::vector<std::optional<Chromosome>> population(pop);
  parallel_for(pop, cfg.workers, [&](std::size_t i) {
    Rng rng(derive_seed({run_seed, 0, i}));
    population[i].emplace(random_arrangement(n, type, init_dims, rng), t);
  });

  auto best_index = [&]() {
    std::size_t b = 0;
    for (std::size_t i = 1; i < pop; ++i)
      if (population[i]->fitness() > population[b]->fitness()) b = i;
    return b;
  };

  RunResult res;
  double best = population[best_index()]->fitness();
  res.trace.push_back(best);
  int stall = 0;
  std::vector<std::size_t> order(pop);
  std::vector<double> cumulative(pop);
  std::vector<PhaseCounts> counts(pop);

  for (int gen = 1;; ++gen) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return population[a]->fitness() > population[b]->fitness();
    });
    double lo = population[order.back()]->fitness();
    double acc = 0.0;
    for (std::size_t i = 0; i < pop; ++i) {
      acc += population[i]->fitness() - lo + kRouletteFloor;
      cumulative[i] = acc;
    }

    std::vector<std::optional<Chromosome>> next(pop);
    const std::size_t elite = static_cast<std::size_t>(cfg.elitism);
    for (std::size_t i = 0; i < elite; ++i) next[i] = population[order[i]];
    parallel_for_indexed(pop - elite, cfg.workers, [&](std::size_t j, std::size_t worker) {
      const std::size_t k = elite + j;
      Rng rng(derive_seed({run_seed, static_cast<std::uint64_t>(gen), k}));
      const Chromosome& a = *population[roulette(cumulative, rng)];
      const Chromosome& b = *population[roulette(cumulative, rng)];
      CrossoverTrace trace;
      next[k].emplace(crossers[worker](a, b, rng, &trace), t);
      counts[k] = trace.counts;
    });
    population.swap(next);
    for (std::size_t k = elite; k < pop; ++k)
      for (int p = 0; p < kPhaseCount; ++p) res.counts[p] += counts[k][p];

    const double gen_best = population[best_index()]->fitness();
    if (gen_best > best) {
      best = gen_best;
      stall = 0;
    } else {
      ++stall;
    }
    res.trace.push_back(gen_best);
    res.generations = gen;
    if (stall >= cfg.stall_generations) break;
    if (cfg.max_generations > 0 && gen >= cfg.max_generations) break;
  }
  const std::size_t b = best_index();
  res.best = population[b]->arrangement();
  res.best_fitness = population[b]->fitness();
  return res;
}

}  // namespace

SolverReport evolve(const PuzzleBundle& bundle, const CompatibilityTensor& t, const GaConfig& cfg) {
  cfg.validate();
  const std::size_t n = bundle.size();
  if (n == 0) throw DataError("bundle has no pieces");
  if (t.size() != n) throw DataError("tensor covers " + std::to_string(t.size()) + " pieces, bundle has " + std::to_string(n));
  if (t.type() != bundle.type) throw DataError("tensor puzzle type does not match the bundle");

  const std::vector<Dims> shapes = allowed_shapes(n, bundle.type, cfg.dims_mode, bundle.known_dims);
  const Dims init_dims = cfg.dims_mode == DimsMode::Known ? *bundle.known_dims : most_square_dims(n);

  SolverReport report;
  if (n == 1) {
    report.best = Arrangement({1, 1}, {Placement{0, 0, 0}});
    report.fitness_trace = {0.0};
    report.restart_fitness = {0.0};
    return report;
  }

  const Crossover base(t, shapes, cfg);
  std::vector<Crossover> crossers(static_cast<std::size_t>(std::max(cfg.workers, 1)), base);
  for (int r = 0; r < cfg.restarts; ++r) {
    RunResult run = run_once(n, bundle.type, t, cfg, init_dims, crossers, derive_seed({cfg.seed, static_cast<std::uint64_t>(r)}));
    report.restart_fitness.push_back(run.best_fitness);
    for (int p = 0; p < kPhaseCount; ++p) report.phase_counts[p] += run.counts[p];
    if (r == 0 || run.best_fitness > report.best_fitness) {
      report.best = std::move(run.best);
      report.best_fitness = run.best_fitness;
      report.best_restart = r;
      report.generations = run.generations;
      report.fitness_trace = std::move(run.trace);
    }
  }
  return report;
}

}  // namespace pf
