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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pf/model.hpp"
#include "pf/rng.hpp"

namespace pf {

/// Crossover phases in scan order.
enum class Phase : std::uint8_t {
  FitterParent = 0,  // 1.1  neighbor from the fitter parent, both pieces above alpha
  WeakerParent,      // 1.2  same with the less fit parent
  Agreement,         // 2    both parents agree on the neighbor
  BestBuddies,       // 3    a parent's neighbor that is also a best buddy
  MostCompatible,    // 4.1  most compatible unused piece for a free edge
  SecondCompatible,  // 4.2  runner-up level among unused pieces
  Random,            // 5    random unused piece at a random free cell
};
inline constexpr int kPhaseCount = 7;

/// "1.1", "1.2", "2", "3", "4.1", "4.2", "5"
const char* phase_label(Phase p) noexcept;
std::optional<Phase> parse_phase(std::string_view label);

using PhaseCounts = std::array<std::uint64_t, kPhaseCount>;

enum class DimsMode { Known, Unknown };

struct GaConfig {
  int population = 100;
  int elitism = 1;
  int stall_generations = 50;
  double alpha0 = 0.8;
  double skip_phase1_prob = 0.10;
  double skip_phase23_prob = 0.20;
  int restarts = 1;
  std::uint64_t seed = 0;
  DimsMode dims_mode = DimsMode::Known;
  int max_generations = 0;  // 0: stop on stall only
  int workers = 1;
  std::array<bool, kPhaseCount> disabled{};

  bool enabled(Phase p) const noexcept { return !disabled[static_cast<int>(p)]; }
  /// Throws DataError on out of range values.
  void validate() const;
};

/// Copy of `cfg` whose crossover never runs the listed phases. Phases 4.x and
/// 5 are required; asking to disable them throws DataError.
GaConfig ablate(const GaConfig& cfg, std::span<const Phase> disabled);

/// Sum of the tensor score over every internal boundary of a complete arrangement.
double fitness(const Arrangement& a, const CompatibilityTensor& t);

/// Final grid shapes a kernel may grow into. Known mode: the given dims (and
/// their transpose for Type-2). Unknown mode: every rows x cols with area n.
std::vector<Dims> allowed_shapes(std::size_t n, PuzzleType type, DimsMode mode, std::optional<Dims> known);

/// Most square rows x cols with area n, rows <= cols.
Dims most_square_dims(std::size_t n);

/// Uniform random permutation packed into dims; random orientations for Type-2.
Arrangement random_arrangement(std::size_t n, PuzzleType type, Dims dims, Rng& rng);

/// A piece's own edge.
struct EdgeRef {
  int piece = -1;
  Edge edge = Edge::Top;

  bool valid() const noexcept { return piece >= 0; }
  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

/// Arrangement plus the per-piece views crossover needs.
class Chromosome {
 public:
  Chromosome(Arrangement a, const CompatibilityTensor& t);

  const Arrangement& arrangement() const noexcept { return arrangement_; }
  double fitness() const noexcept { return fitness_; }
  /// fitness / boundary count
  double mean_score() const noexcept { return mean_score_; }
  /// Average score over the piece's placed neighbors (0 with no neighbors).
  double piece_score(int piece) const noexcept { return piece_score_[static_cast<std::size_t>(piece)]; }
  /// What touches edge `e` of `piece` in this chromosome.
  EdgeRef neighbor(int piece, Edge e) const noexcept {
    return neighbors_[static_cast<std::size_t>(piece) * 4 + static_cast<std::size_t>(index(e))];
  }

 private:
  Arrangement arrangement_;
  double fitness_ = 0.0;
  double mean_score_ = 0.0;
  std::vector<double> piece_score_;
  std::vector<EdgeRef> neighbors_;
};

struct CrossoverTrace {
  PhaseCounts counts{};
  bool record_steps = false;
  std::vector<Phase> steps;  // one entry per placement after the seed

  void add(Phase p) {
    ++counts[static_cast<int>(p)];
    if (record_steps) steps.push_back(p);
  }
};

/// Kernel-growing crossover. Grows an offspring from one random seed piece,
/// taking at every step the first phase (in Phase order) that yields a
/// placement. Not thread safe; copies share the read-only tables.
class Crossover {
 public:
  Crossover(const CompatibilityTensor& t, std::vector<Dims> shapes, const GaConfig& cfg);
  Crossover(const Crossover& other);
  Crossover& operator=(const Crossover& other);
  Crossover(Crossover&&) noexcept;
  Crossover& operator=(Crossover&&) noexcept;
  ~Crossover();

  Arrangement operator()(const Chromosome& a, const Chromosome& b, Rng& rng, CrossoverTrace* trace = nullptr);

  /// Strictly top-ranked candidate for an edge, if one exists.
  EdgeRef best(int piece, Edge e) const noexcept;
  /// Strictly second-ranked candidate (top-2 and top-3 scores both strict).
  EdgeRef second(int piece, Edge e) const noexcept;

 private:
  struct Tables;
  struct Workspace;
  std::shared_ptr<const Tables> tables_;
  std::unique_ptr<Workspace> work_;
};

/// Convenience wrapper building the tables for one call. Shapes follow
/// cfg.dims_mode with parent a's dims as the known dims.
Arrangement crossover(const Arrangement& a, const Arrangement& b, const CompatibilityTensor& t, const GaConfig& cfg,
                      Rng& rng, CrossoverTrace* trace = nullptr);

struct SolverReport {
  Arrangement best;
  double best_fitness = 0.0;
  int best_restart = 0;
  int generations = 0;                  // of the best restart
  std::vector<double> fitness_trace;    // best fitness per generation of the best restart, initial population first
  std::vector<double> restart_fitness;  // best fitness of every restart
  PhaseCounts phase_counts{};           // over all restarts
};

/// Runs cfg.restarts independent GA runs and returns the best. Throws
/// DataError when the tensor does not match the bundle or known dims are
/// requested but absent.
SolverReport evolve(const PuzzleBundle& bundle, const CompatibilityTensor& t, const GaConfig& cfg);

}  // namespace pf
