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


#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "generators.hpp"
#include "oracles.hpp"
#include "pf/compat.hpp"
#include "pf/error.hpp"
#include "pf/ga.hpp"
#include "pf/metrics.hpp"
#include "pf/postprocess.hpp"

namespace pf {
namespace {

using testing::Gen;

GaConfig quiet_config() {
  GaConfig cfg;
  cfg.skip_phase1_prob = 0.0;
  cfg.skip_phase23_prob = 0.0;
  return cfg;
}

TEST(Fitness, SingleBoundary) {
  CompatibilityTensor t(2, PuzzleType::Type1, 0.0f);
  t.at(0, index(Edge::Right), 1) = 0.75f;
  EXPECT_EQ(fitness(Arrangement({1, 2}, {{0, 0, 0}, {0, 1, 0}}), t), 0.75);
}

TEST(Fitness, AllOnesTwoByTwo) {
  Gen g(1);
  const CompatibilityTensor t(4, PuzzleType::Type2, 1.0f);
  EXPECT_EQ(fitness(testing::random_layout(g, {2, 2}, PuzzleType::Type2), t), 4.0);
}

TEST(Fitness, MatchesDoubleLoopOracle) {
  Gen g(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto type = trial % 2 ? PuzzleType::Type2 : PuzzleType::Type1;
    const Dims d{3, 3};
    const auto t = testing::random_tensor(g, 9, type);
    const Arrangement a = testing::random_layout(g, d, type);
    const double want = testing::naive_fitness(a, t);
    EXPECT_NEAR(fitness(a, t), want, 1e-9 * std::abs(want));
    EXPECT_NEAR(Chromosome(a, t).fitness(), want, 1e-9 * std::abs(want));
  }
}

TEST(Chromosome, PieceScoreAveragesExistingNeighbors) {
  CompatibilityTensor t(3, PuzzleType::Type1, 0.0f);
  t.at(0, index(Edge::Right), 1) = 0.4f;
  t.at(1, index(Edge::Right), 2) = 0.8f;
  const Chromosome c(Arrangement({1, 3}, {{0, 0, 0}, {0, 1, 0}, {0, 2, 0}}), t);
  EXPECT_FLOAT_EQ(static_cast<float>(c.piece_score(0)), 0.4f);
  EXPECT_FLOAT_EQ(static_cast<float>(c.piece_score(1)), 0.6f);
  EXPECT_FLOAT_EQ(static_cast<float>(c.piece_score(2)), 0.8f);
  EXPECT_FLOAT_EQ(static_cast<float>(c.mean_score()), 0.6f);
  EXPECT_EQ(c.neighbor(1, Edge::Left), (EdgeRef{0, Edge::Right}));
  EXPECT_FALSE(c.neighbor(0, Edge::Left).valid());
}

TEST(Config, ValidateRanges) {
  GaConfig c;
  EXPECT_NO_THROW(c.validate());
  c.population = 1;
  EXPECT_THROW(c.validate(), DataError);
  c = GaConfig{};
  c.alpha0 = 1.0;
  EXPECT_THROW(c.validate(), DataError);
  c = GaConfig{};
  c.skip_phase23_prob = 1.5;
  EXPECT_THROW(c.validate(), DataError);
}

TEST(Ablate, EssentialPhasesCannotBeDisabled) {
  for (Phase p : {Phase::MostCompatible, Phase::SecondCompatible, Phase::Random}) {
    const std::vector<Phase> off{p};
    EXPECT_THROW(ablate(GaConfig{}, off), DataError);
  }
  const std::vector<Phase> ok{Phase::FitterParent, Phase::Agreement};
  const GaConfig c = ablate(GaConfig{}, ok);
  EXPECT_FALSE(c.enabled(Phase::FitterParent));
  EXPECT_FALSE(c.enabled(Phase::Agreement));
  EXPECT_TRUE(c.enabled(Phase::WeakerParent));
}

TEST(Phase, LabelsRoundTrip) {
  for (int k = 0; k < kPhaseCount; ++k) EXPECT_EQ(parse_phase(phase_label(static_cast<Phase>(k))), static_cast<Phase>(k));
  EXPECT_FALSE(parse_phase("6").has_value());
}

TEST(Shapes, KnownUnknownAndMostSquare) {
  EXPECT_EQ(allowed_shapes(12, PuzzleType::Type1, DimsMode::Known, Dims{3, 4}), (std::vector<Dims>{{3, 4}}));
  EXPECT_EQ(allowed_shapes(12, PuzzleType::Type2, DimsMode::Known, Dims{3, 4}), (std::vector<Dims>{{3, 4}, {4, 3}}));
  const auto all = allowed_shapes(12, PuzzleType::Type1, DimsMode::Unknown, std::nullopt);
  EXPECT_EQ(all.size(), 6u);
  for (const Dims& d : all) EXPECT_EQ(d.area(), 12);
  EXPECT_EQ(most_square_dims(12), (Dims{3, 4}));
  EXPECT_EQ(most_square_dims(150), (Dims{10, 15}));
  EXPECT_EQ(most_square_dims(7), (Dims{1, 7}));
  EXPECT_THROW(allowed_shapes(12, PuzzleType::Type1, DimsMode::Known, std::nullopt), DataError);
}

TEST(Crossover, OffspringIsAlwaysCompleteAndAdmissible) {
  Gen g(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto type = trial % 2 ? PuzzleType::Type2 : PuzzleType::Type1;
    const auto mode = trial % 3 == 0 ? DimsMode::Unknown : DimsMode::Known;
    const Dims d{testing::uniform_int(g, 1, 4), testing::uniform_int(g, 2, 5)};
    const auto n = static_cast<std::size_t>(d.area());
    const auto t = testing::random_tensor(g, n, type);
    GaConfig cfg;
    cfg.dims_mode = mode;
    const auto shapes = allowed_shapes(n, type, mode, d);
    Crossover op(t, shapes, cfg);
    Rng rng(static_cast<std::uint64_t>(trial));
    const Chromosome pa(random_arrangement(n, type, d, rng), t), pb(random_arrangement(n, type, d, rng), t);
    for (int k = 0; k < 10; ++k) {
      const Arrangement child = op(pa, pb, rng);
      ASSERT_TRUE(child.complete());
      ASSERT_NE(std::find(shapes.begin(), shapes.end(), child.dims()), shapes.end());
      if (type == PuzzleType::Type1)
        for (const Placement& p : child.cells()) ASSERT_EQ(p.orientation, 0);
    }
  }
}

TEST(Crossover, IdenticalParentsWithOracleReproduceParent) {
  Gen g(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = testing::smooth_bundle(g, {3, 4}, 4, PuzzleType::Type1, static_cast<std::uint64_t>(trial));
    const auto t = oracle_tensor(m.bundle);
    const Arrangement truth = Arrangement::from_ground_truth(*m.bundle.ground_truth);
    Rng rng(static_cast<std::uint64_t>(trial));
    for (int k = 0; k < 5; ++k) EXPECT_EQ(crossover(truth, truth, t, GaConfig{}, rng), truth);
  }
}

TEST(Crossover, IdenticalType2ParentsReproduceParentUpToRotation) {
  Gen g(5);
  const auto m = testing::smooth_bundle(g, {3, 3}, 4, PuzzleType::Type2, 5);
  const auto t = oracle_tensor(m.bundle);
  const GroundTruth& gt = *m.bundle.ground_truth;
  const Arrangement truth = Arrangement::from_ground_truth(gt);
  Rng rng(5);
  for (int k = 0; k < 10; ++k)
    EXPECT_EQ(neighbor_accuracy(crossover(truth, truth, t, GaConfig{}, rng), gt, PuzzleType::Type2), 1.0);
}

TEST(Crossover, PhaseOrderOnAgreeingParents) {
  Gen g(6);
  const auto m = testing::smooth_bundle(g, {3, 3}, 4, PuzzleType::Type1, 6);
  const GroundTruth& gt = *m.bundle.ground_truth;
  const Arrangement truth = Arrangement::from_ground_truth(gt);
  const auto shapes = allowed_shapes(9, PuzzleType::Type1, DimsMode::Known, Dims{3, 3});
  Rng rng(6);
  {
    // Every piece scores exactly the mean, so nothing exceeds the threshold
    // and agreement takes over.
    const auto t = oracle_tensor(m.bundle);
    CrossoverTrace trace;
    Crossover(t, shapes, quiet_config())(Chromosome(truth, t), Chromosome(truth, t), rng, &trace);
    EXPECT_EQ(trace.counts[static_cast<int>(Phase::FitterParent)], 0u);
    EXPECT_EQ(trace.counts[static_cast<int>(Phase::Agreement)], 8u);
  }
  // True boundaries score in [0.9, 1]; the rest 0. Pieces above the mean go through Phase 1.1.
  CompatibilityTensor t(9, PuzzleType::Type1, 0.0f);
  for (const Adjacency& adj : adjacent_pairs(truth)) {
    t.at(adj.a, index(adj.ea), adj.b) = 0.9f + 0.1f * static_cast<float>(testing::uniform_int(g, 0, 100)) / 100.0f;
    t.at(adj.b, index(adj.eb), adj.a) = 0.9f + 0.1f * static_cast<float>(testing::uniform_int(g, 0, 100)) / 100.0f;
  }
  GaConfig cfg = quiet_config();
  cfg.alpha0 = 0.5;
  std::uint64_t p1 = 0;
  for (int k = 0; k < 20; ++k) {
    CrossoverTrace trace;
    const Arrangement child = Crossover(t, shapes, cfg)(Chromosome(truth, t), Chromosome(truth, t), rng, &trace);
    EXPECT_EQ(child, truth);
    EXPECT_EQ(trace.counts[static_cast<int>(Phase::Random)], 0u);
    p1 += trace.counts[static_cast<int>(Phase::FitterParent)];
  }
  EXPECT_GT(p1, 0u);
  const std::vector<Phase> off{Phase::FitterParent, Phase::WeakerParent};
  CrossoverTrace trace;
  Crossover(t, shapes, ablate(cfg, off))(Chromosome(truth, t), Chromosome(truth, t), rng, &trace);
  EXPECT_EQ(trace.counts[static_cast<int>(Phase::Agreement)], 8u);
}

TEST(Crossover, ConstantTensorWithFullSkipsUsesOnlyRandomPhase) {
  const CompatibilityTensor t(12, PuzzleType::Type1, 0.5f);
  GaConfig cfg;
  cfg.skip_phase1_prob = 1.0;
  cfg.skip_phase23_prob = 1.0;
  const Dims d{3, 4};
  Crossover op(t, allowed_shapes(12, PuzzleType::Type1, DimsMode::Known, d), cfg);
  Rng rng(7);
  CrossoverTrace trace;
  const Chromosome pa(random_arrangement(12, PuzzleType::Type1, d, rng), t);
  const Chromosome pb(random_arrangement(12, PuzzleType::Type1, d, rng), t);
  std::set<std::vector<int>> distinct;
  for (int run = 0; run < 1000; ++run) {
    const Arrangement child = op(pa, pb, rng, &trace);
    ASSERT_TRUE(child.complete());
    std::vector<int> key;
    for (const Placement& pl : child.cells()) key.push_back(pl.row * 4 + pl.col);
    distinct.insert(key);
  }
  for (int k = 0; k < kPhaseCount; ++k) {
    if (static_cast<Phase>(k) == Phase::Random) continue;
    EXPECT_EQ(trace.counts[k], 0u) << phase_label(static_cast<Phase>(k));
  }
  EXPECT_EQ(trace.counts[static_cast<int>(Phase::Random)], 1000u * 11u);
  EXPECT_GT(distinct.size(), 900u);
}

TEST(Crossover, DistinctScoresLeaveOnlyTheLoneLastPieceToChance) {
  // With no ties among candidates a unique best unused piece exists whenever there are two.
  Gen g(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto type = trial % 2 ? PuzzleType::Type2 : PuzzleType::Type1;
    const Dims d{4, 4};
    CompatibilityTensor t(16, type);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (float& v : t.values()) v = u(g);
    GaConfig cfg;
    cfg.skip_phase1_prob = 1.0;
    cfg.skip_phase23_prob = 1.0;
    Crossover op(t, allowed_shapes(16, type, DimsMode::Known, d), cfg);
    Rng rng(static_cast<std::uint64_t>(trial));
    const Chromosome pa(random_arrangement(16, type, d, rng), t), pb(random_arrangement(16, type, d, rng), t);
    CrossoverTrace trace;
    op(pa, pb, rng, &trace);
    // Type-1 ends with one unused piece and nothing to compare it with.
    const std::uint64_t last = type == PuzzleType::Type1 ? 1u : 0u;
    EXPECT_EQ(trace.counts[static_cast<int>(Phase::Random)], last);
    EXPECT_EQ(trace.counts[static_cast<int>(Phase::MostCompatible)], 15u - last);
  }
}

TEST(Crossover, StrictRankTables) {
  CompatibilityTensor t(4, PuzzleType::Type1, 0.0f);
  const int R = index(Edge::Right);
  t.at(0, R, 1) = 0.5f;
  t.at(0, R, 2) = 0.9f;
  t.at(0, R, 3) = 0.2f;
  t.at(1, R, 2) = 0.7f;
  t.at(1, R, 3) = 0.7f;
  t.at(2, R, 0) = 0.8f;
  t.at(2, R, 1) = 0.6f;
  t.at(2, R, 3) = 0.6f;
  Crossover op(t, allowed_shapes(4, PuzzleType::Type1, DimsMode::Known, Dims{1, 4}), GaConfig{});
  EXPECT_EQ(op.best(0, Edge::Right), (EdgeRef{2, Edge::Left}));
  EXPECT_EQ(op.second(0, Edge::Right), (EdgeRef{1, Edge::Left}));
  EXPECT_FALSE(op.best(1, Edge::Right).valid());   // tie at the top
  EXPECT_FALSE(op.second(1, Edge::Right).valid());
  EXPECT_EQ(op.best(2, Edge::Right), (EdgeRef{0, Edge::Left}));
  EXPECT_FALSE(op.second(2, Edge::Right).valid());  // tie in second place
}

TEST(Crossover, BestBuddiesPlaceMutualFavorites) {
  // Pieces b=0 and g=1 are each other's favorite across b's right edge; the
  // parent holds them side by side; phases before 3 are switched off.
  CompatibilityTensor t(3, PuzzleType::Type1, 0.1f);
  const int R = index(Edge::Right), L = index(Edge::Left);
  t.at(0, R, 1) = 0.9f;
  t.at(1, L, 0) = 0.9f;
  t.at(0, R, 2) = 0.3f;
  t.at(2, L, 1) = 0.2f;
  t.at(1, R, 2) = 0.6f;
  t.at(2, L, 0) = 0.4f;
  const std::vector<Phase> off{Phase::FitterParent, Phase::WeakerParent, Phase::Agreement};
  const GaConfig cfg = ablate(quiet_config(), off);
  Crossover op(t, allowed_shapes(3, PuzzleType::Type1, DimsMode::Known, Dims{1, 3}), cfg);
  const Arrangement left({1, 3}, {{0, 0, 0}, {0, 1, 0}, {0, 2, 0}});
  const Arrangement right({1, 3}, {{0, 2, 0}, {0, 0, 0}, {0, 1, 0}});
  Rng rng(10);
  int buddy_steps = 0;
  for (int k = 0; k < 50; ++k) {
    CrossoverTrace trace;
    trace.record_steps = true;
    const Arrangement child = op(Chromosome(left, t), Chromosome(right, t), rng, &trace);
    const Placement& b = child.placement(0);
    const Placement& gp = child.placement(1);
    const auto steps = trace.counts[static_cast<int>(Phase::BestBuddies)];
    // The only mutual pair is (0 right, 1 left); a seed at piece 2 can leave no room for it.
    if (steps > 0) EXPECT_EQ(b.col + 1, gp.col);
    buddy_steps += static_cast<int>(steps);
  }
  EXPECT_GT(buddy_steps, 0);
}

TEST(Crossover, DisabledPhasesNeverFire) {
  Gen g(11);
  const auto m = testing::smooth_bundle(g, {4, 5}, 6, PuzzleType::Type1, 11);
  const auto t = postprocess(full_tensor(MeasureKind::SsdRgb, m.bundle, 0));
  GaConfig cfg;
  cfg.population = 20;
  cfg.stall_generations = 5;
  cfg.seed = 3;
  const std::vector<Phase> off{Phase::FitterParent, Phase::WeakerParent};
  const SolverReport r = evolve(m.bundle, t, ablate(cfg, off));
  EXPECT_EQ(r.phase_counts[static_cast<int>(Phase::FitterParent)], 0u);
  EXPECT_EQ(r.phase_counts[static_cast<int>(Phase::WeakerParent)], 0u);
  const std::vector<Phase> none;
  const SolverReport a = evolve(m.bundle, t, cfg), b = evolve(m.bundle, t, ablate(cfg, none));
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.fitness_trace, b.fitness_trace);
  EXPECT_EQ(a.phase_counts, b.phase_counts);
}

TEST(Evolve, OracleFourByThreeType1) {
  Gen g(12);
  const auto m = testing::smooth_bundle(g, {4, 3}, 4, PuzzleType::Type1, 12);
  GaConfig cfg;
  cfg.seed = 12;
  const SolverReport r = evolve(m.bundle, oracle_tensor(m.bundle), cfg);
  EXPECT_EQ(neighbor_accuracy(r.best, *m.bundle.ground_truth, PuzzleType::Type1), 1.0);
  EXPECT_EQ(r.best.dims(), (Dims{4, 3}));
  EXPECT_DOUBLE_EQ(r.best_fitness, 17.0);
}

TEST(Evolve, OracleFiveByFourType2UnknownDims) {
  Gen g(13);
  const auto m = testing::smooth_bundle(g, {5, 4}, 4, PuzzleType::Type2, 13);
  GaConfig cfg;
  cfg.seed = 13;
  cfg.dims_mode = DimsMode::Unknown;
  const SolverReport r = evolve(m.bundle, oracle_tensor(m.bundle), cfg);
  EXPECT_EQ(neighbor_accuracy(r.best, *m.bundle.ground_truth, PuzzleType::Type2), 1.0);
  EXPECT_EQ(r.best.dims().area(), 20);
}

TEST(Evolve, EliteKeepsBestFitnessMonotone) {
  Gen g(14);
  const auto m = testing::smooth_bundle(g, {4, 4}, 6, PuzzleType::Type2, 14);
  GaConfig cfg;
  cfg.population = 30;
  cfg.stall_generations = 8;
  cfg.restarts = 2;
  const SolverReport r = evolve(m.bundle, postprocess(full_tensor(MeasureKind::Mgc, m.bundle, 0)), cfg);
  for (std::size_t i = 1; i < r.fitness_trace.size(); ++i) EXPECT_GE(r.fitness_trace[i], r.fitness_trace[i - 1]);
  EXPECT_EQ(r.fitness_trace.size(), static_cast<std::size_t>(r.generations) + 1);
  EXPECT_EQ(r.restart_fitness.size(), 2u);
  EXPECT_EQ(r.best_fitness, *std::max_element(r.restart_fitness.begin(), r.restart_fitness.end()));
  EXPECT_NEAR(fitness(r.best, postprocess(full_tensor(MeasureKind::Mgc, m.bundle, 0))), r.best_fitness, 1e-9);
}

TEST(Evolve, SameSeedSameReportAcrossWorkerCounts) {
  Gen g(15);
  const auto m = testing::smooth_bundle(g, {4, 5}, 6, PuzzleType::Type2, 15);
  const auto t = postprocess(full_tensor(MeasureKind::SsdRgb, m.bundle, 0));
  GaConfig cfg;
  cfg.population = 24;
  cfg.stall_generations = 6;
  cfg.seed = 99;
  const SolverReport one = evolve(m.bundle, t, cfg);
  cfg.workers = 3;
  const SolverReport three = evolve(m.bundle, t, cfg);
  EXPECT_EQ(one.best, three.best);
  EXPECT_EQ(one.fitness_trace, three.fitness_trace);
  EXPECT_EQ(one.phase_counts, three.phase_counts);
  cfg.seed = 100;
  EXPECT_NE(evolve(m.bundle, t, cfg).phase_counts, one.phase_counts);
}

TEST(Evolve, MaxGenerationsCapsTheRun) {
  Gen g(16);
  const auto m = testing::smooth_bundle(g, {3, 3}, 6, PuzzleType::Type1, 16);
  GaConfig cfg;
  cfg.population = 10;
  cfg.max_generations = 3;
  const SolverReport r = evolve(m.bundle, postprocess(full_tensor(MeasureKind::SsdRgb, m.bundle, 0)), cfg);
  EXPECT_LE(r.generations, 3);
}

TEST(Evolve, RejectsMismatchedTensor) {
  Gen g(17);
  const auto m = testing::smooth_bundle(g, {2, 2}, 4, PuzzleType::Type1, 17);
  EXPECT_THROW(evolve(m.bundle, CompatibilityTensor(5, PuzzleType::Type1), GaConfig{}), DataError);
  EXPECT_THROW(evolve(m.bundle, CompatibilityTensor(4, PuzzleType::Type2), GaConfig{}), DataError);
}

TEST(Evolve, SinglePiece) {
  Gen g(18);
  const auto m = testing::smooth_bundle(g, {1, 1}, 4, PuzzleType::Type1, 18);
  const SolverReport r = evolve(m.bundle, oracle_tensor(m.bundle), GaConfig{});
  EXPECT_TRUE(r.best.complete());
}

}  // namespace
}  // namespace pf
