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


#include <benchmark/benchmark.h>

#include <cmath>

#include "pf/compat.hpp"
#include "pf/dataset.hpp"
#include "pf/ga.hpp"
#include "pf/postprocess.hpp"
#include "pf/rng.hpp"

namespace {

pf::Image gradient_image(int w, int h) {
  pf::Image img(w, h, 3);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int k = 0; k < 3; ++k)
        img.at(r, c, k) = static_cast<std::uint8_t>(127.5 + 127.5 * std::sin(0.05 * (k + 1) * c + 0.03 * (3 - k) * r));
  return img;
}

pf::PuzzleBundle bench_bundle(int pieces_per_side, pf::PuzzleType type) {
  return pf::cut_and_scramble(gradient_image(28 * pieces_per_side, 28 * pieces_per_side), 28, type, 1).bundle;
}

void BM_FullTensor(benchmark::State& state) {
  const auto kind = static_cast<pf::MeasureKind>(state.range(1));
  const pf::PuzzleBundle b = bench_bundle(static_cast<int>(state.range(0)), pf::PuzzleType::Type1);
  for (auto _ : state) benchmark::DoNotOptimize(pf::full_tensor(kind, b, 0).values().data());
  state.SetLabel(pf::measure_name(kind));
}
BENCHMARK(BM_FullTensor)
    ->Args({8, static_cast<int>(pf::MeasureKind::SsdRgb)})
    ->Args({8, static_cast<int>(pf::MeasureKind::Mgc)})
    ->Args({12, static_cast<int>(pf::MeasureKind::Mgc)})
    ->Unit(benchmark::kMillisecond);

void BM_Crossover(benchmark::State& state) {
  const auto type = state.range(1) == 2 ? pf::PuzzleType::Type2 : pf::PuzzleType::Type1;
  const pf::PuzzleBundle b = bench_bundle(static_cast<int>(state.range(0)), type);
  const pf::CompatibilityTensor t = pf::postprocess(pf::full_tensor(pf::MeasureKind::SsdRgb, b, 0));
  pf::GaConfig cfg;
  const auto shapes = pf::allowed_shapes(b.size(), type, pf::DimsMode::Known, b.known_dims);
  pf::Crossover cx(t, shapes, cfg);
  pf::Rng rng(3);
  const pf::Chromosome p(pf::random_arrangement(b.size(), type, *b.known_dims, rng), t);
  const pf::Chromosome q(pf::random_arrangement(b.size(), type, *b.known_dims, rng), t);
  for (auto _ : state) benchmark::DoNotOptimize(cx(p, q, rng));
}
BENCHMARK(BM_Crossover)->Args({8, 1})->Args({12, 1})->Args({12, 2})->Unit(benchmark::kMicrosecond);

void BM_Fitness(benchmark::State& state) {
  const pf::PuzzleBundle b = bench_bundle(static_cast<int>(state.range(0)), pf::PuzzleType::Type2);
  const pf::CompatibilityTensor t = pf::postprocess(pf::full_tensor(pf::MeasureKind::SsdRgb, b, 0));
  pf::Rng rng(5);
  const pf::Arrangement a = pf::random_arrangement(b.size(), b.type, *b.known_dims, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pf::fitness(a, t));
}
BENCHMARK(BM_Fitness)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
