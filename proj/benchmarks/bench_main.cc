/*
 * Copyright 2026 The XAL Workbench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "xal/al_engine.h"
#include "xal/explainer.h"
#include "xal/harness.h"
#include "xal/linear_model.h"

namespace {

const xal::Corpus& Adult() {
  static const xal::Corpus corpus =
      xal::Corpus::Load(XAL_BENCH_DATA, xal::DatasetDecl::AdultIncome(), 0);
  return corpus;
}

std::vector<xal::TrainingExample> Sample(std::size_t n) {
  const auto& pool = Adult().split->pool;
  std::mt19937_64 rng(n);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<xal::TrainingExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = pool[pick(rng)];
    out.push_back({e.id, e.x, e.y, 1.0});
  }
  return out;
}

void BM_Train(benchmark::State& state) {
  const auto examples = Sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(xal::Train(examples, {}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Train)->Arg(2)->Arg(22)->Arg(202)->Arg(2000);

void BM_SelectQuery(benchmark::State& state) {
  const auto& pool = Adult().split->pool;
  const xal::LinearModel model = xal::Train(Sample(200), {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(xal::SelectQuery(model, pool));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pool.size()));
}
BENCHMARK(BM_SelectQuery);

void BM_Explain(benchmark::State& state) {
  const auto& c = Adult();
  const xal::LinearModel model = xal::Train(Sample(200), {}, c.schema->Fingerprint());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xal::Explain(model, *c.schema, c.split->pool[i].x));
    i = (i + 1) % c.split->pool.size();
  }
}
BENCHMARK(BM_Explain);

void BM_SessionStep(benchmark::State& state) {
  const auto& c = Adult();
  const auto pair = xal::GenerateInitialPairs(*c.split, 1, {}, 3)[0];
  for (auto _ : state) {
    state.PauseTiming();
    xal::ALSession s(c.split, c.schema, {pair.first, pair.second}, {});
    state.ResumeTiming();
    for (int k = 0; k < 20; ++k) {
      const auto& q = s.IssueQuery(0.0);
      s.SubmitLabel(xal::PoolGroundTruth(*c.split, q.instance_id));
    }
  }
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_SessionStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
