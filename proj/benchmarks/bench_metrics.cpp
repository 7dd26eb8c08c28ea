/*
 * Copyright 2026 The Backorder Authors.
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

#include <benchmark/benchmark.h>

#include <vector>

#include "backorder/dataset.hpp"
#include "backorder/evaluate.hpp"
#include "backorder/random.hpp"
#include "backorder/stats.hpp"

namespace backorder {
namespace {

void BM_roc_auc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  Labels y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.05);
    s[i] = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(y, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_roc_auc)->Arg(1000)->Arg(100000);

void BM_pr_auc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  Labels y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.05);
    s[i] = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(pr_auc(y, s));
}
BENCHMARK(BM_pr_auc)->Arg(100000);

void BM_spearman_matrix(benchmark::State& state) {
  const auto t = generate_synthetic(static_cast<std::size_t>(state.range(0)), 0.01, 6, 3);
  const auto cols = t.numeric_columns();
  for (auto _ : state) benchmark::DoNotOptimize(spearman_matrix(t, cols));
}
BENCHMARK(BM_spearman_matrix)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace backorder
