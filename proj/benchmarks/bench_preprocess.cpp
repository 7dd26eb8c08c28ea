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

#include "backorder/dataset.hpp"
#include "backorder/preprocess.hpp"

namespace backorder {
namespace {

void BM_smote(benchmark::State& state) {
  SyntheticOptions o;
  o.n_rows = static_cast<std::size_t>(state.range(0));
  o.positive_rate = 0.02;
  o.missing_rate = 0.0;
  const auto t = generate_synthetic(o);
  const auto rows = all_rows(t);
  for (auto _ : state) benchmark::DoNotOptimize(smote(t, rows, 5, 0.5, 4));
}
BENCHMARK(BM_smote)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_iterative_imputer(benchmark::State& state) {
  const auto t = generate_synthetic(20000, 0.01, 6, 5);
  const auto rows = all_rows(t);
  for (auto _ : state) benchmark::DoNotOptimize(fit_iterative_imputer(t, rows));
}
BENCHMARK(BM_iterative_imputer)->Unit(benchmark::kMillisecond);

void BM_quantile_transform(benchmark::State& state) {
  const auto t = generate_synthetic(20000, 0.01, 6, 6);
  const auto rows = all_rows(t);
  const auto cols = t.numeric_columns();
  for (auto _ : state) {
    const auto f = fit_transform(TransformKind::kQuantile, t, rows, cols);
    benchmark::DoNotOptimize(apply_transform(f, t));
  }
}
BENCHMARK(BM_quantile_transform)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace backorder
