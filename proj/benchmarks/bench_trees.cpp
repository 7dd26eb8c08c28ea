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
#include "backorder/tree_ensemble.hpp"

namespace backorder {
namespace {

struct Data {
  FeatureMatrix x;
  Labels y;
};

Data synthetic_matrix(std::size_t rows, double rate) {
  SyntheticOptions o;
  o.n_rows = rows;
  o.positive_rate = rate;
  o.missing_rate = 0.0;
  const auto t = generate_synthetic(o);
  const auto idx = all_rows(t);
  return {to_matrix(t, idx, t.feature_columns()), t.labels()};
}

void BM_fit_tree(benchmark::State& state) {
  const auto d = synthetic_matrix(static_cast<std::size_t>(state.range(0)), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(fit_tree(d.x, d.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_fit_tree)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_fit_balanced_bagging(benchmark::State& state) {
  const auto d = synthetic_matrix(20000, 0.01);
  EnsembleConfig c;
  c.n_estimators = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_balanced_bagging(d.x, d.y, c));
}
BENCHMARK(BM_fit_balanced_bagging)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ensemble_predict(benchmark::State& state) {
  const auto d = synthetic_matrix(20000, 0.01);
  EnsembleConfig c;
  c.n_estimators = 200;
  const auto model = fit_balanced_bagging(d.x, d.y, c);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_proba(d.x));
  state.SetItemsProcessed(state.iterations() * d.x.rows());
}
BENCHMARK(BM_ensemble_predict)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace backorder
