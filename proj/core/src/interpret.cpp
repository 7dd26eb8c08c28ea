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

#include "backorder/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "backorder/error.hpp"
#include "backorder/evaluate.hpp"
#include "backorder/parallel.hpp"
#include "backorder/random.hpp"

namespace backorder {
namespace {

double score(ImportanceMetric metric, std::span<const std::uint8_t> y,
             std::span<const double> p) {
  return metric == ImportanceMetric::kRocAuc ? roc_auc(y, p) : pr_auc(y, p);
}

}  // namespace

std::string to_string(ImportanceMetric metric) {
  return metric == ImportanceMetric::kRocAuc ? "roc_auc" : "pr_auc";
}

ImportanceMetric parse_importance_metric(const std::string& name) {
  if (name == "roc_auc") return ImportanceMetric::kRocAuc;
  if (name == "pr_auc") return ImportanceMetric::kPrAuc;
  throw ArgumentError("unknown importance metric '" + name + "' (expected roc_auc or pr_auc)");
}

std::vector<FeatureImportance> ImportanceReport::ranked() const {
  auto out = features;
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.mean_drop > b.mean_drop;
  });
  return out;
}

ImportanceReport permutation_importance(const Classifier& model, const FeatureMatrix& x,
                                        std::span<const std::uint8_t> y,
                                        std::span<const std::string> feature_names,
                                        const ImportanceOptions& options) {
  if (options.repeats < 1) throw ArgumentError("permutation importance needs repeats >= 1");
  if (static_cast<std::size_t>(x.cols()) != model.n_features()) {
    throw ArgumentError("evaluation matrix has " + std::to_string(x.cols()) +
                        " columns but the model expects " + std::to_string(model.n_features()));
  }
  if (feature_names.size() != static_cast<std::size_t>(x.cols())) {
    throw ArgumentError("one feature name per column is required");
  }
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ArgumentError("evaluation rows and labels differ in length");
  }

  std::vector<std::size_t> selected;
  if (options.features.empty()) {
    selected.resize(feature_names.size());
    std::iota(selected.begin(), selected.end(), 0);
  } else {
    for (const auto& name : options.features) {
      const auto it = std::find(feature_names.begin(), feature_names.end(), name);
      if (it == feature_names.end()) {
        throw ArgumentError("feature '" + name + "' is not in the model's input space");
      }
      selected.push_back(static_cast<std::size_t>(it - feature_names.begin()));
    }
  }

  ImportanceReport report;
  report.metric = options.metric;
  report.repeats = options.repeats;
  report.seed = options.seed;
  report.baseline = score(options.metric, y, model.predict_proba(x));
  report.features.resize(selected.size());
  for (std::size_t f = 0; f < selected.size(); ++f) {
    report.features[f].feature = feature_names[selected[f]];
    report.features[f].index = selected[f];
    report.features[f].drops.assign(options.repeats, 0.0);
  }

  const auto n = static_cast<std::size_t>(x.rows());
  parallel_for(selected.size() * options.repeats, options.threads, [&](std::size_t task) {
    const std::size_t f = task / options.repeats;
    const std::size_t r = task % options.repeats;
    const auto col = static_cast<Eigen::Index>(selected[f]);
    Rng rng(derive_seed(derive_seed(options.seed, selected[f]), r));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    FeatureMatrix shuffled = x;
    for (std::size_t i = 0; i < n; ++i) {
      shuffled(static_cast<Eigen::Index>(i), col) = x(static_cast<Eigen::Index>(perm[i]), col);
    }
    report.features[f].drops[r] =
        report.baseline - score(options.metric, y, model.predict_proba(shuffled));
  });

  for (auto& fi : report.features) {
    double sum = 0.0;
    for (double d : fi.drops) sum += d;
    fi.mean_drop = sum / static_cast<double>(fi.drops.size());
    if (fi.drops.size() >= 2) {
      double ss = 0.0;
      for (double d : fi.drops) ss += (d - fi.mean_drop) * (d - fi.mean_drop);
      fi.std_dev = std::sqrt(ss / static_cast<double>(fi.drops.size() - 1));
    }
  }
  return report;
}

}  // namespace backorder
