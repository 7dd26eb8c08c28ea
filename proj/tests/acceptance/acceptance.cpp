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

// Acceptance suite: one PASS / FAIL / SKIP line per criterion. Exits nonzero
// when any criterion fails.

#include <algorithm>
#include <array>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "backorder/dataset.hpp"
#include "backorder/economics.hpp"
#include "backorder/evaluate.hpp"
#include "backorder/interpret.hpp"
#include "backorder/neural.hpp"
#include "backorder/pipeline.hpp"
#include "backorder/preprocess.hpp"
#include "backorder/random.hpp"
#include "backorder/stats.hpp"
#include "backorder/tree_ensemble.hpp"
#include "oracles.hpp"

namespace backorder {
namespace {

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome = Outcome::kPass;
  std::string detail;
};

Verdict pass(std::string detail) { return {Outcome::kPass, std::move(detail)}; }
Verdict fail(std::string detail) { return {Outcome::kFail, std::move(detail)}; }
Verdict check(bool ok, std::string detail) {
  return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)};
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- metrics -----------------------------------------------------------------

Verdict metric_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240501);
  double worst_roc = 0.0, worst_pr = 0.0;
  std::size_t count_mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.index(299);
    const double rate = rng.uniform(0.02, 0.7);
    const double levels = 2.0 + static_cast<double>(rng.index(60));
    std::vector<std::uint8_t> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(rate);
      s[i] = std::floor(rng.uniform() * levels) / levels;
    }
    y[0] = 1;
    y[1] = 0;
    worst_roc = std::max(worst_roc, std::abs(roc_auc(y, s) - oracle::pairwise_auc(y, s)));
    worst_pr = std::max(worst_pr, std::abs(pr_auc(y, s) - oracle::threshold_sweep_ap(y, s)));

    const double thr = rng.uniform();
    const auto cm = confusion(y, s, thr);
    const auto t = oracle::tally(y, s, thr);
    const auto m = count_metrics(cm);
    const bool same = cm.tp == t.tp && cm.fp == t.fp && cm.fn == t.fn && cm.tn == t.tn &&
                      m.precision == oracle::precision(t) && m.recall == oracle::recall(t) &&
                      m.macro_f1 == oracle::macro_f1(t) && m.mcc == oracle::mcc(t);
    count_mismatches += same ? 0 : 1;
  }
  const double elapsed = seconds_since(t0);
  return check(worst_roc <= 1e-12 && worst_pr <= 1e-12 && count_mismatches == 0 && elapsed < 10.0,
               fmt("500 instances, max |roc diff| %.2e, max |pr diff| %.2e, "
                   "count mismatches %zu, %.2f s",
                   worst_roc, worst_pr, count_mismatches, elapsed));
}

Verdict brier_constant() {
  Rng rng(7);
  std::size_t off = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> y(1 + rng.index(5000));
    for (auto& v : y) v = rng.bernoulli(rng.uniform());
    off += brier_score(y, std::vector<double>(y.size(), 0.5)) == 0.25 ? 0 : 1;
  }
  return check(off == 0, fmt("constant 0.5 on 200 label vectors, %zu not exactly 0.25", off));
}

// --- statistics --------------------------------------------------------------

Verdict statistical_oracles() {
  Rng rng(8);
  double worst = 0.0;
  std::size_t u_mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n1 = 1 + rng.index(8), n2 = 1 + rng.index(8);
    std::vector<double> pool(n1 + n2);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<double>(i) + rng.uniform();
    rng.shuffle(std::span<double>(pool));
    const std::vector<double> x(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n1));
    const std::vector<double> y(pool.begin() + static_cast<std::ptrdiff_t>(n1), pool.end());
    const auto r = mann_whitney_u(x, y, MannWhitneyMode::kExact);
    const double u = oracle::pair_count_u(x, y);
    u_mismatches += r.statistic == u ? 0 : 1;
    worst = std::max(worst, std::abs(r.p_value - oracle::exact_mann_whitney_p(n1, n2, u)));
  }
  std::vector<std::uint8_t> even_a(40), even_b(40), diag_a(40), diag_b(40);
  for (std::size_t i = 0; i < 40; ++i) {
    // [[10,10],[10,10]]
    even_a[i] = i < 20;
    even_b[i] = (i % 20) < 10;
    // [[20,0],[0,20]]
    diag_a[i] = i < 20;
    diag_b[i] = i < 20;
  }
  const double even = chi_square(even_a, even_b).statistic;
  const double diag = chi_square(diag_a, diag_b).statistic;
  return check(u_mismatches == 0 && worst <= 1e-12 && even == 0.0 && diag == 40.0,
               fmt("200 cases n<=8: U mismatches %zu, max |p diff| %.2e; chi-square %.17g and %.17g",
                   u_mismatches, worst, even, diag));
}

// --- neural ------------------------------------------------------------------

// Nonzero biases so every parameter gets a gradient.
void jitter(DenseLayer& l, Rng& rng) {
  for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases(i) = 0.1 * rng.normal();
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Verdict gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(9);
  double worst_vae = 0.0, worst_mlp = 0.0;
  for (int net = 0; net < 20; ++net) {
    const std::size_t in = 2 + rng.index(5), latent = 1 + rng.index(3), hidden = 2 + rng.index(6);
    auto m = make_vae(in, latent, hidden, rng.next_u64());
    for (auto& l : m.trunk.layers) jitter(l, rng);
    for (auto& l : m.decoder.layers) jitter(l, rng);
    jitter(m.mu_head, rng);
    jitter(m.logvar_head, rng);
    const auto x = gaussian(5, static_cast<Eigen::Index>(in), rng);
    const auto eps = gaussian(5, static_cast<Eigen::Index>(latent), rng);
    VaeGradients g;
    elbo_loss_and_gradients(m, x, eps, g);
    std::vector<DenseLayer*> layers;
    std::vector<const LayerGrad*> grads;
    for (std::size_t l = 0; l < m.trunk.layers.size(); ++l) {
      layers.push_back(&m.trunk.layers[l]);
      grads.push_back(&g.trunk[l]);
    }
    layers.push_back(&m.mu_head);
    grads.push_back(&g.mu_head);
    layers.push_back(&m.logvar_head);
    grads.push_back(&g.logvar_head);
    for (std::size_t l = 0; l < m.decoder.layers.size(); ++l) {
      layers.push_back(&m.decoder.layers[l]);
      grads.push_back(&g.decoder[l]);
    }
    worst_vae = std::max(worst_vae, oracle::finite_difference_error(
                                        layers, grads, [&] { return elbo_loss(m, x, eps).loss; }));
  }
  for (int net = 0; net < 20; ++net) {
    const std::size_t in = 2 + rng.index(5), depth = 1 + rng.index(3);
    std::vector<std::size_t> sizes;
    for (std::size_t d = 0; d < depth; ++d) sizes.push_back(2 + rng.index(6));
    sizes.push_back(1);
    auto n = make_network(in, sizes, Activation::kRelu, Activation::kSigmoid, rng);
    for (auto& l : n.layers) jitter(l, rng);
    const auto x = gaussian(6, static_cast<Eigen::Index>(in), rng);
    std::vector<std::uint8_t> y(6);
    for (auto& v : y) v = rng.bernoulli(0.5);
    const double w = rng.uniform(0.5, 5.0);
    std::vector<LayerGrad> g;
    mlp_loss_and_gradients(n, x, y, w, g);
    std::vector<DenseLayer*> layers;
    std::vector<const LayerGrad*> grads;
    for (std::size_t l = 0; l < n.layers.size(); ++l) {
      layers.push_back(&n.layers[l]);
      grads.push_back(&g[l]);
    }
    worst_mlp = std::max(worst_mlp, oracle::finite_difference_error(
                                        layers, grads, [&] { return mlp_loss(n, x, y, w); }));
  }
  const double elapsed = seconds_since(t0);
  return check(worst_vae < 1e-4 && worst_mlp < 1e-4 && elapsed < 30.0,
               fmt("20 VAE max rel err %.2e, 20 MLP max rel err %.2e, %.2f s", worst_vae,
                   worst_mlp, elapsed));
}

Verdict kl_divergence() {
  Rng rng(10);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const std::size_t d = 3;
    std::vector<double> mu(d), lv(d);
    for (std::size_t k = 0; k < d; ++k) {
      mu[k] = rng.uniform(-1.5, 1.5);
      lv[k] = 2.0 * std::log(rng.uniform(0.4, 2.0));
    }
    const double exact = gaussian_kl(mu, lv);
    const double mc = oracle::monte_carlo_kl(mu, lv, 100000, rng);
    worst = std::max(worst, std::abs(mc - exact) / exact);
  }
  const std::vector<double> zero(4, 0.0);
  const double standard = gaussian_kl(zero, zero);
  return check(worst < 0.02 && standard == 0.0,
               fmt("20 draws, max relative MC gap %.4f; KL(0, 1) = %.17g", worst, standard));
}

// --- resampling ----------------------------------------------------------------

DataTable complete_synthetic(std::size_t rows, double rate, std::uint64_t seed) {
  SyntheticOptions o;
  o.n_rows = rows;
  o.positive_rate = rate;
  o.seed = seed;
  o.missing_rate = 0.0;
  return generate_synthetic(o);
}

Verdict balanced_bags() {
  const auto t = complete_synthetic(20000, 0.01, 1);
  const auto rows = all_rows(t);
  const auto x = to_matrix(t, rows, t.feature_columns());
  const auto y = t.labels();
  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  std::size_t violations = 0, bags = 0;
  for (bool bootstrap : {true, false}) {
    EnsembleConfig c;
    c.n_estimators = 100;
    c.bootstrap = bootstrap;
    c.record_bags = true;
    const auto m = fit_balanced_bagging(x, y, c);
    for (const auto& bag : m.bags()) {
      ++bags;
      std::size_t pos = 0;
      for (auto r : bag.row_indices) pos += y[r];
      const std::size_t neg = bag.row_indices.size() - pos;
      if (pos != neg || pos != positives) ++violations;
    }
  }
  return check(bags == 200 && violations == 0,
               fmt("%zu bags over %zu positives, %zu unbalanced", bags, positives, violations));
}

Verdict smote_geometry() {
  const auto t = complete_synthetic(3000, 0.04, 2);
  const auto r = smote(t, all_rows(t), 5, 1.0, 3);
  const auto y = t.labels();
  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i]) minority.push_back(i);
  }
  const auto numeric = t.numeric_columns();
  std::vector<std::size_t> flags;
  for (auto c : t.feature_columns()) {
    if (std::find(numeric.begin(), numeric.end(), c) == numeric.end()) flags.push_back(c);
  }

  // Solves for lambda on the widest coordinate, then requires every other
  // coordinate to agree.
  auto explains = [&](std::size_t p, std::size_t q, std::size_t s) {
    double span = 0.0, lambda = 0.0;
    for (auto c : numeric) {
      const double d = t.values(c)[q] - t.values(c)[p];
      if (std::abs(d) > span) {
        span = std::abs(d);
        lambda = (r.table.values(c)[s] - t.values(c)[p]) / d;
      }
    }
    if (lambda < -1e-12 || lambda > 1.0 + 1e-12) return false;
    for (auto c : numeric) {
      const double pv = t.values(c)[p], qv = t.values(c)[q];
      const double expect = pv + lambda * (qv - pv);
      const double tol = 1e-9 * std::max({1.0, std::abs(pv), std::abs(qv)});
      if (std::abs(r.table.values(c)[s] - expect) > tol) return false;
    }
    for (auto c : flags) {
      if (r.table.values(c)[s] != t.values(c)[p]) return false;
    }
    return true;
  };

  std::size_t explained = 0;
  const std::size_t synthetic = r.table.row_count() - r.original_rows;
  for (std::size_t s = r.original_rows; s < r.table.row_count(); ++s) {
    bool found = false;
    for (std::size_t i = 0; i < minority.size() && !found; ++i) {
      for (std::size_t j = 0; j < minority.size() && !found; ++j) {
        found = i != j && explains(minority[i], minority[j], s);
      }
    }
    explained += found && r.table.labels()[s] == 1 ? 1 : 0;
  }
  return check(synthetic > 0 && explained == synthetic,
               fmt("%zu of %zu synthetic rows are convex combinations of two minority rows",
                   explained, synthetic));
}

// --- economics -----------------------------------------------------------------

Verdict economics() {
  ConfusionMatrix cm;
  cm.fp = 17506;
  cm.fn = 180;
  const double cost = misclassification_cost(cm, 10.0, 1.0).total;

  CostDrivers d;
  d.sums = {120.0, 7.0, 33.0, 2.0, 5.0};
  d.revenue = 1000.0;
  double best = -std::numeric_limits<double>::infinity();
  std::array<double, kCostTerms> arg{};
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::array<double, kCostTerms> a{};
    for (std::size_t k = 0; k < kCostTerms; ++k) a[k] = (mask >> k) & 1 ? 2.0 : 1.0;
    double v = d.revenue;
    for (std::size_t k = 0; k < kCostTerms; ++k) v -= a[k] * d.sums[k];
    if (v > best) {
      best = v;
      arg = a;
    }
  }
  const auto r = maximize_profit(d, CostParams::from_array({1.5, 1.5, 1.5, 1.5, 1.5}),
                                 ProfitConstraints::box(1.0, 2.0));
  double vertex_gap = 0.0;
  for (std::size_t k = 0; k < kCostTerms; ++k) {
    vertex_gap = std::max(vertex_gap, std::abs(r.params.to_array()[k] - 1.0));
  }
  const bool lower = std::all_of(arg.begin(), arg.end(), [](double v) { return v == 1.0; });
  return check(cost == 175240.0 && lower && vertex_gap <= 1e-8 &&
                   std::abs(r.profit - best) <= 1e-8,
               fmt("cost %.1f; box optimum %.10g vs 32-corner %.10g, max |param - 1| %.2e",
                   cost, r.profit, best, vertex_gap));
}

// --- end to end ----------------------------------------------------------------

RunConfig desk_config(ModelKind kind, std::size_t threads) {
  RunConfig c;
  c.data.synthetic.n_rows = 20000;
  c.data.synthetic.positive_rate = 0.01;
  c.data.synthetic.n_informative = 6;
  c.seed = 0;
  c.model.kind = kind;
  c.model.n_estimators = 200;
  c.threads = threads;
  return c;
}

Verdict desk_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto single = run_experiment(desk_config(ModelKind::kBbc, 1), false);
  const double elapsed = seconds_since(t0);
  const auto multi = run_experiment(desk_config(ModelKind::kBbc, 4), false);
  const auto dummy = run_experiment(desk_config(ModelKind::kDummy, 1), false);
  const auto& m = single.report.models.at(0).metrics;
  const double dummy_roc = dummy.report.models.at(0).metrics.roc_auc;
  const bool identical = serialize(single.report).dump() == serialize(multi.report).dump() &&
                         single.test_scores == multi.test_scores;
  return check(m.roc_auc >= 0.85 && dummy_roc >= 0.45 && dummy_roc <= 0.55 && m.recall >= 0.7 &&
                   elapsed < 60.0 && identical,
               fmt("bbc roc %.4f recall %.4f, dummy roc %.4f, single-thread %.1f s, "
                   "1 vs 4 threads %s",
                   m.roc_auc, m.recall, dummy_roc, elapsed, identical ? "identical" : "differ"));
}

Verdict planted_importance() {
  auto planted = [](std::size_t n, std::uint64_t seed, FeatureMatrix& x,
                    std::vector<std::uint8_t>& y) {
    Rng rng(seed);
    x.resize(static_cast<Eigen::Index>(n), 5);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      for (Eigen::Index j = 0; j < 5; ++j) x(r, j) = rng.normal();
      y[i] = x(r, 0) + 0.3 * rng.normal() > 1.0;
    }
  };
  FeatureMatrix xt, xe;
  std::vector<std::uint8_t> yt, ye;
  planted(3000, 31, xt, yt);
  planted(1500, 32, xe, ye);
  EnsembleConfig c;
  c.n_estimators = 50;
  const auto model = fit_balanced_bagging(xt, yt, c);
  ImportanceOptions o;
  o.repeats = 10;
  o.seed = 33;
  const std::vector<std::string> names = {"A", "B", "C", "D", "E"};
  const auto r = permutation_importance(model, xe, ye, names, o);
  double runner_up = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < r.features.size(); ++j) {
    runner_up = std::max(runner_up, r.features[j].mean_drop);
  }
  const double a = r.features.at(0).mean_drop;
  return check(a > runner_up && r.repeats == 10,
               fmt("A mean drop %.4f, largest other %.4f", a, runner_up));
}

Verdict kaggle_reproduction() {
  const char* path = std::getenv("BACKORDER_KAGGLE_CSV");
  if (!path || !*path) return {Outcome::kSkip, "BACKORDER_KAGGLE_CSV not set"};
  RunConfig c;
  c.data.source = "csv";
  c.data.path = path;
  c.model.kind = ModelKind::kBbc;
  c.model.n_estimators = 1000;
  c.evaluation.importance_repeats = 3;
  c.evaluation.screening = false;
  c.threads = 0;
  const auto r = run_experiment(c, false).report;
  const auto& m = r.models.at(0).metrics;
  const std::string top = r.importance ? r.importance->ranked().front().feature : "";
  return check(std::abs(m.roc_auc - 0.9081) <= 0.03 && std::abs(m.pr_auc - 0.4925) <= 0.05 &&
                   top == "nationalInv",
               fmt("roc %.4f, pr %.4f, top feature %s", m.roc_auc, m.pr_auc, top.c_str()));
}

}  // namespace
}  // namespace backorder

int main() {
  using namespace backorder;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"metric-oracles", metric_oracles},
      {"brier-constant", brier_constant},
      {"statistical-tests", statistical_oracles},
      {"gradient-check", gradients},
      {"kl-divergence", kl_divergence},
      {"balanced-bags", balanced_bags},
      {"smote-geometry", smote_geometry},
      {"economics", economics},
      {"desk-benchmark", desk_benchmark},
      {"planted-importance", planted_importance},
      {"kaggle-reproduction", kaggle_reproduction},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = fail(std::string("threw: ") + e.what());
    }
    const char* tag = v.outcome == Outcome::kPass ? "PASS" : v.outcome == Outcome::kFail ? "FAIL" : "SKIP";
    if (v.outcome == Outcome::kFail) ++failures;
    std::printf("%s %s: %s\n", tag, name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
