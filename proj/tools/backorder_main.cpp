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

// Command-line front end: one subcommand per pipeline stage.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "backorder/error.hpp"
#include "backorder/pipeline.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> threads;
  bool full_grid = false;
  std::string model;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  cmd->add_flag("--full-grid", f.full_grid, "Search the exhaustive hyperparameter grid");
}

backorder::RunConfig build_config(const CommonFlags& f) {
  backorder::RunConfig c;
  if (!f.config.empty()) {
    c = backorder::load_run_config(f.config);
  } else {
    c.origin = "<defaults>";
  }
  backorder::apply_environment(c);
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.full_grid) c.model.grid = backorder::GridMode::kFull;
  return c;
}

std::filesystem::path model_path(const CommonFlags& f, const backorder::RunConfig& c) {
  if (!f.model.empty()) return f.model;
  return std::filesystem::path(c.output_dir) / "model.json";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backorder prediction: training, evaluation and economic scoring"};
  app.require_subcommand(1);
  CommonFlags flags;

  struct Command {
    const char* name;
    const char* help;
    bool needs_model;
  };
  const Command commands[] = {
      {"prepare", "Load, split, impute and transform; write processed data", false},
      {"screen", "Mann-Whitney / chi-square screening and correlation matrices", false},
      {"train", "Fit one model and save it", false},
      {"evaluate", "Score a saved model on the test split", true},
      {"matrix", "Compare models across transform regimes", false},
      {"importance", "Permutation importance of a saved model", true},
      {"economics", "Optimal profit and misclassification cost of a saved model", true},
      {"synth", "Generate a synthetic inventory dataset", false},
      {"run", "Full experiment: every stage with all reports", false},
  };
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub, flags);
    if (cmd.needs_model) {
      sub->add_option("--model", flags.model, "Saved model (default: <out>/model.json)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto config = build_config(flags);
    backorder::Json summary;
    if (name == "prepare") {
      summary = backorder::run_prepare(config);
    } else if (name == "screen") {
      summary = backorder::run_screen(config);
    } else if (name == "train") {
      summary = backorder::run_train(config);
    } else if (name == "evaluate") {
      summary = backorder::run_evaluate(config, model_path(flags, config));
    } else if (name == "matrix") {
      summary = backorder::run_matrix(config);
    } else if (name == "importance") {
      summary = backorder::run_importance(config, model_path(flags, config));
    } else if (name == "economics") {
      summary = backorder::run_economics(config, model_path(flags, config));
    } else if (name == "synth") {
      summary = backorder::run_synth(config);
    } else {
      const auto result = backorder::run_experiment(config);
      summary = backorder::serialize(result.report.models.front().metrics);
    }
    std::cout << summary.dump(2) << '\n';
  } catch (const backorder::StageError& e) {
    std::cerr << "backorder " << name << ": error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "backorder " << name << ": error: [" << name << "] " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
