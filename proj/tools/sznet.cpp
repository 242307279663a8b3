// Copyright 2026 The sznet Authors.
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

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include "sznet/commands.hpp"
#include "sznet/config.hpp"
#include "sznet/error.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string recordings;
  std::string labels;
  std::string patterns;
  std::string eval_patterns;
  std::string model;
  std::string architecture;
  std::optional<int> cv;
  bool per_type = false;
  std::optional<int> onset_window;
  std::optional<double> patient_split;
};

sznet::PipelineConfig resolve(const Overrides& o) {
  auto c = o.config.empty() ? sznet::PipelineConfig{} : sznet::load_config(o.config);
  if (o.seed) {
    c.synth.base.seed = *o.seed;
    c.detector.seed = *o.seed;
  }
  if (!o.out.empty()) c.paths.out = o.out;
  if (!o.recordings.empty()) c.paths.recordings = o.recordings;
  if (!o.labels.empty()) c.paths.labels = o.labels;
  if (!o.patterns.empty()) c.paths.patterns = o.patterns;
  if (!o.eval_patterns.empty()) c.paths.eval_patterns = o.eval_patterns;
  if (!o.model.empty()) c.paths.model = o.model;
  if (!o.architecture.empty()) c.detector.architecture = sznet::nn::parse_architecture(o.architecture);
  if (o.cv) c.eval.cv_folds = *o.cv;
  if (o.per_type) c.eval.per_type = true;
  if (o.onset_window) c.eval.onset_window = *o.onset_window;
  if (o.patient_split) c.eval.patient_split = *o.patient_split;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::info);
  spdlog::cfg::load_env_levels();  // SPDLOG_LEVEL=debug|info|warn|error|off

  CLI::App app{"EEG seizure detection from synchronisation, entropy and power patterns"};
  app.require_subcommand(1);
  Overrides o;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "seed for generation, sampling and training");
    cmd->add_option("--out", o.out, "output directory");
  };
  auto* synth = app.add_subcommand("synth", "write synthetic EDF recordings and labels");
  auto* extract = app.add_subcommand("extract", "compute pattern matrices per 1 s epoch");
  auto* train = app.add_subcommand("train", "train a CNN detector");
  auto* eval = app.add_subcommand("eval", "ROC/AUC evaluation and subtasks");
  auto* sens = app.add_subcommand("sensitivity", "input-sensitivity map of a model");
  auto* stats = app.add_subcommand("stats", "per-class feature histograms");
  for (auto* cmd : {synth, extract, train, eval, sens, stats}) common(cmd);

  extract->add_option("--recordings", o.recordings, "directory of .edf/.csv recordings");
  extract->add_option("--labels", o.labels, "label CSV");
  for (auto* cmd : {extract, train, eval, stats}) {
    cmd->add_option("--patterns", o.patterns, "training pattern container");
  }
  for (auto* cmd : {train, eval, sens}) cmd->add_option("--model", o.model, "model JSON");
  for (auto* cmd : {eval, sens}) {
    cmd->add_option("--eval-patterns", o.eval_patterns, "evaluation pattern container");
  }
  train->add_option("--architecture", o.architecture, "CNN1..CNN4");
  train->add_option("--cv", o.cv, "patient-wise k-fold cross-validation");
  eval->add_flag("--per-type", o.per_type, "one-vs-rest report per seizure type");
  eval->add_option("--onset-window", o.onset_window, "onset relabelling window in seconds");
  eval->add_option("--patient-split", o.patient_split, "patient-specific split fraction");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = resolve(o);
    if (synth->parsed()) {
      const auto out = sznet::cmd_synth(config);
      std::printf("%zu recordings, labels in %s\n", out.recordings.size(),
                  out.labels.string().c_str());
    } else if (extract->parsed()) {
      const auto s = sznet::cmd_extract(config);
      std::printf("%zu patterns from %zu recordings (%zu skipped) -> %s\n", s.patterns,
                  s.recordings, s.skipped.size(), s.output.string().c_str());
    } else if (train->parsed()) {
      const auto s = sznet::cmd_train(config);
      if (s.cv) {
        for (std::size_t f = 0; f < s.cv->fold_auc.size(); ++f) {
          std::printf("fold %zu AUC %.4f\n", f + 1, s.cv->fold_auc[f]);
        }
        std::printf("mean AUC %.4f\n", s.cv->mean_auc);
      }
      std::printf("model -> %s\n", s.model.string().c_str());
    } else if (eval->parsed()) {
      const auto r = sznet::cmd_eval(config);
      if (r.defined) {
        std::printf("AUC %.4f  Se %.4f  Sp %.4f  (optimal cutoff %.4f)\n", r.auc,
                    r.cutoff.sensitivity, r.cutoff.specificity, r.cutoff.threshold);
      } else {
        std::printf("AUC undefined: evaluation set holds one class\n");
      }
    } else if (sens->parsed()) {
      const auto m = sznet::cmd_sensitivity(config);
      std::printf("%ldx%ld sensitivity map written\n", static_cast<long>(m.rows()),
                  static_cast<long>(m.cols()));
    } else if (stats->parsed()) {
      const auto h = sznet::cmd_stats(config);
      std::printf("%zu histograms written\n", h.size());
    }
  } catch (const sznet::IoError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const sznet::Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
