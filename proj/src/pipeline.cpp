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

#include "sznet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <spdlog/spdlog.h>

#include "sznet/error.hpp"
#include "sznet/features.hpp"

namespace sznet {

std::vector<int> binary_labels(std::span<const EpochRef> epochs) {
  std::vector<int> out;
  out.reserve(epochs.size());
  for (const auto& e : epochs) out.push_back(e.label != 0 ? 1 : 0);
  return out;
}

TrainedDetector train_detector(const PatternSet& train, const DetectorConfig& config) {
  if (train.empty()) throw ValidationError("training set is empty");
  const auto labels = binary_labels(train.epochs);
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw ValidationError("training data contains a single class");
  }

  std::vector<std::size_t> keep(train.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  if (config.balance) keep = undersample_balance(train.epochs, config.seed);
  PatternSet balanced = train.subset(keep);

  auto stats = normalize_patterns(balanced.patterns);
  const nn::Batch inputs = nn::to_batch(balanced.patterns);
  const auto y = binary_labels(balanced.epochs);

  nn::Network net = nn::make_network(config.architecture,
                                     nn::pattern_shape(balanced.patterns.front()),
                                     config.network, config.seed + 1);
  nn::TrainConfig tc = config.train;
  tc.seed = config.seed + 2;
  auto history = nn::train(net, inputs, y, tc);

  return {nn::ModelBundle{std::move(net), std::move(stats), train.families, train.n_channels,
                          train.n_bands, config.seed},
          std::move(history), balanced.size()};
}

void check_compatible(const nn::ModelBundle& model, const PatternSet& set) {
  if (model.families != set.families || model.n_channels != set.n_channels ||
      model.n_bands != set.n_bands) {
    throw ValidationError("model/pattern shape mismatch: model expects " +
                          std::to_string(model.network.input_shape().height) + "x" +
                          std::to_string(model.network.input_shape().width) +
                          " patterns, set holds " + std::to_string(set.rows()) + "x" +
                          std::to_string(set.cols()));
  }
}

nn::Batch normalized_batch(const nn::ModelBundle& model, const PatternSet& set) {
  check_compatible(model, set);
  auto patterns = set.patterns;
  normalize_patterns(patterns, &model.normalization);
  return nn::to_batch(patterns);
}

std::vector<double> score_patterns(const nn::ModelBundle& model, const PatternSet& set) {
  if (set.empty()) return {};
  const auto probs = model.network.predict(normalized_batch(model, set));
  std::vector<double> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) out[static_cast<std::size_t>(i)] = probs(i, 1);
  return out;
}

EvalReport evaluate_model(std::string name, const nn::ModelBundle& model,
                          const PatternSet& set) {
  const auto scores = score_patterns(model, set);
  return evaluate(std::move(name), scores, binary_labels(set.epochs));
}

Eigen::MatrixXd sensitivity_map(const nn::ModelBundle& model, const PatternSet& set) {
  if (set.empty()) throw ValidationError("sensitivity needs a non-empty pattern set");
  return nn::input_sensitivity(model.network, normalized_batch(model, set),
                               binary_labels(set.epochs));
}

CrossValidation cross_validate(const PatternSet& set, int k, const DetectorConfig& config) {
  CrossValidation cv;
  cv.folds = kfold_patient_split(set.epochs, k, config.seed);
  double sum = 0.0;
  int defined = 0;
  for (std::size_t f = 0; f < cv.folds.size(); ++f) {
    const std::set<std::string> held(cv.folds[f].begin(), cv.folds[f].end());
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < set.size(); ++i) {
      (held.count(set.epochs[i].patient_id) != 0 ? test_idx : train_idx).push_back(i);
    }
    const auto detector = train_detector(set.subset(train_idx), config);
    const auto report =
        evaluate_model("fold " + std::to_string(f + 1), detector.model, set.subset(test_idx));
    cv.fold_auc.push_back(report.defined ? report.auc
                                         : std::numeric_limits<double>::quiet_NaN());
    if (report.defined) {
      sum += report.auc;
      ++defined;
    }
    spdlog::info("fold {}/{}: {} held-out epochs, AUC {}", f + 1, cv.folds.size(),
                 test_idx.size(), report.defined ? std::to_string(report.auc) : "undefined");
  }
  cv.mean_auc = defined > 0 ? sum / defined : std::numeric_limits<double>::quiet_NaN();
  return cv;
}

PatternSet relabeled(const PatternSet& set, std::vector<EpochRef> epochs) {
  if (epochs.size() != set.size()) throw ValidationError("relabel: epoch count mismatch");
  PatternSet out = set;
  out.epochs = std::move(epochs);
  return out;
}

std::vector<EvalReport> per_type_reports(const PatternSet& train, const PatternSet& test,
                                         const DetectorConfig& config) {
  std::set<int> types;
  for (const auto* s : {&train, &test}) {
    for (const auto& e : s->epochs) {
      if (e.label != 0) types.insert(e.label);
    }
  }
  std::vector<EvalReport> out;
  for (const int t : types) {
    const std::string name =
        "type " + std::to_string(t) + " " +
        std::string(seizure_type_name(seizure_type_from_code(t)));
    const auto train_t = relabeled(train, one_vs_rest(train.epochs, t));
    const auto test_t = relabeled(test, one_vs_rest(test.epochs, t));
    try {
      const auto detector = train_detector(train_t, config);
      out.push_back(evaluate_model(name, detector.model, test_t));
    } catch (const ValidationError& e) {
      spdlog::warn("{}: {}", name, e.what());
      out.push_back(evaluate(name, {}, {}));
      out.back().epochs = test_t.size();
    }
  }
  return out;
}

EvalReport onset_window_report(const PatternSet& train, const PatternSet& test,
                               int window_epochs, const DetectorConfig& config) {
  const auto train_w = relabeled(train, relabel_onset_window(train.epochs, window_epochs));
  const auto test_w = relabeled(test, relabel_onset_window(test.epochs, window_epochs));
  const auto detector = train_detector(train_w, config);
  return evaluate_model("onset window " + std::to_string(window_epochs) + " s",
                        detector.model, test_w);
}

PatientSplitReports patient_split_reports(const PatternSet& train, const PatternSet& test,
                                          double fraction, const DetectorConfig& config) {
  const auto [augment_idx, test_idx] = patient_specific_split(test.epochs, fraction);
  const PatternSet reduced = test.subset(test_idx);
  PatternSet augmented = train;
  augmented.append_set(test.subset(augment_idx));

  PatientSplitReports out;
  const auto baseline = train_detector(train, config);
  out.baseline = evaluate_model("patient split baseline", baseline.model, reduced);
  const auto specific = train_detector(augmented, config);
  out.patient_specific = evaluate_model("patient-specific split", specific.model, reduced);
  return out;
}

}  // namespace sznet
