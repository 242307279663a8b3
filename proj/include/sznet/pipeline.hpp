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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sznet/eval.hpp"
#include "sznet/nn/model_io.hpp"
#include "sznet/nn/network.hpp"
#include "sznet/nn/train.hpp"
#include "sznet/pattern_set.hpp"

namespace sznet {

struct DetectorConfig {
  nn::Architecture architecture = nn::Architecture::kCnn2;
  nn::ArchitectureOptions network;
  nn::TrainConfig train;  // train.seed is replaced, see train_detector
  bool balance = true;
  // Undersampling uses seed, weight init seed + 1, minibatch order seed + 2.
  std::uint64_t seed = 1;
};

struct TrainedDetector {
  nn::ModelBundle model;
  nn::TrainHistory history;
  std::size_t train_epochs = 0;  // epochs after balancing
};

// Seizure (any nonzero class) versus background.
std::vector<int> binary_labels(std::span<const EpochRef> epochs);

// Balance, normalise and fit a fresh network. Throws ValidationError when one
// class is missing.
TrainedDetector train_detector(const PatternSet& train, const DetectorConfig& config);

// Throws ValidationError when the set's layout differs from the model's.
void check_compatible(const nn::ModelBundle& model, const PatternSet& set);
nn::Batch normalized_batch(const nn::ModelBundle& model, const PatternSet& set);
// Positive-class probability per epoch.
std::vector<double> score_patterns(const nn::ModelBundle& model, const PatternSet& set);
EvalReport evaluate_model(std::string name, const nn::ModelBundle& model,
                          const PatternSet& set);

// Mean squared loss gradient per pattern entry over the set.
Eigen::MatrixXd sensitivity_map(const nn::ModelBundle& model, const PatternSet& set);

struct CrossValidation {
  std::vector<std::vector<std::string>> folds;
  std::vector<double> fold_auc;  // NaN where a fold lacks one class
  double mean_auc = 0.0;         // over defined folds
};

CrossValidation cross_validate(const PatternSet& set, int k, const DetectorConfig& config);

// Same patterns with replaced epoch labels.
PatternSet relabeled(const PatternSet& set, std::vector<EpochRef> epochs);

// One-vs-rest detectors retrained per seizure type occurring in either set.
std::vector<EvalReport> per_type_reports(const PatternSet& train, const PatternSet& test,
                                         const DetectorConfig& config);
EvalReport onset_window_report(const PatternSet& train, const PatternSet& test,
                               int window_epochs, const DetectorConfig& config);

struct PatientSplitReports {
  EvalReport baseline;          // train-only detector on the reduced test set
  EvalReport patient_specific;  // detector also trained on the augmentation set
};

PatientSplitReports patient_split_reports(const PatternSet& train, const PatternSet& test,
                                          double fraction, const DetectorConfig& config);

}  // namespace sznet
