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
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sznet/pattern_set.hpp"

namespace sznet {

// One operating point; a sample is called positive when score >= threshold.
struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = std::numeric_limits<double>::infinity();
};

// Runs from (0,0) at threshold +inf to (1,1) at the lowest score, one point
// per distinct score.
struct RocCurve {
  std::vector<RocPoint> points;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// Labels are binary (nonzero means positive). Throws unless both classes occur.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);
double auc(const RocCurve& curve);

struct Cutoff {
  double threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
};

// Maximises sensitivity + specificity. Ties go to the lowest threshold.
Cutoff optimal_cutoff(const RocCurve& curve);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

struct EvalReport {
  std::string name = "overall";
  std::size_t epochs = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  // False when one class is missing; the metrics below are then meaningless.
  bool defined = false;
  double auc = 0.0;
  Cutoff cutoff;
  Confusion confusion;
  RocCurve roc;
  std::vector<EvalReport> per_type;
  std::vector<EvalReport> subtasks;
};

EvalReport evaluate(std::string name, std::span<const double> scores,
                    std::span<const int> labels);
nlohmann::json to_json(const EvalReport& report);
std::string roc_csv(const RocCurve& curve);

// Indices (ascending) of every seizure epoch plus an equal number of
// background epochs drawn without replacement. Returns every index with a
// warning when seizures outnumber background.
std::vector<std::size_t> undersample_balance(std::span<const EpochRef> epochs,
                                             std::uint64_t seed);

// Patients shuffled by `seed`, then dealt round-robin so fold sizes differ by
// at most one.
std::vector<std::vector<std::string>> kfold_patient_split(std::span<const EpochRef> epochs,
                                                          int k, std::uint64_t seed);

// Binary labels: the chosen seizure type against everything else.
std::vector<EpochRef> one_vs_rest(std::span<const EpochRef> epochs, int seizure_type);

// Keeps only the first `window_epochs` epochs of each run of consecutive
// seizure epochs (same patient, consecutive indices) positive.
std::vector<EpochRef> relabel_onset_window(std::span<const EpochRef> epochs,
                                           int window_epochs = 10);

// Per patient, the chronologically first floor(fraction * count) epochs go to
// the augmentation set (first) and the rest stay in the test set (second).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> patient_specific_split(
    std::span<const EpochRef> epochs, double fraction = 0.5);

inline constexpr int kHistogramBins = 64;

struct FeatureHistogram {
  FeatureFamily family = FeatureFamily::kPlv;
  int label = 0;  // 0 background, 1 seizure
  double lower = 0.0;
  double upper = 1.0;
  std::vector<std::size_t> counts;  // kHistogramBins entries
};

// Off-diagonal (i < j) entries of every band block, per family and class.
// PLV and rho use [0, 1]; Energy uses the range observed in the set.
std::vector<FeatureHistogram> feature_class_stats(const PatternSet& set);
std::string histograms_csv(std::span<const FeatureHistogram> histograms);

}  // namespace sznet
