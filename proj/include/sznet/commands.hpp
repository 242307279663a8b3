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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sznet/config.hpp"
#include "sznet/eval.hpp"
#include "sznet/pipeline.hpp"

namespace sznet {

// Each command validates the whole config and its inputs before writing
// anything. Errors surface as ValidationError (bad config or data) or IoError.

struct SynthOutput {
  std::vector<std::filesystem::path> recordings;  // out/recordings/<patient>.edf
  std::filesystem::path labels;                   // out/labels.csv
};
SynthOutput cmd_synth(const PipelineConfig& config);

struct ExtractSummary {
  std::size_t recordings = 0;
  std::size_t patterns = 0;
  std::vector<std::string> skipped;  // recordings without labels
  std::filesystem::path output;
};
ExtractSummary cmd_extract(const PipelineConfig& config);

struct TrainSummary {
  std::filesystem::path model;
  std::filesystem::path history;  // out/loss_history.csv
  std::optional<CrossValidation> cv;  // out/cv.csv, out/cv.json
};
TrainSummary cmd_train(const PipelineConfig& config);

// Writes out/report.json and out/roc.csv.
EvalReport cmd_eval(const PipelineConfig& config);

// Writes out/sensitivity.csv.
Eigen::MatrixXd cmd_sensitivity(const PipelineConfig& config);

// Writes out/feature_stats.csv.
std::vector<FeatureHistogram> cmd_stats(const PipelineConfig& config);

std::string sensitivity_csv(const Eigen::MatrixXd& map, const PatternSet& layout,
                            const BandSet& bands);

}  // namespace sznet
