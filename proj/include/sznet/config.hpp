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
#include <string_view>

#include "sznet/extract.hpp"
#include "sznet/pipeline.hpp"
#include "sznet/synth.hpp"

namespace sznet {

struct PathsConfig {
  std::filesystem::path recordings;     // directory of .edf / .csv recordings
  std::filesystem::path labels;         // label CSV
  std::filesystem::path out = "out";    // output directory
  std::filesystem::path patterns;       // default: out/patterns.szp
  std::filesystem::path eval_patterns;  // default: the training patterns
  std::filesystem::path model;          // default: out/model.json
};

struct EvalConfig {
  int cv_folds = 0;            // train: 0 disables cross-validation
  bool per_type = false;       // eval: one-vs-rest per seizure type
  int onset_window = 0;        // eval: 0 disables the onset subtask
  double patient_split = 0.0;  // eval: 0 disables the patient-specific subtask
};

struct PipelineConfig {
  PathsConfig paths;
  CohortConfig synth;
  ExtractOptions features;
  bool resample = false;  // EDF signals with differing rates
  DetectorConfig detector;
  EvalConfig eval;

  std::filesystem::path patterns_path() const;
  std::filesystem::path eval_patterns_path() const;
  std::filesystem::path model_path() const;
  // Checks value ranges; does not touch the file system.
  void validate() const;
};

enum class Command { kSynth, kExtract, kTrain, kEval, kSensitivity, kStats };

// Sections [paths] [synth] [features] [train] [eval]. Unknown keys are errors.
PipelineConfig parse_config(std::string_view ini_text);
PipelineConfig load_config(const std::filesystem::path& path);

// validate() plus existence of every input the command reads.
void validate_for(const PipelineConfig& config, Command command);

}  // namespace sznet
