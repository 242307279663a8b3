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

#include <vector>

#include "sznet/dsp.hpp"
#include "sznet/features.hpp"
#include "sznet/pattern_set.hpp"
#include "sznet/recording.hpp"

namespace sznet {

struct ExtractOptions {
  BandSet bands = kDefaultBands;
  std::vector<FeatureFamily> families = {FeatureFamily::kPlv, FeatureFamily::kEnergy,
                                         FeatureFamily::kEntropy};
  int entropy_bins = 0;  // 0: derived from the epoch length
  Eigen::Index num_taps = kDefaultNumTaps;
};

// One stacked pattern per whole 1 s epoch of the recording, labelled from the
// annotations.
PatternSet extract_patterns(const Recording& recording, const AnnotationSet& annotations,
                            const ExtractOptions& options = {});

}  // namespace sznet
