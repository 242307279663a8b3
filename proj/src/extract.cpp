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

#include "sznet/extract.hpp"

#include <algorithm>

namespace sznet {

PatternSet extract_patterns(const Recording& recording, const AnnotationSet& annotations,
                            const ExtractOptions& options) {
  const auto families = canonical_families(options.families);
  const auto epochs = segment_epochs(recording, annotations);
  const auto spe = epochs.samples_per_epoch;
  const int bins =
      options.entropy_bins > 0 ? options.entropy_bins : default_entropy_bins(spe);

  const bool need_phases =
      std::find(families.begin(), families.end(), FeatureFamily::kEnergy) == families.end() ||
      families.size() > 1;
  BandPhases phases;
  if (need_phases) phases = band_phases(recording, options.bands, options.num_taps);

  PatternSet out;
  out.n_channels = recording.num_channels();
  out.n_bands = options.bands.size();
  out.families = families;
  EpochFeatureInput input;
  input.sample_rate_hz = recording.sample_rate_hz;
  input.band_phases.resize(need_phases ? options.bands.size() : 0);
  for (const auto& epoch : epochs.epochs) {
    for (std::size_t b = 0; b < input.band_phases.size(); ++b) {
      input.band_phases[b] = phases.phase[b].middleCols(epoch.index * spe, spe);
    }
    input.raw = epoch.window;
    std::vector<PatternMatrix> parts;
    parts.reserve(families.size());
    for (const auto f : families) {
      parts.push_back(build_family_pattern(input, f, options.bands, bins));
    }
    out.append(stack_patterns(parts),
               EpochRef{epoch.patient_id, epoch.index, code(epoch.label)});
  }
  return out;
}

}  // namespace sznet
