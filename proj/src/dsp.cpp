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

#include "sznet/dsp.hpp"

namespace sznet {

void validate_bands(const BandSet& bands) {
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (!(bands[b].low_hz >= 0.0) || !(bands[b].low_hz < bands[b].high_hz)) {
      throw ValidationError("band " + std::to_string(b) +
                            " must satisfy 0 <= low < high");
    }
    if (b > 0 && bands[b].low_hz < bands[b - 1].high_hz) {
      throw ValidationError("bands " + std::to_string(b - 1) + " and " +
                            std::to_string(b) + " overlap or are out of order");
    }
  }
}

BandPhases band_phases(const Recording& recording, const BandSet& bands,
                       Eigen::Index num_taps) {
  recording.validate();
  validate_bands(bands);
  BandPhases out;
  out.phase.reserve(bands.size());
  for (const auto& band : bands) {
    const auto kernel = design_bandpass(band, recording.sample_rate_hz, num_taps);
    SampleMatrix phases(recording.num_channels(), recording.length());
    for (Eigen::Index c = 0; c < recording.num_channels(); ++c) {
      const VectorX<double> filtered =
          filter_signal(recording.samples.row(c).transpose(), kernel);
      auto series = instantaneous_phase(analytic_signal(filtered));
      out.degenerate_samples += series.degenerate.size();
      phases.row(c) = series.phase.transpose();
    }
    out.phase.push_back(std::move(phases));
  }
  return out;
}

}  // namespace sznet
