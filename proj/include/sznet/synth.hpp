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

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sznet/dsp.hpp"
#include "sznet/recording.hpp"

namespace sznet {

using BandArray = std::array<double, kNumBands>;

// Per-band phase coupling (0 independent .. 1 fully locked) and sinusoid
// amplitude in microvolts for one brain state.
struct SynthState {
  BandArray coupling{};
  BandArray amplitude_uv{};
};

inline constexpr BandArray kDefaultComponentHz = {2.25, 5.5, 10.0, 14.0, 22.5, 37.5, 57.5};

// Phase-coupled oscillator model. Each channel i carries one oscillator per
// band b whose phase advances by
//   (1 - c) * (2 pi f_b (1 + d_i) dt + s dW_i) + c * (2 pi f_b dt + s dW_shared)
// where c is the coupling of the current state, d_i a fixed per-channel
// detuning and s the phase-noise intensity. The channel signal is the sum of
// a_b sin(phase) over bands plus white noise.
struct SynthConfig {
  std::string patient_id = "synth";
  int n_channels = 4;
  double duration_s = 60.0;
  double sample_rate_hz = kCanonicalSampleRateHz;
  std::uint64_t seed = 1;
  std::vector<Interval> seizures;
  SynthState background{{0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1},
                        {20.0, 15.0, 12.0, 6.0, 5.0, 3.0, 2.0}};
  SynthState seizure{{0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9},
                     {30.0, 25.0, 15.0, 8.0, 8.0, 4.0, 3.0}};
  BandArray component_hz = kDefaultComponentHz;
  double frequency_spread = 0.02;  // detuning d_i ~ U(-spread, spread)
  double phase_noise = 1.0;        // rad / sqrt(s)
  double noise_uv = 5.0;           // additive white noise std

  void validate() const;
};

// Same config (including seed) gives bit-identical samples. The returned
// annotations hold exactly the configured seizure intervals.
std::pair<Recording, AnnotationSet> synthesize_recording(const SynthConfig& config);

// Many synthetic patients sharing one base config. Each gets its own seed,
// evenly spread whole-second seizures and, with nonzero variability, its own
// per-band amplitude gains exp(v * N(0,1)) and component frequencies scaled
// by 1 + 0.1 v U(-1,1).
struct CohortConfig {
  SynthConfig base;  // patient_id and seizures are replaced
  int n_patients = 10;
  std::string id_prefix = "p";
  int seizures_per_patient = 1;
  double seizure_duration_s = 15.0;
  std::vector<SeizureType> seizure_types = {SeizureType::kFocalNonSpecific};
  double patient_variability = 0.0;  // in [0, 1]

  void validate() const;
};

std::vector<SynthConfig> cohort_configs(const CohortConfig& cohort);

}  // namespace sznet
