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

#include "sznet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sznet/error.hpp"

namespace sznet {

void SynthConfig::validate() const {
  if (n_channels < 2) throw ValidationError("synth: at least two channels required");
  if (!(duration_s > 0.0)) throw ValidationError("synth: duration must be positive");
  if (!(sample_rate_hz > 0.0)) throw ValidationError("synth: sample rate must be positive");
  for (std::size_t b = 0; b < kNumBands; ++b) {
    for (const auto* state : {&background, &seizure}) {
      if (!(state->coupling[b] >= 0.0 && state->coupling[b] <= 1.0)) {
        throw ValidationError("synth: coupling must lie in [0, 1]");
      }
      if (!(state->amplitude_uv[b] >= 0.0)) {
        throw ValidationError("synth: amplitudes must be non-negative");
      }
    }
    if (!(component_hz[b] > 0.0) || !(component_hz[b] * (1.0 + frequency_spread) <
                                      sample_rate_hz / 2.0)) {
      throw ValidationError("synth: component frequencies must lie below Nyquist");
    }
  }
  if (!(frequency_spread >= 0.0) || !(phase_noise >= 0.0) || !(noise_uv >= 0.0)) {
    throw ValidationError("synth: spread and noise levels must be non-negative");
  }
  AnnotationSet check;
  for (const auto& iv : seizures) {
    if (!is_seizure(iv.type)) throw ValidationError("synth: seizure interval needs a seizure type");
    if (iv.start_s < 0.0 || iv.end_s > duration_s) {
      throw ValidationError("synth: seizure interval outside the recording");
    }
    check.add(patient_id, iv);
  }
}

std::pair<Recording, AnnotationSet> synthesize_recording(const SynthConfig& config) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(config.n_channels);
  const auto length =
      static_cast<Eigen::Index>(std::llround(config.duration_s * config.sample_rate_hz));
  const double dt = 1.0 / config.sample_rate_hz;
  const double diffusion = config.phase_noise * std::sqrt(dt);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd detune(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    detune[i] = config.frequency_spread * (2.0 * uniform(rng) - 1.0);
  }
  Eigen::MatrixXd phase(n, static_cast<Eigen::Index>(kNumBands));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index b = 0; b < phase.cols(); ++b) phase(i, b) = kTwoPi * uniform(rng);
  }

  Recording rec;
  rec.patient_id = config.patient_id;
  rec.sample_rate_hz = config.sample_rate_hz;
  for (int i = 0; i < config.n_channels; ++i) rec.channels.push_back("C" + std::to_string(i + 1));
  rec.samples.resize(n, length);

  std::size_t next = 0;  // seizure intervals are sorted below
  std::vector<Interval> seizures = config.seizures;
  std::sort(seizures.begin(), seizures.end(),
            [](const Interval& a, const Interval& b) { return a.start_s < b.start_s; });

  for (Eigen::Index t = 0; t < length; ++t) {
    const double time = static_cast<double>(t) * dt;
    while (next < seizures.size() && time >= seizures[next].end_s) ++next;
    const bool ictal = next < seizures.size() && time >= seizures[next].start_s;
    const SynthState& state = ictal ? config.seizure : config.background;

    for (std::size_t b = 0; b < kNumBands; ++b) {
      const double c = state.coupling[b];
      const double w = kTwoPi * config.component_hz[b] * dt;
      const double shared = w + diffusion * normal(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double own = w * (1.0 + detune[i]) + diffusion * normal(rng);
        double& p = phase(i, static_cast<Eigen::Index>(b));
        p = std::fmod(p + (1.0 - c) * own + c * shared, kTwoPi);
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      double x = 0.0;
      for (std::size_t b = 0; b < kNumBands; ++b) {
        x += state.amplitude_uv[b] * std::sin(phase(i, static_cast<Eigen::Index>(b)));
      }
      rec.samples(i, t) = x + config.noise_uv * normal(rng);
    }
  }

  AnnotationSet labels;
  labels.touch(config.patient_id);
  for (const auto& iv : seizures) labels.add(config.patient_id, iv);
  return {std::move(rec), std::move(labels)};
}

void CohortConfig::validate() const {
  if (n_patients < 1) throw ValidationError("cohort: at least one patient required");
  if (seizures_per_patient < 0) throw ValidationError("cohort: negative seizure count");
  if (seizure_types.empty()) throw ValidationError("cohort: no seizure types given");
  for (const auto t : seizure_types) {
    if (!is_seizure(t)) throw ValidationError("cohort: seizure types must be 1..8");
  }
  if (!(patient_variability >= 0.0 && patient_variability <= 1.0)) {
    throw ValidationError("cohort: patient variability must lie in [0, 1]");
  }
  if (seizures_per_patient > 0) {
    const double slot = base.duration_s / seizures_per_patient;
    if (!(seizure_duration_s >= 1.0) || seizure_duration_s + 2.0 > slot) {
      throw ValidationError("cohort: seizures do not fit into the recording");
    }
  }
  SynthConfig probe = base;
  probe.seizures.clear();
  probe.validate();
}

std::vector<SynthConfig> cohort_configs(const CohortConfig& cohort) {
  cohort.validate();
  std::vector<SynthConfig> out;
  const int width = std::max<int>(3, static_cast<int>(std::to_string(cohort.n_patients).size()));
  for (int p = 0; p < cohort.n_patients; ++p) {
    std::seed_seq seq{static_cast<std::uint32_t>(cohort.base.seed),
                      static_cast<std::uint32_t>(cohort.base.seed >> 32),
                      static_cast<std::uint32_t>(p)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    SynthConfig c = cohort.base;
    std::string index = std::to_string(p + 1);
    c.patient_id = cohort.id_prefix + std::string(static_cast<std::size_t>(width) - index.size(), '0') + index;
    c.seed = rng();
    c.seizures.clear();

    const double v = cohort.patient_variability;
    for (std::size_t b = 0; b < kNumBands; ++b) {
      const double gain = std::exp(v * normal(rng));
      c.background.amplitude_uv[b] *= gain;
      c.seizure.amplitude_uv[b] *= gain;
      c.component_hz[b] *= 1.0 + 0.1 * v * (2.0 * uniform(rng) - 1.0);
    }

    if (cohort.seizures_per_patient > 0) {
      const double slot = c.duration_s / cohort.seizures_per_patient;
      for (int s = 0; s < cohort.seizures_per_patient; ++s) {
        const double slack = slot - cohort.seizure_duration_s - 2.0;
        const double start =
            std::floor(s * slot + 1.0 + std::floor(uniform(rng) * (std::floor(slack) + 1.0)));
        const auto type = cohort.seizure_types[static_cast<std::size_t>(p + s) %
                                               cohort.seizure_types.size()];
        c.seizures.push_back({start, start + cohort.seizure_duration_s, type});
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sznet
