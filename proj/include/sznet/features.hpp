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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sznet/dsp.hpp"
#include "sznet/error.hpp"

namespace sznet {

// Column-block order inside a stacked pattern is always kPlv, kEnergy, kEntropy.
enum class FeatureFamily : std::uint8_t { kPlv = 0, kEnergy = 1, kEntropy = 2 };

std::string_view family_name(FeatureFamily family);
FeatureFamily family_from_name(std::string_view name);
// Sorted into stacking order; throws on duplicates or an empty list.
std::vector<FeatureFamily> canonical_families(std::vector<FeatureFamily> families);

// Wraps into (-pi, pi].
template <typename Scalar>
Scalar wrap_phase(Scalar d) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  if (d > pi || d <= -pi) {
    d = std::remainder(d, two_pi);
    if (d <= -pi) d += two_pi;
  }
  return d;
}

template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> relative_phases(
    const Eigen::MatrixBase<DerivedA>& phase_i,
    const Eigen::MatrixBase<DerivedB>& phase_j) {
  using Scalar = typename DerivedA::Scalar;
  if (phase_i.size() != phase_j.size()) {
    throw ValidationError("relative phase of series with different lengths");
  }
  VectorX<Scalar> out(phase_i.size());
  for (Eigen::Index n = 0; n < out.size(); ++n) {
    out[n] = wrap_phase<Scalar>(phase_i(n) - phase_j(n));
  }
  return out;
}

// |mean(exp(i * phi))|
template <typename Derived>
typename Derived::Scalar plv(const Eigen::MatrixBase<Derived>& series) {
  using Scalar = typename Derived::Scalar;
  if (series.size() == 0) throw ValidationError("PLV of an empty series");
  Scalar re = 0;
  Scalar im = 0;
  for (Eigen::Index n = 0; n < series.size(); ++n) {
    re += std::cos(series(n));
    im += std::sin(series(n));
  }
  const Scalar count = static_cast<Scalar>(series.size());
  return std::min(Scalar(1), std::hypot(re, im) / count);
}

// floor(exp(0.626 + 0.4 ln(N - 1))); 16 for a 250-sample epoch.
int default_entropy_bins(Eigen::Index series_length);

// Circular bin of width 2pi/K centred on multiples of 2pi/K. Rounding half away
// from zero makes bin(-x) == -bin(x) mod K, so rho(-phi) == rho(phi) exactly.
template <typename Scalar>
int phase_bin(Scalar phase, int num_bins) {
  const Scalar width = 2 * std::numbers::pi_v<Scalar> / Scalar(num_bins);
  const long k = std::lround(phase / width) % num_bins;
  return static_cast<int>(k < 0 ? k + num_bins : k);
}

// (ln K - S) / ln K with S the Shannon entropy of the relative-phase histogram.
template <typename Derived>
typename Derived::Scalar phase_entropy_rho(const Eigen::MatrixBase<Derived>& series,
                                           int num_bins) {
  using Scalar = typename Derived::Scalar;
  if (series.size() == 0) throw ValidationError("entropy of an empty series");
  if (num_bins < 2) throw ValidationError("entropy needs at least two bins");
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(num_bins), 0);
  for (Eigen::Index n = 0; n < series.size(); ++n) {
    ++counts[static_cast<std::size_t>(phase_bin(series(n), num_bins))];
  }
  // Summing in count order makes the result depend only on the multiset of
  // counts, so mirrored histograms give bitwise-equal rho.
  std::sort(counts.begin(), counts.end());
  const Scalar total = static_cast<Scalar>(series.size());
  Scalar entropy = 0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const Scalar p = static_cast<Scalar>(c) / total;
    entropy -= p * std::log(p);
  }
  const Scalar max_entropy = std::log(static_cast<Scalar>(num_bins));
  return std::clamp((max_entropy - entropy) / max_entropy, Scalar(0), Scalar(1));
}

// One epoch's feature image: kNumBands vertically stacked n x n symmetric
// blocks per family, families side by side.
struct PatternMatrix {
  Eigen::MatrixXd values;
  std::vector<FeatureFamily> families;
  Eigen::Index n_channels = 0;
  std::size_t n_bands = kNumBands;
};

struct EpochFeatureInput {
  std::vector<SampleMatrix> band_phases;  // per band: channels x epoch samples
  SampleMatrix raw;                       // channels x epoch samples
  double sample_rate_hz = kCanonicalSampleRateHz;
};

// PLV and rho blocks have unit diagonals. Energy blocks hold the band
// log-power of x_i - x_j off the diagonal and of x_i itself on it.
PatternMatrix build_family_pattern(const EpochFeatureInput& input,
                                   FeatureFamily family, const BandSet& bands,
                                   int num_bins);
PatternMatrix build_phase_pattern(std::span<const SampleMatrix> band_phases,
                                  FeatureFamily family, int num_bins);
PatternMatrix build_energy_pattern(const SampleMatrix& raw, double sample_rate_hz,
                                   const BandSet& bands);

// Horizontal concatenation of single- or multi-family patterns given in
// stacking order.
PatternMatrix stack_patterns(std::span<const PatternMatrix> patterns);

inline constexpr double kStdFloor = 1e-8;

struct NormalizationStats {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd stddev;  // population std, floored at kStdFloor
};

// Per-entry z-score. Computes statistics from `patterns` unless `stats` is
// given, and returns the statistics actually applied.
NormalizationStats normalize_patterns(std::vector<Eigen::MatrixXd>& patterns,
                                      const NormalizationStats* stats = nullptr);

}  // namespace sznet
