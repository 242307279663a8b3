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

#include "sznet/features.hpp"

#include <algorithm>
#include <string>

namespace sznet {

std::string_view family_name(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::kPlv:
      return "plv";
    case FeatureFamily::kEnergy:
      return "energy";
    case FeatureFamily::kEntropy:
      return "entropy";
  }
  return "unknown";
}

FeatureFamily family_from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "plv") return FeatureFamily::kPlv;
  if (lower == "energy") return FeatureFamily::kEnergy;
  if (lower == "entropy") return FeatureFamily::kEntropy;
  throw ValidationError("unknown feature family '" + std::string(name) + "'");
}

std::vector<FeatureFamily> canonical_families(std::vector<FeatureFamily> families) {
  if (families.empty()) throw ValidationError("no feature families selected");
  std::sort(families.begin(), families.end());
  if (std::adjacent_find(families.begin(), families.end()) != families.end()) {
    throw ValidationError("duplicate feature family");
  }
  return families;
}

int default_entropy_bins(Eigen::Index series_length) {
  if (series_length < 2) return 2;
  const double k =
      std::floor(std::exp(0.626 + 0.4 * std::log(static_cast<double>(series_length - 1))));
  return std::max(2, static_cast<int>(k));
}

PatternMatrix build_phase_pattern(std::span<const SampleMatrix> band_phases,
                                  FeatureFamily family, int num_bins) {
  if (family == FeatureFamily::kEnergy) {
    throw ValidationError("energy patterns are built from raw samples");
  }
  if (band_phases.empty()) throw ValidationError("no band phases supplied");
  const Eigen::Index n = band_phases.front().rows();
  if (n < 2) throw ValidationError("pattern needs at least two channels");
  PatternMatrix out;
  out.families = {family};
  out.n_channels = n;
  out.n_bands = band_phases.size();
  out.values.resize(static_cast<Eigen::Index>(band_phases.size()) * n, n);
  for (std::size_t b = 0; b < band_phases.size(); ++b) {
    const auto& phases = band_phases[b];
    if (phases.rows() != n) throw ValidationError("band phase channel count mismatch");
    auto block = out.values.block(static_cast<Eigen::Index>(b) * n, 0, n, n);
    block.diagonal().setOnes();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const auto rel =
            relative_phases(phases.row(i).transpose(), phases.row(j).transpose());
        const double v = family == FeatureFamily::kPlv ? plv(rel)
                                                       : phase_entropy_rho(rel, num_bins);
        block(i, j) = v;
        block(j, i) = v;
      }
    }
  }
  return out;
}

PatternMatrix build_energy_pattern(const SampleMatrix& raw, double sample_rate_hz,
                                   const BandSet& bands) {
  const Eigen::Index n = raw.rows();
  if (n < 2) throw ValidationError("pattern needs at least two channels");
  PatternMatrix out;
  out.families = {FeatureFamily::kEnergy};
  out.n_channels = n;
  out.n_bands = bands.size();
  out.values.resize(static_cast<Eigen::Index>(bands.size()) * n, n);
  auto put = [&](Eigen::Index i, Eigen::Index j, const VectorX<double>& signal) {
    const auto logp = band_log_power(periodogram(signal, sample_rate_hz), bands);
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const auto row0 = static_cast<Eigen::Index>(b) * n;
      out.values(row0 + i, j) = logp[static_cast<Eigen::Index>(b)];
      out.values(row0 + j, i) = logp[static_cast<Eigen::Index>(b)];
    }
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    put(i, i, raw.row(i).transpose());
    for (Eigen::Index j = i + 1; j < n; ++j) {
      put(i, j, (raw.row(i) - raw.row(j)).transpose());
    }
  }
  return out;
}

PatternMatrix build_family_pattern(const EpochFeatureInput& input,
                                   FeatureFamily family, const BandSet& bands,
                                   int num_bins) {
  if (family == FeatureFamily::kEnergy) {
    return build_energy_pattern(input.raw, input.sample_rate_hz, bands);
  }
  if (input.band_phases.size() != bands.size()) {
    throw ValidationError("expected one phase matrix per band");
  }
  return build_phase_pattern(input.band_phases, family, num_bins);
}

PatternMatrix stack_patterns(std::span<const PatternMatrix> patterns) {
  if (patterns.empty()) throw ValidationError("nothing to stack");
  const auto& first = patterns.front();
  PatternMatrix out;
  out.n_channels = first.n_channels;
  out.n_bands = first.n_bands;
  Eigen::Index cols = 0;
  for (const auto& p : patterns) {
    if (p.values.rows() != first.values.rows() || p.n_channels != first.n_channels ||
        p.n_bands != first.n_bands) {
      throw ValidationError("cannot stack patterns of different shapes");
    }
    out.families.insert(out.families.end(), p.families.begin(), p.families.end());
    cols += p.values.cols();
  }
  if (!std::is_sorted(out.families.begin(), out.families.end()) ||
      std::adjacent_find(out.families.begin(), out.families.end()) !=
          out.families.end()) {
    throw ValidationError("patterns must be stacked as PLV, Energy, Entropy without repeats");
  }
  out.values.resize(first.values.rows(), cols);
  Eigen::Index at = 0;
  for (const auto& p : patterns) {
    out.values.middleCols(at, p.values.cols()) = p.values;
    at += p.values.cols();
  }
  return out;
}

NormalizationStats normalize_patterns(std::vector<Eigen::MatrixXd>& patterns,
                                      const NormalizationStats* stats) {
  if (patterns.empty()) throw ValidationError("cannot normalise an empty pattern set");
  NormalizationStats applied;
  if (stats != nullptr) {
    applied = *stats;
  } else {
    const auto rows = patterns.front().rows();
    const auto cols = patterns.front().cols();
    applied.mean = Eigen::MatrixXd::Zero(rows, cols);
    for (const auto& p : patterns) applied.mean += p;
    applied.mean /= static_cast<double>(patterns.size());
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(rows, cols);
    for (const auto& p : patterns) var += (p - applied.mean).cwiseAbs2();
    var /= static_cast<double>(patterns.size());
    applied.stddev = var.cwiseSqrt().cwiseMax(kStdFloor);
  }
  for (auto& p : patterns) {
    if (p.rows() != applied.mean.rows() || p.cols() != applied.mean.cols()) {
      throw ValidationError("pattern shape does not match normalisation statistics");
    }
    p = ((p - applied.mean).array() / applied.stddev.array()).matrix();
  }
  return applied;
}

}  // namespace sznet
