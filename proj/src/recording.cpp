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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "sznet/error.hpp"
#include "sznet/recording.hpp"

namespace sznet {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

constexpr double kTieTolerance = 1e-9;

}  // namespace

void Recording::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ValidationError("recording '" + patient_id +
                          "': sample rate must be positive");
  }
  if (samples.rows() < 2) {
    throw ValidationError("recording '" + patient_id +
                          "': at least two channels required");
  }
  if (static_cast<Eigen::Index>(channels.size()) != samples.rows()) {
    throw ValidationError("recording '" + patient_id +
                          "': channel labels do not match sample rows");
  }
}

Eigen::Index samples_per_epoch(double sample_rate_hz) {
  return static_cast<Eigen::Index>(std::lround(sample_rate_hz));
}

SeizureType epoch_label(const std::vector<Interval>& intervals, int index) {
  const double lo = index;
  const double hi = index + 1.0;
  std::array<double, kNumSeizureTypes + 1> coverage{};
  for (const auto& iv : intervals) {
    if (!is_seizure(iv.type)) continue;
    const double c = std::min(iv.end_s, hi) - std::max(iv.start_s, lo);
    if (c > 0.0) coverage[static_cast<std::size_t>(iv.type)] += c;
  }
  double seizure_total = 0.0;
  std::size_t best = 0;
  for (std::size_t t = 1; t < coverage.size(); ++t) {
    seizure_total += coverage[t];
    if (coverage[t] > 0.0 &&
        (best == 0 || coverage[t] > coverage[best] + kTieTolerance)) {
      best = t;
    }
  }
  if (best == 0) return SeizureType::kBackground;
  const double background = 1.0 - seizure_total;
  return coverage[best] + kTieTolerance >= background ? static_cast<SeizureType>(best)
                                                      : SeizureType::kBackground;
}

EpochSet segment_epochs(const Recording& recording,
                        const AnnotationSet& annotations) {
  recording.validate();
  EpochSet out;
  out.sample_rate_hz = recording.sample_rate_hz;
  out.samples_per_epoch = samples_per_epoch(recording.sample_rate_hz);
  const auto count = recording.length() / out.samples_per_epoch;
  const auto& intervals = annotations.intervals(recording.patient_id);
  out.epochs.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index e = 0; e < count; ++e) {
    Epoch epoch;
    epoch.patient_id = recording.patient_id;
    epoch.index = static_cast<int>(e);
    epoch.window = recording.samples.middleCols(e * out.samples_per_epoch,
                                                out.samples_per_epoch);
    epoch.label = epoch_label(intervals, epoch.index);
    out.epochs.push_back(std::move(epoch));
  }
  return out;
}

Recording parse_csv_recording(std::string_view text, std::string patient_id,
                              double default_rate_hz) {
  Recording rec;
  rec.patient_id = std::move(patient_id);
  rec.sample_rate_hz = default_rate_hz;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::vector<double>> columns;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      constexpr std::string_view kKey = "sample_rate_hz=";
      const auto body = trim(t.substr(1));
      if (body.substr(0, kKey.size()) == kKey) {
        const std::string value(trim(body.substr(kKey.size())));
        char* end = nullptr;
        rec.sample_rate_hz = std::strtod(value.c_str(), &end);
        if (end != value.c_str() + value.size()) {
          throw ValidationError("row " + std::to_string(row) +
                                ": invalid sample_rate_hz");
        }
      }
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto pos = t.find(',', start);
      fields.emplace_back(trim(t.substr(start, pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (rec.channels.empty()) {
      rec.channels = fields;
      columns.resize(fields.size());
      continue;
    }
    if (fields.size() != rec.channels.size()) {
      throw ValidationError("row " + std::to_string(row) + ": expected " +
                            std::to_string(rec.channels.size()) + " values");
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(fields[c].c_str(), &end);
      if (fields[c].empty() || end != fields[c].c_str() + fields[c].size()) {
        throw ValidationError("row " + std::to_string(row) + ": invalid value '" +
                              fields[c] + "'");
      }
      columns[c].push_back(v);
    }
  }
  const auto n = static_cast<Eigen::Index>(columns.size());
  const auto len = n == 0 ? 0 : static_cast<Eigen::Index>(columns[0].size());
  rec.samples.resize(n, len);
  for (Eigen::Index c = 0; c < n; ++c) {
    rec.samples.row(c) =
        Eigen::Map<const Eigen::RowVectorXd>(columns[static_cast<std::size_t>(c)].data(), len);
  }
  rec.validate();
  return rec;
}

}  // namespace sznet
