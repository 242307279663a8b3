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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace sznet {

// Channels x time. Rows are contiguous so per-channel slices are cheap.
using SampleMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kCanonicalSampleRateHz = 250.0;

// Background plus the eight clinical seizure types, in the order the label CSV
// encodes them (0..8).
enum class SeizureType : std::uint8_t {
  kBackground = 0,
  kFocalNonSpecific = 1,
  kGeneralisedNonSpecific = 2,
  kSimplePartial = 3,
  kComplexPartial = 4,
  kAbsence = 5,
  kTonic = 6,
  kClonic = 7,
  kTonicClonic = 8,
};

inline constexpr int kNumSeizureTypes = 8;

std::string_view seizure_type_name(SeizureType type);
SeizureType seizure_type_from_code(int code);
inline int code(SeizureType type) { return static_cast<int>(type); }
inline bool is_seizure(SeizureType type) {
  return type != SeizureType::kBackground;
}

struct Recording {
  std::string patient_id;
  double sample_rate_hz = kCanonicalSampleRateHz;
  std::vector<std::string> channels;
  SampleMatrix samples;  // channels.size() x length, microvolts

  Eigen::Index num_channels() const { return samples.rows(); }
  Eigen::Index length() const { return samples.cols(); }
  double duration_s() const {
    return static_cast<double>(length()) / sample_rate_hz;
  }

  // Throws ValidationError unless rate > 0, at least two channels, and one
  // label per sample row.
  void validate() const;
};

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;
  SeizureType type = SeizureType::kBackground;
};

// Per-patient labelled intervals. Time not covered by any interval is
// background.
class AnnotationSet {
 public:
  // Throws ValidationError on start >= end or overlap with an existing interval
  // of the same patient.
  void add(const std::string& patient_id, const Interval& interval);

  const std::vector<Interval>& intervals(const std::string& patient_id) const;
  bool has_patient(const std::string& patient_id) const {
    return by_patient_.count(patient_id) != 0;
  }
  const std::map<std::string, std::vector<Interval>>& patients() const {
    return by_patient_;
  }
  bool empty() const { return by_patient_.empty(); }

  // Inserting a patient with no intervals marks it as explicitly all
  // background.
  void touch(const std::string& patient_id) { by_patient_[patient_id]; }

 private:
  std::map<std::string, std::vector<Interval>> by_patient_;
};

// Parses `patient_id,start_s,end_s,class`. Header row required unless the
// text is empty.
AnnotationSet load_labels(std::string_view csv_text);
std::string format_labels(const AnnotationSet& annotations);

struct Epoch {
  std::string patient_id;
  int index = 0;
  SampleMatrix window;  // channels x samples_per_epoch
  SeizureType label = SeizureType::kBackground;
};

struct EpochSet {
  double sample_rate_hz = kCanonicalSampleRateHz;
  Eigen::Index samples_per_epoch = 0;
  std::vector<Epoch> epochs;
};

Eigen::Index samples_per_epoch(double sample_rate_hz);

// Class covering most of [index, index + 1) seconds; exact ties go to the
// seizure class.
SeizureType epoch_label(const std::vector<Interval>& intervals, int index);

// Consecutive non-overlapping 1 s epochs; trailing partial second dropped.
EpochSet segment_epochs(const Recording& recording,
                        const AnnotationSet& annotations);

// Plain-text recording: optional `# sample_rate_hz=<rate>` comment, a header
// row of channel labels, then one row of values per sample.
Recording parse_csv_recording(std::string_view text, std::string patient_id,
                              double default_rate_hz = kCanonicalSampleRateHz);

}  // namespace sznet
