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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sznet/features.hpp"
#include "sznet/recording.hpp"

namespace sznet {

// Provenance of one epoch: which patient, where in the recording, and its
// class code (0 background, 1..8 seizure type; 0/1 after binarisation).
struct EpochRef {
  std::string patient_id;
  int epoch_index = 0;
  int label = 0;
};

// Patterns of many epochs sharing one shape and family order.
struct PatternSet {
  Eigen::Index n_channels = 0;
  std::size_t n_bands = kNumBands;
  std::vector<FeatureFamily> families;
  std::vector<Eigen::MatrixXd> patterns;
  std::vector<EpochRef> epochs;

  std::size_t size() const { return patterns.size(); }
  bool empty() const { return patterns.empty(); }
  Eigen::Index rows() const {
    return static_cast<Eigen::Index>(n_bands) * n_channels;
  }
  Eigen::Index cols() const {
    return n_channels * static_cast<Eigen::Index>(families.size());
  }

  void append(const PatternMatrix& pattern, EpochRef ref);
  void append_set(const PatternSet& other);
  PatternSet subset(std::span<const std::size_t> indices) const;
  // Column blocks of the requested families, in stacking order.
  PatternSet select_families(std::vector<FeatureFamily> wanted) const;
  std::vector<int> labels() const;
};

// Little-endian container:
//   magic "SZPATSET" | u32 version | u32 n_channels | u32 n_families |
//   u32 n_bands | u64 n_epochs | u8[n_families] family codes |
//   u32 n_patients | n_patients x (u16 length, bytes) |
//   n_epochs x rows*cols f32 row-major | n_epochs x u8 label |
//   n_epochs x (u32 patient index, u32 epoch index)
inline constexpr std::string_view kPatternMagic = "SZPATSET";
inline constexpr std::uint32_t kPatternVersion = 1;

std::string serialize_patterns(const PatternSet& set);
PatternSet deserialize_patterns(std::string_view bytes);

}  // namespace sznet
