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
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sznet/features.hpp"
#include "sznet/nn/network.hpp"

namespace sznet::nn {

// A trained detector together with what is needed to feed it new patterns.
struct ModelBundle {
  Network network;
  NormalizationStats normalization;
  std::vector<FeatureFamily> families;
  Eigen::Index n_channels = 0;
  std::size_t n_bands = kNumBands;
  std::uint64_t seed = 0;
};

inline constexpr int kModelFormatVersion = 1;

// JSON envelope describing the architecture, feature layout and seed, plus a
// flat little-endian f32 sidecar holding every parameter tensor and the
// normalisation statistics at the byte offsets listed in the envelope.
std::pair<std::string, std::string> encode_model(const ModelBundle& model,
                                                 const std::string& sidecar_name);
ModelBundle decode_model(std::string_view json_text, std::string_view sidecar);

std::filesystem::path sidecar_path(const std::filesystem::path& json_path);
void save_model(const std::filesystem::path& json_path, const ModelBundle& model);
ModelBundle load_model(const std::filesystem::path& json_path);

}  // namespace sznet::nn
