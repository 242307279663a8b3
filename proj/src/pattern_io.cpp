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
#include <bit>
#include <cstring>
#include <map>

#include "sznet/error.hpp"
#include "sznet/pattern_set.hpp"

namespace sznet {
namespace {

template <typename T>
void put(std::string& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* field) {
    need(sizeof(T), field);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string_view take(std::size_t n, const char* field) {
    need(n, field);
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* field) const {
    if (pos_ + n > bytes_.size()) throw ParseError(pos_, field, "pattern file truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void PatternSet::append(const PatternMatrix& pattern, EpochRef ref) {
  if (empty() && families.empty()) {
    n_channels = pattern.n_channels;
    n_bands = pattern.n_bands;
    families = pattern.families;
  }
  if (pattern.families != families || pattern.n_channels != n_channels ||
      pattern.n_bands != n_bands) {
    throw ValidationError("pattern does not match the set's shape");
  }
  patterns.push_back(pattern.values);
  epochs.push_back(std::move(ref));
}

void PatternSet::append_set(const PatternSet& other) {
  if (other.empty()) return;
  if (empty() && families.empty()) {
    n_channels = other.n_channels;
    n_bands = other.n_bands;
    families = other.families;
  }
  if (other.families != families || other.n_channels != n_channels ||
      other.n_bands != n_bands) {
    throw ValidationError("pattern sets have different shapes");
  }
  if (&other == this) {
    const PatternSet copy = other;
    append_set(copy);
    return;
  }
  patterns.insert(patterns.end(), other.patterns.begin(), other.patterns.end());
  epochs.insert(epochs.end(), other.epochs.begin(), other.epochs.end());
}

PatternSet PatternSet::subset(std::span<const std::size_t> indices) const {
  PatternSet out;
  out.n_channels = n_channels;
  out.n_bands = n_bands;
  out.families = families;
  out.patterns.reserve(indices.size());
  out.epochs.reserve(indices.size());
  for (const auto i : indices) {
    out.patterns.push_back(patterns.at(i));
    out.epochs.push_back(epochs.at(i));
  }
  return out;
}

PatternSet PatternSet::select_families(std::vector<FeatureFamily> wanted) const {
  wanted = canonical_families(std::move(wanted));
  std::vector<Eigen::Index> offsets;
  for (const auto f : wanted) {
    const auto it = std::find(families.begin(), families.end(), f);
    if (it == families.end()) {
      throw ValidationError("pattern set has no '" + std::string(family_name(f)) +
                            "' features");
    }
    offsets.push_back(static_cast<Eigen::Index>(it - families.begin()) * n_channels);
  }
  PatternSet out;
  out.n_channels = n_channels;
  out.n_bands = n_bands;
  out.families = wanted;
  out.epochs = epochs;
  out.patterns.reserve(patterns.size());
  for (const auto& p : patterns) {
    Eigen::MatrixXd m(p.rows(), n_channels * static_cast<Eigen::Index>(wanted.size()));
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      m.middleCols(static_cast<Eigen::Index>(k) * n_channels, n_channels) =
          p.middleCols(offsets[k], n_channels);
    }
    out.patterns.push_back(std::move(m));
  }
  return out;
}

std::vector<int> PatternSet::labels() const {
  std::vector<int> out;
  out.reserve(epochs.size());
  for (const auto& e : epochs) out.push_back(e.label);
  return out;
}

std::string serialize_patterns(const PatternSet& set) {
  std::string out(kPatternMagic);
  put<std::uint32_t>(out, kPatternVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(set.n_channels));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(set.families.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(set.n_bands));
  put<std::uint64_t>(out, set.size());
  for (const auto f : set.families) put<std::uint8_t>(out, static_cast<std::uint8_t>(f));

  std::vector<std::string> patients;
  std::map<std::string, std::uint32_t> index;
  for (const auto& e : set.epochs) {
    if (index.emplace(e.patient_id, static_cast<std::uint32_t>(patients.size())).second) {
      patients.push_back(e.patient_id);
    }
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(patients.size()));
  for (const auto& p : patients) {
    if (p.size() > 0xffff) throw ValidationError("patient id too long");
    put<std::uint16_t>(out, static_cast<std::uint16_t>(p.size()));
    out += p;
  }
  for (const auto& m : set.patterns) {
    if (m.rows() != set.rows() || m.cols() != set.cols()) {
      throw ValidationError("pattern shape does not match its set");
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) put<float>(out, static_cast<float>(m(r, c)));
    }
  }
  for (const auto& e : set.epochs) {
    if (e.label < 0 || e.label > 255) throw ValidationError("label out of byte range");
    put<std::uint8_t>(out, static_cast<std::uint8_t>(e.label));
  }
  for (const auto& e : set.epochs) {
    put<std::uint32_t>(out, index.at(e.patient_id));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.epoch_index));
  }
  return out;
}

PatternSet deserialize_patterns(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(kPatternMagic.size(), "magic") != kPatternMagic) {
    throw ParseError(0, "magic", "not a pattern container");
  }
  const auto version_at = in.position();
  if (in.get<std::uint32_t>("version") != kPatternVersion) {
    throw ParseError(version_at, "version", "unsupported pattern container version");
  }
  PatternSet set;
  set.n_channels = in.get<std::uint32_t>("n_channels");
  const auto n_families = in.get<std::uint32_t>("n_families");
  set.n_bands = in.get<std::uint32_t>("n_bands");
  const auto n_epochs = in.get<std::uint64_t>("n_epochs");
  for (std::uint32_t f = 0; f < n_families; ++f) {
    const auto at = in.position();
    const auto c = in.get<std::uint8_t>("families");
    if (c > 2) throw ParseError(at, "families", "unknown feature family code");
    set.families.push_back(static_cast<FeatureFamily>(c));
  }
  const auto n_patients = in.get<std::uint32_t>("n_patients");
  std::vector<std::string> patients;
  for (std::uint32_t p = 0; p < n_patients; ++p) {
    const auto len = in.get<std::uint16_t>("patient_length");
    patients.emplace_back(in.take(len, "patient_id"));
  }
  const auto rows = set.rows();
  const auto cols = set.cols();
  const auto floats = static_cast<std::size_t>(rows * cols);
  if (n_epochs > bytes.size() ||
      (floats > 0 && n_epochs * floats * sizeof(float) > bytes.size())) {
    throw ParseError(in.position(), "patterns", "pattern file truncated");
  }
  set.patterns.reserve(n_epochs);
  for (std::uint64_t e = 0; e < n_epochs; ++e) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = in.get<float>("patterns");
    }
    set.patterns.push_back(std::move(m));
  }
  set.epochs.resize(n_epochs);
  for (auto& e : set.epochs) e.label = in.get<std::uint8_t>("labels");
  for (auto& e : set.epochs) {
    const auto at = in.position();
    const auto p = in.get<std::uint32_t>("patient_index");
    if (p >= patients.size()) throw ParseError(at, "patient_index", "patient index out of range");
    e.patient_id = patients[p];
    e.epoch_index = static_cast<int>(in.get<std::uint32_t>("epoch_index"));
  }
  if (!in.done()) throw ParseError(in.position(), "trailer", "unexpected trailing bytes");
  return set;
}

}  // namespace sznet
