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
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

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

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text, const std::string& what) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ValidationError("invalid number '" + s + "' for " + what);
  }
  return v;
}

bool overlaps(const Interval& a, const Interval& b) {
  return a.start_s < b.end_s && b.start_s < a.end_s;
}

}  // namespace

std::string_view seizure_type_name(SeizureType type) {
  static constexpr std::array<std::string_view, 9> kNames = {
      "background",        "focal_non_specific", "generalised_non_specific",
      "simple_partial",    "complex_partial",    "absence",
      "tonic",             "clonic",             "tonic_clonic"};
  return kNames[static_cast<std::size_t>(type)];
}

SeizureType seizure_type_from_code(int c) {
  if (c < 0 || c > kNumSeizureTypes) {
    throw ValidationError("unknown class code " + std::to_string(c) +
                          " (expected 0..8)");
  }
  return static_cast<SeizureType>(c);
}

void AnnotationSet::add(const std::string& patient_id, const Interval& interval) {
  if (!(interval.start_s < interval.end_s)) {
    throw ValidationError("interval for patient '" + patient_id +
                          "' must have start_s < end_s");
  }
  auto& list = by_patient_[patient_id];
  for (const auto& other : list) {
    if (overlaps(other, interval)) {
      throw ValidationError("overlapping intervals for patient '" + patient_id + "'");
    }
  }
  const auto at = std::upper_bound(
      list.begin(), list.end(), interval,
      [](const Interval& a, const Interval& b) { return a.start_s < b.start_s; });
  list.insert(at, interval);
}

const std::vector<Interval>& AnnotationSet::intervals(
    const std::string& patient_id) const {
  static const std::vector<Interval> kNone;
  const auto it = by_patient_.find(patient_id);
  return it == by_patient_.end() ? kNone : it->second;
}

AnnotationSet load_labels(std::string_view csv_text) {
  AnnotationSet out;
  // Row numbers (1-based, header = row 1) of each accepted interval.
  std::map<std::string, std::vector<std::pair<Interval, int>>> seen;
  std::istringstream in{std::string(csv_text)};
  std::string line;
  int row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    if (!header_seen) {
      if (fields.size() != 4 || fields[0] != "patient_id" ||
          fields[1] != "start_s" || fields[2] != "end_s" || fields[3] != "class") {
        throw ValidationError(
            "label CSV must start with header 'patient_id,start_s,end_s,class'");
      }
      header_seen = true;
      continue;
    }
    const std::string where = "row " + std::to_string(row);
    if (fields.size() != 4) {
      throw ValidationError(where + ": expected 4 columns");
    }
    if (fields[0].empty()) throw ValidationError(where + ": empty patient_id");
    Interval iv;
    iv.start_s = parse_double(fields[1], where + " start_s");
    iv.end_s = parse_double(fields[2], where + " end_s");
    int code_value = 0;
    const auto [ptr, ec] = std::from_chars(
        fields[3].data(), fields[3].data() + fields[3].size(), code_value);
    if (ec != std::errc() || ptr != fields[3].data() + fields[3].size()) {
      throw ValidationError(where + ": unknown class code '" +
                            std::string(fields[3]) + "'");
    }
    try {
      iv.type = seizure_type_from_code(code_value);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (!(iv.start_s < iv.end_s)) {
      throw ValidationError(where + ": start_s must be < end_s");
    }
    const std::string patient(fields[0]);
    for (const auto& [other, other_row] : seen[patient]) {
      if (overlaps(other, iv)) {
        throw ValidationError("overlapping intervals for patient '" + patient +
                              "' in rows " + std::to_string(other_row) + " and " +
                              std::to_string(row));
      }
    }
    seen[patient].emplace_back(iv, row);
    out.add(patient, iv);
  }
  return out;
}

std::string format_labels(const AnnotationSet& annotations) {
  std::ostringstream out;
  out.precision(17);
  out << "patient_id,start_s,end_s,class\n";
  for (const auto& [patient, list] : annotations.patients()) {
    for (const auto& iv : list) {
      out << patient << ',' << iv.start_s << ',' << iv.end_s << ',' << code(iv.type)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace sznet
