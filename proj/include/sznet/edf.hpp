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

#include <string>
#include <string_view>

#include "sznet/recording.hpp"

namespace sznet {

struct EdfReadOptions {
  // Signals whose rate differs from the first signal are rejected unless this
  // is set, in which case every signal is linearly resampled to target_rate_hz.
  bool resample = false;
  double target_rate_hz = kCanonicalSampleRateHz;
};

// Plain EDF (no EDF+ annotation signals). The patient id is taken from the
// first token of the patient field; callers usually override it with the file
// stem.
Recording parse_edf(std::string_view bytes, const EdfReadOptions& options = {});

// Writes 1 s data records with a symmetric physical range sized to the data.
// Requires the recording length to be a whole number of seconds.
std::string write_edf(const Recording& recording);

}  // namespace sznet
