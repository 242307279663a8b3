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

#include "sznet/edf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "sznet/error.hpp"

namespace sznet {
namespace {

constexpr std::size_t kFixedHeaderBytes = 256;
constexpr std::size_t kBytesPerSignalHeader = 256;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(' ');
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(' ');
  return s.substr(first, last - first + 1);
}

// Sequential reader over the ASCII header that remembers where each field
// starts so errors can point at it.
class HeaderCursor {
 public:
  explicit HeaderCursor(std::string_view bytes) : bytes_(bytes) {}

  std::string_view field(std::size_t width, const char* name) {
    if (pos_ + width > bytes_.size()) {
      throw ParseError(pos_, name, "EDF header truncated");
    }
    const auto out = bytes_.substr(pos_, width);
    for (char c : out) {
      if (static_cast<unsigned char>(c) < 0x20 ||
          static_cast<unsigned char>(c) > 0x7e) {
        throw ParseError(pos_, name, "non-printable byte in EDF header");
      }
    }
    last_ = pos_;
    pos_ += width;
    return out;
  }

  double number(std::size_t width, const char* name) {
    const std::string text(trim(field(width, name)));
    if (text.empty()) throw ParseError(last_, name, "empty numeric field");
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(value)) {
      throw ParseError(last_, name, "invalid number '" + text + "'");
    }
    return value;
  }

  long integer(std::size_t width, const char* name) {
    const double value = number(width, name);
    if (value != std::floor(value)) {
      throw ParseError(last_, name, "expected an integer");
    }
    return static_cast<long>(value);
  }

  std::size_t last_offset() const { return last_; }
  std::size_t position() const { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::size_t last_ = 0;
};

struct SignalHeader {
  std::string label;
  double physical_min = 0.0;
  double physical_max = 0.0;
  double digital_min = 0.0;
  double digital_max = 0.0;
  long samples_per_record = 0;
};

Eigen::VectorXd resample_linear(const Eigen::VectorXd& x, double from_rate,
                                double to_rate, Eigen::Index out_length) {
  Eigen::VectorXd out(out_length);
  const Eigen::Index last = x.size() - 1;
  for (Eigen::Index k = 0; k < out_length; ++k) {
    const double src = static_cast<double>(k) * from_rate / to_rate;
    const auto lo = std::min<Eigen::Index>(static_cast<Eigen::Index>(src), last);
    const auto hi = std::min<Eigen::Index>(lo + 1, last);
    const double frac = src - static_cast<double>(lo);
    out[k] = (1.0 - frac) * x[lo] + frac * x[hi];
  }
  return out;
}

void put_field(std::string& out, std::string_view value, std::size_t width) {
  std::string padded(value.substr(0, width));
  padded.resize(width, ' ');
  out += padded;
}

std::string format_number(double value) {
  char buf[32];
  for (int digits = 8; digits >= 1; --digits) {
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    if (std::string_view(buf).size() <= 8) return buf;
  }
  throw ValidationError("value " + std::to_string(value) +
                        " does not fit an 8-character EDF field");
}

// Smallest value >= m (to four significant digits) that fits an EDF field.
double physical_bound(double m) {
  if (!(m > 0.0)) return 1.0;
  const double scale = std::pow(10.0, std::floor(std::log10(m)) - 3.0);
  const double rounded = std::ceil(m / scale) * scale;
  const std::string text = format_number(-rounded);
  const double parsed = -std::strtod(text.c_str(), nullptr);
  return parsed;
}

}  // namespace

Recording parse_edf(std::string_view bytes, const EdfReadOptions& options) {
  if (bytes.size() < kFixedHeaderBytes) {
    throw ParseError(bytes.size(), "header", "EDF header truncated");
  }
  HeaderCursor cur(bytes);
  const auto version = trim(cur.field(8, "version"));
  if (version != "0") {
    throw ParseError(cur.last_offset(), "version",
                     "unsupported EDF version '" + std::string(version) + "'");
  }
  const std::string patient(trim(cur.field(80, "patient")));
  cur.field(80, "recording");
  cur.field(8, "startdate");
  cur.field(8, "starttime");
  const long header_bytes = cur.integer(8, "header_bytes");
  const std::size_t header_bytes_offset = cur.last_offset();
  cur.field(44, "reserved");
  const long num_records = cur.integer(8, "num_records");
  const std::size_t num_records_offset = cur.last_offset();
  const double record_duration = cur.number(8, "record_duration");
  if (!(record_duration > 0.0)) {
    throw ParseError(cur.last_offset(), "record_duration",
                     "record duration must be positive");
  }
  const long ns = cur.integer(4, "num_signals");
  if (ns < 1) {
    throw ParseError(cur.last_offset(), "num_signals",
                     "signal count must be positive");
  }
  const auto n = static_cast<std::size_t>(ns);
  if (header_bytes < 0 ||
      static_cast<std::size_t>(header_bytes) !=
          kFixedHeaderBytes + kBytesPerSignalHeader * n) {
    throw ParseError(header_bytes_offset, "header_bytes",
                     "header byte count inconsistent with signal count");
  }

  std::vector<SignalHeader> signals(n);
  for (auto& s : signals) s.label = std::string(trim(cur.field(16, "label")));
  for (std::size_t i = 0; i < n; ++i) cur.field(80, "transducer");
  for (std::size_t i = 0; i < n; ++i) cur.field(8, "physical_dimension");
  for (auto& s : signals) s.physical_min = cur.number(8, "physical_min");
  for (auto& s : signals) s.physical_max = cur.number(8, "physical_max");
  for (auto& s : signals) s.digital_min = cur.number(8, "digital_min");
  std::vector<std::size_t> digital_max_offsets(n);
  for (std::size_t i = 0; i < n; ++i) {
    signals[i].digital_max = cur.number(8, "digital_max");
    digital_max_offsets[i] = cur.last_offset();
  }
  for (std::size_t i = 0; i < n; ++i) cur.field(80, "prefiltering");
  for (auto& s : signals) {
    s.samples_per_record = cur.integer(8, "samples_per_record");
    if (s.samples_per_record < 1) {
      throw ParseError(cur.last_offset(), "samples_per_record",
                       "samples per record must be positive");
    }
  }
  for (std::size_t i = 0; i < n; ++i) cur.field(32, "signal_reserved");

  for (std::size_t i = 0; i < n; ++i) {
    if (signals[i].digital_max == signals[i].digital_min) {
      throw ParseError(digital_max_offsets[i], "digital_max",
                       "digital_min equals digital_max for signal '" +
                           signals[i].label + "'");
    }
  }

  std::size_t record_bytes = 0;
  for (const auto& s : signals) {
    record_bytes += 2 * static_cast<std::size_t>(s.samples_per_record);
  }
  const std::size_t data_bytes = bytes.size() - cur.position();
  std::size_t records = 0;
  if (num_records == -1) {
    if (data_bytes % record_bytes != 0) {
      throw ParseError(cur.position() + (data_bytes / record_bytes) * record_bytes,
                       "data_record", "truncated data record");
    }
    records = data_bytes / record_bytes;
  } else if (num_records < 0) {
    throw ParseError(num_records_offset, "num_records",
                     "record count must be -1 or non-negative");
  } else {
    records = static_cast<std::size_t>(num_records);
    if (data_bytes < records * record_bytes) {
      throw ParseError(cur.position() + (data_bytes / record_bytes) * record_bytes,
                       "data_record", "truncated data record");
    }
  }

  std::vector<Eigen::VectorXd> physical(n);
  std::vector<double> gain(n), offset(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = signals[i];
    physical[i].resize(static_cast<Eigen::Index>(records) * s.samples_per_record);
    gain[i] = (s.physical_max - s.physical_min) / (s.digital_max - s.digital_min);
    offset[i] = s.physical_min - s.digital_min * gain[i];
  }
  const auto* data =
      reinterpret_cast<const unsigned char*>(bytes.data() + cur.position());
  std::size_t pos = 0;
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto spr = signals[i].samples_per_record;
      for (long k = 0; k < spr; ++k, pos += 2) {
        const auto raw = static_cast<std::int16_t>(
            static_cast<std::uint16_t>(data[pos]) |
            static_cast<std::uint16_t>(data[pos + 1]) << 8);
        physical[i][static_cast<Eigen::Index>(r) * spr + k] =
            gain[i] * static_cast<double>(raw) + offset[i];
      }
    }
  }

  Recording rec;
  rec.patient_id = patient.substr(0, patient.find(' '));
  const double first_rate =
      static_cast<double>(signals[0].samples_per_record) / record_duration;
  bool uniform = true;
  for (const auto& s : signals) {
    uniform = uniform && s.samples_per_record == signals[0].samples_per_record;
    rec.channels.push_back(s.label);
  }
  if (uniform && !options.resample) {
    rec.sample_rate_hz = first_rate;
    rec.samples.resize(static_cast<Eigen::Index>(n), physical[0].size());
    for (std::size_t i = 0; i < n; ++i) {
      rec.samples.row(static_cast<Eigen::Index>(i)) = physical[i].transpose();
    }
    return rec;
  }
  if (!options.resample) {
    throw ValidationError(
        "EDF signals have heterogeneous sample rates; enable resampling to "
        "read this file");
  }
  const double duration = static_cast<double>(records) * record_duration;
  const auto out_length =
      static_cast<Eigen::Index>(std::floor(duration * options.target_rate_hz + 1e-9));
  rec.sample_rate_hz = options.target_rate_hz;
  rec.samples.resize(static_cast<Eigen::Index>(n), out_length);
  for (std::size_t i = 0; i < n; ++i) {
    const double rate =
        static_cast<double>(signals[i].samples_per_record) / record_duration;
    rec.samples.row(static_cast<Eigen::Index>(i)) =
        resample_linear(physical[i], rate, options.target_rate_hz, out_length)
            .transpose();
  }
  return rec;
}

std::string write_edf(const Recording& recording) {
  recording.validate();
  const double rate = recording.sample_rate_hz;
  if (rate != std::floor(rate)) {
    throw ValidationError("EDF writer requires an integer sample rate");
  }
  const auto spr = static_cast<Eigen::Index>(rate);
  if (recording.length() % spr != 0) {
    throw ValidationError("EDF writer requires a whole number of seconds");
  }
  const auto records = recording.length() / spr;
  const auto n = static_cast<std::size_t>(recording.num_channels());

  std::string out;
  out.reserve(kFixedHeaderBytes + kBytesPerSignalHeader * n +
              static_cast<std::size_t>(recording.samples.size()) * 2);
  put_field(out, "0", 8);
  put_field(out, recording.patient_id.empty() ? "X" : recording.patient_id, 80);
  put_field(out, "Startdate X X X X", 80);
  put_field(out, "01.01.00", 8);
  put_field(out, "00.00.00", 8);
  put_field(out, std::to_string(kFixedHeaderBytes + kBytesPerSignalHeader * n), 8);
  put_field(out, "", 44);
  put_field(out, std::to_string(records), 8);
  put_field(out, "1", 8);
  put_field(out, std::to_string(n), 4);

  constexpr double kDigitalMin = -32768.0;
  constexpr double kDigitalMax = 32767.0;
  std::vector<double> bound(n);
  for (std::size_t i = 0; i < n; ++i) {
    bound[i] = physical_bound(
        recording.samples.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 0; i < n; ++i) put_field(out, recording.channels[i], 16);
  for (std::size_t i = 0; i < n; ++i) put_field(out, "", 80);
  for (std::size_t i = 0; i < n; ++i) put_field(out, "uV", 8);
  for (std::size_t i = 0; i < n; ++i) put_field(out, format_number(-bound[i]), 8);
  for (std::size_t i = 0; i < n; ++i) put_field(out, format_number(bound[i]), 8);
  for (std::size_t i = 0; i < n; ++i) put_field(out, "-32768", 8);
  for (std::size_t i = 0; i < n; ++i) put_field(out, "32767", 8);
  for (std::size_t i = 0; i < n; ++i) put_field(out, "", 80);
  for (std::size_t i = 0; i < n; ++i) put_field(out, std::to_string(spr), 8);
  for (std::size_t i = 0; i < n; ++i) put_field(out, "", 32);

  for (Eigen::Index r = 0; r < records; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double pmin = -bound[i];
      const double scale = (kDigitalMax - kDigitalMin) / (2.0 * bound[i]);
      for (Eigen::Index k = 0; k < spr; ++k) {
        const double x = recording.samples(static_cast<Eigen::Index>(i), r * spr + k);
        const double d = std::clamp(std::round((x - pmin) * scale + kDigitalMin),
                                    kDigitalMin, kDigitalMax);
        const auto raw = static_cast<std::uint16_t>(static_cast<std::int16_t>(d));
        out.push_back(static_cast<char>(raw & 0xff));
        out.push_back(static_cast<char>(raw >> 8));
      }
    }
  }
  return out;
}

}  // namespace sznet
