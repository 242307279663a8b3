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

#include "sznet/config.hpp"

#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sznet/error.hpp"
#include "sznet/io.hpp"

namespace sznet {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"paths", {"recordings", "labels", "out", "patterns", "eval_patterns", "model"}},
      {"synth",
       {"patients", "id_prefix", "channels", "duration_s", "sample_rate_hz", "seed",
        "seizures_per_patient", "seizure_duration_s", "seizure_types",
        "background_coupling", "seizure_coupling", "background_amplitude_uv",
        "seizure_amplitude_uv", "component_hz", "frequency_spread", "phase_noise",
        "noise_uv", "patient_variability"}},
      {"features", {"families", "bands", "entropy_bins", "num_taps", "resample"}},
      {"train",
       {"architecture", "filters", "kernel", "hidden_units", "epochs", "batch_size",
        "patience", "validation_fraction", "learning_rate", "seed", "balance",
        "cv_folds"}},
      {"eval", {"per_type", "onset_window", "patient_split"}},
  };
  return keys;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: " + key + ": '" + text + "' is not a number");
  }
}

// One value applies to every band; otherwise exactly one per band.
void read_band_array(const pt::ptree& section, const std::string& key, BandArray& out) {
  const auto value = section.get_optional<std::string>(key);
  if (!value) return;
  const auto items = split_list(*value);
  if (items.size() == 1) {
    out.fill(to_double(key, items[0]));
  } else if (items.size() == kNumBands) {
    for (std::size_t b = 0; b < kNumBands; ++b) out[b] = to_double(key, items[b]);
  } else {
    throw ValidationError("config: " + key + " needs 1 or " + std::to_string(kNumBands) +
                          " values");
  }
}

template <typename T>
void read(const pt::ptree& section, const std::string& name, const std::string& key,
          T& out) {
  try {
    if (const auto v = section.get_optional<T>(key)) out = *v;
  } catch (const pt::ptree_bad_data&) {
    throw ValidationError("config: [" + name + "] " + key + ": invalid value '" +
                          section.get<std::string>(key) + "'");
  }
}

}  // namespace

std::filesystem::path PipelineConfig::patterns_path() const {
  return paths.patterns.empty() ? paths.out / "patterns.szp" : paths.patterns;
}

std::filesystem::path PipelineConfig::eval_patterns_path() const {
  return paths.eval_patterns.empty() ? patterns_path() : paths.eval_patterns;
}

std::filesystem::path PipelineConfig::model_path() const {
  return paths.model.empty() ? paths.out / "model.json" : paths.model;
}

void PipelineConfig::validate() const {
  synth.validate();
  canonical_families(features.families);
  validate_bands(features.bands);
  if (features.entropy_bins < 0 || features.entropy_bins == 1) {
    throw ValidationError("config: entropy_bins must be 0 (auto) or >= 2");
  }
  if (features.num_taps < 3 || features.num_taps % 2 == 0) {
    throw ValidationError("config: num_taps must be odd and >= 3");
  }
  const auto& net = detector.network;
  if (net.filters < 1 || net.kernel < 1 || net.kernel % 2 == 0 || net.hidden_units < 1) {
    throw ValidationError("config: filters, hidden_units >= 1 and an odd kernel required");
  }
  const auto& tr = detector.train;
  if (tr.epochs < 1 || tr.batch_size < 1 || tr.patience < 1) {
    throw ValidationError("config: epochs, batch_size and patience must be positive");
  }
  if (!(tr.validation_fraction >= 0.0 && tr.validation_fraction < 1.0)) {
    throw ValidationError("config: validation_fraction must lie in [0, 1)");
  }
  if (!(tr.adam.learning_rate > 0.0)) {
    throw ValidationError("config: learning_rate must be positive");
  }
  if (eval.cv_folds == 1 || eval.cv_folds < 0) {
    throw ValidationError("config: cv_folds must be 0 (off) or >= 2");
  }
  if (eval.onset_window < 0) throw ValidationError("config: onset_window must be >= 0");
  if (!(eval.patient_split >= 0.0 && eval.patient_split < 1.0)) {
    throw ValidationError("config: patient_split must be 0 (off) or in (0, 1)");
  }
}

PipelineConfig parse_config(std::string_view ini_text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(ini_text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      throw ValidationError("config: unknown section [" + section + "]");
    }
    if (body.empty() && !body.data().empty()) {
      throw ValidationError("config: key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) {
      if (it->second.count(key) == 0) {
        throw ValidationError("config: unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  PipelineConfig c;
  const pt::ptree empty;
  auto section = [&](const char* name) -> const pt::ptree& {
    const auto child = tree.get_child_optional(name);
    return child ? *child : empty;
  };

  const auto& paths = section("paths");
  auto path_key = [&](const char* key, std::filesystem::path& out) {
    if (const auto v = paths.get_optional<std::string>(key)) out = *v;
  };
  path_key("recordings", c.paths.recordings);
  path_key("labels", c.paths.labels);
  path_key("out", c.paths.out);
  path_key("patterns", c.paths.patterns);
  path_key("eval_patterns", c.paths.eval_patterns);
  path_key("model", c.paths.model);

  const auto& s = section("synth");
  auto& cohort = c.synth;
  read(s, "synth", "patients", cohort.n_patients);
  read(s, "synth", "id_prefix", cohort.id_prefix);
  read(s, "synth", "channels", cohort.base.n_channels);
  read(s, "synth", "duration_s", cohort.base.duration_s);
  read(s, "synth", "sample_rate_hz", cohort.base.sample_rate_hz);
  read(s, "synth", "seed", cohort.base.seed);
  read(s, "synth", "seizures_per_patient", cohort.seizures_per_patient);
  read(s, "synth", "seizure_duration_s", cohort.seizure_duration_s);
  if (const auto v = s.get_optional<std::string>("seizure_types")) {
    cohort.seizure_types.clear();
    for (const auto& item : split_list(*v)) {
      const int t = static_cast<int>(to_double("seizure_types", item));
      if (t < 1 || t > kNumSeizureTypes) {
        throw ValidationError("config: seizure_types entries must be 1..8");
      }
      cohort.seizure_types.push_back(seizure_type_from_code(t));
    }
  }
  read_band_array(s, "background_coupling", cohort.base.background.coupling);
  read_band_array(s, "seizure_coupling", cohort.base.seizure.coupling);
  read_band_array(s, "background_amplitude_uv", cohort.base.background.amplitude_uv);
  read_band_array(s, "seizure_amplitude_uv", cohort.base.seizure.amplitude_uv);
  read_band_array(s, "component_hz", cohort.base.component_hz);
  read(s, "synth", "frequency_spread", cohort.base.frequency_spread);
  read(s, "synth", "phase_noise", cohort.base.phase_noise);
  read(s, "synth", "noise_uv", cohort.base.noise_uv);
  read(s, "synth", "patient_variability", cohort.patient_variability);

  const auto& f = section("features");
  if (const auto v = f.get_optional<std::string>("families")) {
    c.features.families.clear();
    for (const auto& item : split_list(*v)) c.features.families.push_back(family_from_name(item));
  }
  if (const auto v = f.get_optional<std::string>("bands")) {
    const auto items = split_list(*v);
    if (items.size() != kNumBands) {
      throw ValidationError("config: bands needs " + std::to_string(kNumBands) +
                            " low-high entries");
    }
    for (std::size_t b = 0; b < kNumBands; ++b) {
      const auto dash = items[b].find('-', 1);
      if (dash == std::string::npos) {
        throw ValidationError("config: band '" + items[b] + "' is not low-high");
      }
      c.features.bands[b] = {to_double("bands", items[b].substr(0, dash)),
                             to_double("bands", items[b].substr(dash + 1))};
    }
  }
  read(f, "features", "entropy_bins", c.features.entropy_bins);
  read(f, "features", "num_taps", c.features.num_taps);
  read(f, "features", "resample", c.resample);

  const auto& t = section("train");
  if (const auto v = t.get_optional<std::string>("architecture")) {
    c.detector.architecture = nn::parse_architecture(*v);
  }
  read(t, "train", "filters", c.detector.network.filters);
  read(t, "train", "kernel", c.detector.network.kernel);
  read(t, "train", "hidden_units", c.detector.network.hidden_units);
  read(t, "train", "epochs", c.detector.train.epochs);
  read(t, "train", "batch_size", c.detector.train.batch_size);
  read(t, "train", "patience", c.detector.train.patience);
  read(t, "train", "validation_fraction", c.detector.train.validation_fraction);
  read(t, "train", "learning_rate", c.detector.train.adam.learning_rate);
  read(t, "train", "seed", c.detector.seed);
  read(t, "train", "balance", c.detector.balance);
  read(t, "train", "cv_folds", c.eval.cv_folds);

  const auto& e = section("eval");
  read(e, "eval", "per_type", c.eval.per_type);
  read(e, "eval", "onset_window", c.eval.onset_window);
  read(e, "eval", "patient_split", c.eval.patient_split);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

void validate_for(const PipelineConfig& config, Command command) {
  config.validate();
  auto need = [](const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw ValidationError(std::string("config: ") + what + " path not set");
    if (!std::filesystem::exists(p)) {
      throw ValidationError(std::string("config: ") + what + " '" + p.string() +
                            "' does not exist");
    }
  };
  if (std::filesystem::exists(config.paths.out) &&
      !std::filesystem::is_directory(config.paths.out)) {
    throw ValidationError("config: output '" + config.paths.out.string() +
                          "' is not a directory");
  }
  switch (command) {
    case Command::kSynth:
      break;
    case Command::kExtract:
      need(config.paths.recordings, "recordings");
      if (!std::filesystem::is_directory(config.paths.recordings)) {
        throw ValidationError("config: recordings must be a directory");
      }
      need(config.paths.labels, "labels");
      break;
    case Command::kTrain:
    case Command::kStats:
      need(config.patterns_path(), "patterns");
      break;
    case Command::kEval:
      need(config.model_path(), "model");
      need(config.eval_patterns_path(), "eval patterns");
      if (config.eval.per_type || config.eval.onset_window > 0 ||
          config.eval.patient_split > 0.0) {
        need(config.patterns_path(), "training patterns");
      }
      break;
    case Command::kSensitivity:
      need(config.model_path(), "model");
      need(config.eval_patterns_path(), "eval patterns");
      break;
  }
}

}  // namespace sznet
