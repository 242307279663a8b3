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

#include "sznet/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "sznet/edf.hpp"
#include "sznet/error.hpp"
#include "sznet/extract.hpp"
#include "sznet/io.hpp"
#include "sznet/nn/model_io.hpp"
#include "sznet/pattern_set.hpp"
#include "sznet/synth.hpp"

namespace sznet {
namespace {

namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_integral(double v) { return std::floor(v) == v; }

PatternSet load_patterns(const fs::path& path) {
  auto set = deserialize_patterns(read_file(path));
  if (set.empty()) throw ValidationError("pattern set '" + path.string() + "' is empty");
  return set;
}

}  // namespace

SynthOutput cmd_synth(const PipelineConfig& config) {
  validate_for(config, Command::kSynth);
  const auto patients = cohort_configs(config.synth);
  const auto& base = config.synth.base;
  if (!is_integral(base.sample_rate_hz) || !is_integral(base.duration_s)) {
    throw ValidationError("synth: EDF output needs an integer rate and whole seconds");
  }

  SynthOutput out;
  const fs::path dir = config.paths.out / "recordings";
  ensure_dir(dir);
  AnnotationSet labels;
  for (const auto& patient : patients) {
    const auto [recording, annotations] = synthesize_recording(patient);
    const auto path = dir / (patient.patient_id + ".edf");
    write_file(path, write_edf(recording));
    out.recordings.push_back(path);

    // Explicit background intervals keep seizure-free patients in the file.
    double cursor = 0.0;
    for (const auto& iv : annotations.intervals(patient.patient_id)) {
      if (iv.start_s > cursor) labels.add(patient.patient_id, {cursor, iv.start_s});
      labels.add(patient.patient_id, iv);
      cursor = iv.end_s;
    }
    if (cursor < patient.duration_s) {
      labels.add(patient.patient_id, {cursor, patient.duration_s});
    }
  }
  out.labels = config.paths.out / "labels.csv";
  write_file(out.labels, format_labels(labels));
  spdlog::info("synth: {} recordings written to {}", out.recordings.size(), dir.string());
  return out;
}

ExtractSummary cmd_extract(const PipelineConfig& config) {
  validate_for(config, Command::kExtract);
  const auto annotations = load_labels(read_file(config.paths.labels));

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config.paths.recordings)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".edf" || ext == ".EDF" || ext == ".csv")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ValidationError("extract: no .edf or .csv recordings in '" +
                          config.paths.recordings.string() + "'");
  }

  ExtractSummary summary;
  PatternSet all;
  for (const auto& file : files) {
    const std::string patient = file.stem().string();
    if (!annotations.has_patient(patient)) {
      spdlog::warn("extract: no labels for '{}', skipped", patient);
      summary.skipped.push_back(patient);
      continue;
    }
    Recording rec;
    if (file.extension() == ".csv") {
      rec = parse_csv_recording(read_file(file), patient);
    } else {
      EdfReadOptions opts;
      opts.resample = config.resample;
      rec = parse_edf(read_file(file), opts);
    }
    rec.patient_id = patient;
    const auto set = extract_patterns(rec, annotations, config.features);
    spdlog::info("extract: {} -> {} patterns", patient, set.size());
    if (all.empty() && all.families.empty()) {
      all = set;
    } else {
      all.append_set(set);
    }
    ++summary.recordings;
  }
  if (summary.recordings == 0) throw ValidationError("extract: no labelled recordings");
  ensure_dir(config.paths.out);
  summary.output = config.patterns_path();
  if (summary.output.has_parent_path()) ensure_dir(summary.output.parent_path());
  write_file(summary.output, serialize_patterns(all));
  summary.patterns = all.size();
  if (!summary.skipped.empty()) {
    spdlog::warn("extract: {} recordings skipped for missing labels", summary.skipped.size());
  }
  return summary;
}

TrainSummary cmd_train(const PipelineConfig& config) {
  validate_for(config, Command::kTrain);
  const auto set = load_patterns(config.patterns_path());

  TrainSummary summary;
  ensure_dir(config.paths.out);
  if (config.eval.cv_folds > 0) {
    auto cv = cross_validate(set, config.eval.cv_folds, config.detector);
    std::string csv = "fold,patients,auc\n";
    nlohmann::json j = {{"folds", nlohmann::json::array()}};
    for (std::size_t f = 0; f < cv.folds.size(); ++f) {
      std::string ids;
      for (const auto& p : cv.folds[f]) ids += (ids.empty() ? "" : ";") + p;
      const double a = cv.fold_auc[f];
      csv += std::to_string(f + 1) + "," + ids + "," + (std::isnan(a) ? "" : number(a)) + "\n";
      j["folds"].push_back({{"fold", f + 1},
                            {"patients", cv.folds[f]},
                            {"auc", std::isnan(a) ? nlohmann::json() : nlohmann::json(a)}});
    }
    csv += "mean,," + number(cv.mean_auc) + "\n";
    j["mean_auc"] = cv.mean_auc;
    write_file(config.paths.out / "cv.csv", csv);
    write_file(config.paths.out / "cv.json", j.dump(2) + "\n");
    spdlog::info("cross-validation: mean AUC {}", cv.mean_auc);
    summary.cv = std::move(cv);
  }

  const auto detector = train_detector(set, config.detector);
  summary.model = config.model_path();
  if (summary.model.has_parent_path()) ensure_dir(summary.model.parent_path());
  nn::save_model(summary.model, detector.model);

  std::string csv = "epoch,train_loss,validation_loss\n";
  const auto& h = detector.history;
  for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
    csv += std::to_string(e + 1) + "," + number(h.train_loss[e]) + "," +
           (e < h.validation_loss.size() ? number(h.validation_loss[e]) : "") + "\n";
  }
  summary.history = config.paths.out / "loss_history.csv";
  write_file(summary.history, csv);
  spdlog::info("train: {} balanced epochs, model written to {}", detector.train_epochs,
               summary.model.string());
  return summary;
}

EvalReport cmd_eval(const PipelineConfig& config) {
  validate_for(config, Command::kEval);
  const auto model = nn::load_model(config.model_path());
  const auto test = load_patterns(config.eval_patterns_path());
  check_compatible(model, test);
  const bool subtasks = config.eval.per_type || config.eval.onset_window > 0 ||
                        config.eval.patient_split > 0.0;
  PatternSet train;
  if (subtasks) {
    train = load_patterns(config.patterns_path());
    check_compatible(model, train);
  }

  auto report = evaluate_model("overall", model, test);
  if (config.eval.per_type) report.per_type = per_type_reports(train, test, config.detector);
  if (config.eval.onset_window > 0) {
    report.subtasks.push_back(
        onset_window_report(train, test, config.eval.onset_window, config.detector));
  }
  if (config.eval.patient_split > 0.0) {
    auto split = patient_split_reports(train, test, config.eval.patient_split, config.detector);
    report.subtasks.push_back(std::move(split.baseline));
    report.subtasks.push_back(std::move(split.patient_specific));
  }

  ensure_dir(config.paths.out);
  write_file(config.paths.out / "report.json", to_json(report).dump(2) + "\n");
  write_file(config.paths.out / "roc.csv", roc_csv(report.roc));
  if (report.defined) {
    spdlog::info("eval: AUC {} Se {} Sp {} at threshold {}", report.auc,
                 report.cutoff.sensitivity, report.cutoff.specificity,
                 report.cutoff.threshold);
  }
  return report;
}

std::string sensitivity_csv(const Eigen::MatrixXd& map, const PatternSet& layout,
                            const BandSet& bands) {
  const Eigen::Index n = layout.n_channels;
  std::string out =
      "# mean squared loss gradient per pattern entry\n"
      "# rows: band block, channel i; columns: feature family block, channel j\n";
  std::string header = "row";
  for (const auto f : layout.families) {
    for (Eigen::Index j = 0; j < n; ++j) {
      header += "," + std::string(family_name(f)) + ":" + std::to_string(j);
    }
  }
  out += header + "\n";
  for (Eigen::Index r = 0; r < map.rows(); ++r) {
    const auto& band = bands[static_cast<std::size_t>(r / n)];
    out += number(band.low_hz) + "-" + number(band.high_hz) + "Hz:" + std::to_string(r % n);
    for (Eigen::Index c = 0; c < map.cols(); ++c) out += "," + number(map(r, c));
    out += "\n";
  }
  return out;
}

Eigen::MatrixXd cmd_sensitivity(const PipelineConfig& config) {
  validate_for(config, Command::kSensitivity);
  const auto model = nn::load_model(config.model_path());
  const auto set = load_patterns(config.eval_patterns_path());
  const auto map = sensitivity_map(model, set);
  ensure_dir(config.paths.out);
  write_file(config.paths.out / "sensitivity.csv",
             sensitivity_csv(map, set, config.features.bands));
  return map;
}

std::vector<FeatureHistogram> cmd_stats(const PipelineConfig& config) {
  validate_for(config, Command::kStats);
  const auto set = load_patterns(config.patterns_path());
  auto hist = feature_class_stats(set);
  ensure_dir(config.paths.out);
  write_file(config.paths.out / "feature_stats.csv", histograms_csv(hist));
  return hist;
}

}  // namespace sznet
