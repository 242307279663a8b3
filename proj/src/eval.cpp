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

#include "sznet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "sznet/error.hpp"

namespace sznet {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("ROC: scores and labels differ in length");
  }
  RocCurve curve;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw ValidationError("ROC: non-finite score");
    (labels[i] != 0 ? curve.positives : curve.negatives) += 1;
  }
  if (curve.positives == 0 || curve.negatives == 0) {
    throw ValidationError("ROC: both classes must be present");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const double p = static_cast<double>(curve.positives);
  const double n = static_cast<double>(curve.negatives);
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == s; ++k) {
      (labels[order[k]] != 0 ? tp : fp) += 1;
    }
    curve.points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p, s});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return std::clamp(area, 0.0, 1.0);
}

Cutoff optimal_cutoff(const RocCurve& curve) {
  if (curve.points.empty()) throw ValidationError("optimal cutoff of an empty curve");
  // Points run from high to low threshold, so >= keeps the last (lowest) tie.
  // Youden's J in integer units (tp * N + tn * P) so exact ties stay ties.
  const auto pos = static_cast<long long>(curve.positives);
  const auto neg = static_cast<long long>(curve.negatives);
  std::size_t best = 0;
  long long best_j = -1;
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    const long long tp = std::llround(curve.points[k].tpr * static_cast<double>(pos));
    const long long fp = std::llround(curve.points[k].fpr * static_cast<double>(neg));
    const long long j = tp * neg + (neg - fp) * pos;
    if (j >= best_j) {
      best_j = j;
      best = k;
    }
  }
  const auto& pt = curve.points[best];
  return {pt.threshold, pt.tpr, 1.0 - pt.fpr};
}

EvalReport evaluate(std::string name, std::span<const double> scores,
                    std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("evaluate: scores and labels differ in length");
  }
  EvalReport report;
  report.name = std::move(name);
  report.epochs = scores.size();
  for (const int l : labels) (l != 0 ? report.positives : report.negatives) += 1;
  if (report.positives == 0 || report.negatives == 0) {
    spdlog::warn("{}: only one class among {} epochs, metrics undefined", report.name,
                 report.epochs);
    return report;
  }
  report.defined = true;
  report.roc = roc_curve(scores, labels);
  report.auc = auc(report.roc);
  report.cutoff = optimal_cutoff(report.roc);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool called = scores[i] >= report.cutoff.threshold;
    const bool actual = labels[i] != 0;
    auto& c = report.confusion;
    (actual ? (called ? c.tp : c.fn) : (called ? c.fp : c.tn)) += 1;
  }
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j = {
      {"name", report.name},
      {"epochs", report.epochs},
      {"positives", report.positives},
      {"negatives", report.negatives},
      {"defined", report.defined},
  };
  if (report.defined) {
    j["auc"] = report.auc;
    j["threshold"] = report.cutoff.threshold;
    j["sensitivity"] = report.cutoff.sensitivity;
    j["specificity"] = report.cutoff.specificity;
    j["cutoff_rule"] = "max sensitivity+specificity, ties to lower threshold";
    j["confusion"] = {{"tp", report.confusion.tp},
                      {"fp", report.confusion.fp},
                      {"tn", report.confusion.tn},
                      {"fn", report.confusion.fn}};
  } else {
    for (const char* key : {"auc", "threshold", "sensitivity", "specificity"}) {
      j[key] = nullptr;
    }
  }
  j["per_type"] = nlohmann::json::array();
  for (const auto& r : report.per_type) j["per_type"].push_back(to_json(r));
  j["subtasks"] = nlohmann::json::array();
  for (const auto& r : report.subtasks) j["subtasks"].push_back(to_json(r));
  return j;
}

std::string roc_csv(const RocCurve& curve) {
  std::string out = "fpr,tpr,threshold\n";
  for (const auto& p : curve.points) {
    out += format_double(p.fpr) + "," + format_double(p.tpr) + "," +
           format_double(p.threshold) + "\n";
  }
  return out;
}

std::vector<std::size_t> undersample_balance(std::span<const EpochRef> epochs,
                                             std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    (epochs[i].label != 0 ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw ValidationError("undersampling needs both seizure and background epochs");
  }
  std::vector<std::size_t> out(epochs.size());
  std::iota(out.begin(), out.end(), 0);
  if (pos.size() > neg.size()) {
    spdlog::warn("undersampling: {} seizure epochs exceed {} background epochs, set unchanged",
                 pos.size(), neg.size());
    return out;
  }
  std::mt19937_64 rng(seed);
  std::shuffle(neg.begin(), neg.end(), rng);
  out = pos;
  out.insert(out.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(pos.size()));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::string>> kfold_patient_split(std::span<const EpochRef> epochs,
                                                          int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold split needs k >= 2");
  std::vector<std::string> patients;
  for (const auto& e : epochs) patients.push_back(e.patient_id);
  std::sort(patients.begin(), patients.end());
  patients.erase(std::unique(patients.begin(), patients.end()), patients.end());
  if (patients.size() < static_cast<std::size_t>(k)) {
    throw ValidationError("k-fold split: " + std::to_string(patients.size()) +
                          " patients for " + std::to_string(k) + " folds");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(patients.begin(), patients.end(), rng);
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < patients.size(); ++i) {
    folds[i % folds.size()].push_back(patients[i]);
  }
  return folds;
}

std::vector<EpochRef> one_vs_rest(std::span<const EpochRef> epochs, int seizure_type) {
  if (seizure_type < 1 || seizure_type > 8) {
    throw ValidationError("one-vs-rest: seizure type must be in 1..8");
  }
  std::vector<EpochRef> out(epochs.begin(), epochs.end());
  std::size_t positives = 0;
  for (auto& e : out) {
    e.label = e.label == seizure_type ? 1 : 0;
    positives += static_cast<std::size_t>(e.label);
  }
  if (positives == 0) spdlog::warn("one-vs-rest: seizure type {} absent", seizure_type);
  return out;
}

std::vector<EpochRef> relabel_onset_window(std::span<const EpochRef> epochs,
                                           int window_epochs) {
  if (window_epochs < 1) throw ValidationError("onset window must be at least one epoch");
  std::vector<EpochRef> out(epochs.begin(), epochs.end());
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out[a].patient_id != out[b].patient_id) return out[a].patient_id < out[b].patient_id;
    return out[a].epoch_index < out[b].epoch_index;
  });
  int run = 0;
  const std::string* prev_patient = nullptr;
  int prev_index = 0;
  for (const auto i : order) {
    auto& e = out[i];
    const bool continues = run > 0 && *prev_patient == e.patient_id &&
                           prev_index + 1 == e.epoch_index;
    run = e.label == 0 ? 0 : (continues ? run + 1 : 1);
    prev_patient = &e.patient_id;
    prev_index = e.epoch_index;
    if (run > window_epochs) e.label = 0;
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> patient_specific_split(
    std::span<const EpochRef> epochs, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("patient-specific split fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_patient;
  for (std::size_t i = 0; i < epochs.size(); ++i) by_patient[epochs[i].patient_id].push_back(i);
  std::vector<std::size_t> augment;
  std::vector<std::size_t> test;
  for (auto& [pid, idx] : by_patient) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return epochs[a].epoch_index < epochs[b].epoch_index;
    });
    const auto take =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(idx.size())));
    augment.insert(augment.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end());
  }
  std::sort(augment.begin(), augment.end());
  std::sort(test.begin(), test.end());
  return {std::move(augment), std::move(test)};
}

std::vector<FeatureHistogram> feature_class_stats(const PatternSet& set) {
  const Eigen::Index n = set.n_channels;
  const auto bands = static_cast<Eigen::Index>(set.n_bands);
  std::vector<FeatureHistogram> out;
  for (std::size_t k = 0; k < set.families.size(); ++k) {
    const auto family = set.families[k];
    const Eigen::Index col0 = static_cast<Eigen::Index>(k) * n;
    auto for_each_entry = [&](auto&& fn) {
      for (std::size_t e = 0; e < set.size(); ++e) {
        const auto& m = set.patterns[e];
        for (Eigen::Index b = 0; b < bands; ++b) {
          for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) fn(e, m(b * n + i, col0 + j));
          }
        }
      }
    };
    double lo = 0.0;
    double hi = 1.0;
    if (family == FeatureFamily::kEnergy) {
      lo = std::numeric_limits<double>::infinity();
      hi = -lo;
      for_each_entry([&](std::size_t, double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      });
      if (!(hi > lo)) {
        lo = std::isfinite(lo) ? lo - 0.5 : 0.0;
        hi = lo + 1.0;
      }
    }
    FeatureHistogram hist[2];
    for (int c = 0; c < 2; ++c) {
      hist[c] = {family, c, lo, hi, std::vector<std::size_t>(kHistogramBins, 0)};
    }
    const double scale = kHistogramBins / (hi - lo);
    for_each_entry([&](std::size_t e, double v) {
      const int bin = std::clamp(static_cast<int>(std::floor((v - lo) * scale)), 0,
                                 kHistogramBins - 1);
      ++hist[set.epochs[e].label != 0 ? 1 : 0].counts[static_cast<std::size_t>(bin)];
    });
    out.push_back(std::move(hist[0]));
    out.push_back(std::move(hist[1]));
  }
  return out;
}

std::string histograms_csv(std::span<const FeatureHistogram> histograms) {
  std::string out = "family,class,bin,lower,upper,count\n";
  for (const auto& h : histograms) {
    const double width = (h.upper - h.lower) / kHistogramBins;
    for (int b = 0; b < kHistogramBins; ++b) {
      out += std::string(family_name(h.family)) + "," +
             (h.label != 0 ? "seizure" : "background") + "," + std::to_string(b) + "," +
             format_double(h.lower + width * b) + "," +
             format_double(h.lower + width * (b + 1)) + "," +
             std::to_string(h.counts[static_cast<std::size_t>(b)]) + "\n";
    }
  }
  return out;
}

}  // namespace sznet
