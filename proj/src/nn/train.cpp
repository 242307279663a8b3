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

#include "sznet/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "sznet/error.hpp"

namespace sznet::nn {
namespace {

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

Batch gather(const Batch& inputs, std::span<const std::size_t> rows) {
  Batch out(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = inputs.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<int> gather(std::span<const int> labels, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto r : rows) out.push_back(labels[r]);
  return out;
}

double mean_loss(const Network& network, const Batch& inputs, std::span<const int> labels) {
  return softmax_cross_entropy(network.logits(inputs), labels).loss;
}

}  // namespace

void adam_step(std::span<Parameter* const> params, AdamState& state) {
  if (state.first_moment.empty()) {
    for (const auto* p : params) {
      state.first_moment.push_back(Eigen::VectorXd::Zero(p->value.size()));
      state.second_moment.push_back(Eigen::VectorXd::Zero(p->value.size()));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ValidationError("optimizer state does not match the parameter list");
  }
  const auto& c = state.config;
  ++state.step;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i];
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (m.size() != p.value.size() || p.grad.size() != p.value.size()) {
      throw ValidationError("optimizer moment shape mismatch for '" + p.name + "'");
    }
    m = c.beta1 * m + (1.0 - c.beta1) * p.grad;
    v = c.beta2 * v + (1.0 - c.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= c.learning_rate * (m.array() / correction1) /
                       ((v.array() / correction2).sqrt() + c.epsilon);
  }
}

TrainHistory train(Network& network, const Batch& inputs, std::span<const int> labels,
                   const TrainConfig& config) {
  const auto n = static_cast<std::size_t>(inputs.rows());
  if (n == 0) throw ValidationError("cannot train on an empty dataset");
  if (labels.size() != n) throw ValidationError("one label per training input required");
  if (config.batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) ==
      labels.end()) {
    spdlog::warn("training data contains a single class ({})", labels.front());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> validation;
  if (config.validation_fraction > 0.0) {
    std::mt19937_64 split_rng(config.seed);
    std::shuffle(order.begin(), order.end(), split_rng);
    const auto n_val = static_cast<std::size_t>(
        std::floor(config.validation_fraction * static_cast<double>(n)));
    if (n_val >= 1 && n_val < n) {
      validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
      order.erase(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
      std::sort(order.begin(), order.end());
    }
  }
  const Batch val_inputs = gather(inputs, validation);
  const auto val_labels = gather(labels, validation);

  std::mt19937_64 shuffle_rng(config.seed ^ kShuffleStream);
  AdamState adam{config.adam, {}, {}, 0};
  const auto params = network.parameters();
  TrainHistory history;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> best_values;
  int since_best = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const auto stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      const Batch xb = gather(inputs, rows);
      const auto yb = gather(labels, rows);
      network.zero_grad();
      const auto result = softmax_cross_entropy(network.forward(xb), yb);
      network.backward(result.grad_logits);
      adam_step(params, adam);
      total += result.loss * static_cast<double>(rows.size());
    }
    history.train_loss.push_back(total / static_cast<double>(order.size()));

    if (!validation.empty()) {
      const double val = mean_loss(network, val_inputs, val_labels);
      history.validation_loss.push_back(val);
      if (val < best) {
        best = val;
        history.best_epoch = epoch;
        since_best = 0;
        best_values.clear();
        for (const auto* p : params) best_values.push_back(p->value);
      } else if (++since_best >= config.patience) {
        history.stopped_early = true;
        break;
      }
    }
    spdlog::debug("epoch {} train loss {:.6f}", epoch, history.train_loss.back());
  }
  if (!best_values.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  } else {
    history.best_epoch = static_cast<int>(history.train_loss.size()) - 1;
  }
  network.zero_grad();
  return history;
}

GradCheckReport grad_check(Network& network, const Batch& inputs,
                           std::span<const int> labels, const GradCheckOptions& options) {
  network.zero_grad();
  const auto base = softmax_cross_entropy(network.forward(inputs), labels);
  network.backward(base.grad_logits);
  const auto signature = network.activation_signature();

  auto probe = [&]() {
    const double loss = softmax_cross_entropy(network.forward(inputs), labels).loss;
    return std::pair{loss, network.activation_signature()};
  };

  GradCheckReport report;
  std::mt19937_64 rng(options.seed);
  for (auto* p : network.parameters()) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p->value.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min<std::size_t>(idx.size(),
                                     static_cast<std::size_t>(options.entries_per_tensor)));
    for (const auto k : idx) {
      const double saved = p->value[k];
      p->value[k] = saved + options.step;
      const auto [plus, sig_plus] = probe();
      p->value[k] = saved - options.step;
      const auto [minus, sig_minus] = probe();
      p->value[k] = saved;
      if (sig_plus != signature || sig_minus != signature) {
        ++report.skipped_at_kinks;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double analytic = p->grad[k];
      const double denom =
          std::max({std::abs(numeric), std::abs(analytic), options.denominator_floor});
      report.max_relative_error =
          std::max(report.max_relative_error, std::abs(numeric - analytic) / denom);
      ++report.checked;
    }
  }
  network.zero_grad();
  return report;
}

Eigen::MatrixXd input_sensitivity(const Network& network, const Batch& inputs,
                                  std::span<const int> labels) {
  if (inputs.rows() == 0) throw ValidationError("sensitivity of an empty pattern set");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.rows()) {
    throw ValidationError("one label per input required");
  }
  Network work(network);
  const auto& shape = network.input_shape();
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(inputs.cols());
  constexpr Eigen::Index kChunk = 256;
  for (Eigen::Index start = 0; start < inputs.rows(); start += kChunk) {
    const auto count = std::min(kChunk, inputs.rows() - start);
    const Batch xb = inputs.middleRows(start, count);
    const auto result = softmax_cross_entropy(
        work.forward(xb), labels.subspan(static_cast<std::size_t>(start),
                                         static_cast<std::size_t>(count)));
    // Per-sample loss gradients rather than the batch mean.
    const Batch grad_in = work.backward(result.grad_logits * static_cast<double>(count));
    sum += grad_in.cwiseAbs2().colwise().sum();
  }
  sum /= static_cast<double>(inputs.rows());
  Eigen::MatrixXd map(shape.height, shape.width * shape.channels);
  for (Eigen::Index r = 0; r < map.rows(); ++r) {
    map.row(r) = sum.segment(r * map.cols(), map.cols());
  }
  return map;
}

}  // namespace sznet::nn
