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
#include <vector>

#include <Eigen/Dense>

#include "sznet/nn/network.hpp"

namespace sznet::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Eigen::VectorXd> first_moment;
  std::vector<Eigen::VectorXd> second_moment;
  long step = 0;
};

// Bias-corrected Adam update of every parameter from its accumulated grad.
void adam_step(std::span<Parameter* const> params, AdamState& state);

struct TrainConfig {
  Eigen::Index batch_size = 64;
  int epochs = 30;
  std::uint64_t seed = 1;
  int patience = 5;                 // epochs without validation improvement
  double validation_fraction = 0.1; // 0 disables early stopping
  AdamConfig adam;
};

struct TrainHistory {
  std::vector<double> train_loss;       // mean minibatch loss per epoch
  std::vector<double> validation_loss;  // empty without a validation split
  int best_epoch = -1;
  bool stopped_early = false;
};

// Minibatch Adam on softmax cross-entropy. The validation split and the
// per-epoch shuffles come from streams derived from config.seed, so identical
// inputs give bit-identical parameters. With a validation split the best
// epoch's parameters are restored at the end.
TrainHistory train(Network& network, const Batch& inputs, std::span<const int> labels,
                   const TrainConfig& config);

struct GradCheckOptions {
  int entries_per_tensor = 200;
  double step = 1e-4;
  double denominator_floor = 1e-8;
  std::uint64_t seed = 7;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  int checked = 0;
  int skipped_at_kinks = 0;
};

// Compares the backpropagated loss gradient with central finite differences on
// a random subset of entries from every parameter tensor. Entries whose
// perturbation changes a ReLU mask or pooling argmax are skipped because the
// loss is not differentiable across that kink.
GradCheckReport grad_check(Network& network, const Batch& inputs,
                           std::span<const int> labels,
                           const GradCheckOptions& options = {});

// Mean over samples of (d loss / d input)^2, shaped like one input image
// (height x width*channels).
Eigen::MatrixXd input_sensitivity(const Network& network, const Batch& inputs,
                                  std::span<const int> labels);

}  // namespace sznet::nn
