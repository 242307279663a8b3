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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sznet/nn/layers.hpp"

namespace sznet::nn {

enum class Architecture { kCnn1, kCnn2, kCnn3, kCnn4 };

std::string_view architecture_name(Architecture arch);
Architecture parse_architecture(std::string_view name);

struct ArchitectureOptions {
  Eigen::Index filters = 10;
  Eigen::Index kernel = 5;
  Eigen::Index hidden_units = 1000;
  Eigen::Index classes = 2;
  // Zero output layer: an untrained network predicts the uniform distribution.
  bool zero_output_layer = true;
};

// Ordered layer stack ending in logits; softmax is applied by predict() and by
// the loss.
class Network {
 public:
  Network(std::string name, Shape input, std::vector<std::unique_ptr<Layer>> layers);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const std::string& name() const { return name_; }
  const Shape& input_shape() const { return input_; }
  Eigen::Index num_classes() const { return layers_.back()->output_shape().size(); }
  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

  Batch logits(const Batch& inputs) const;
  Batch predict(const Batch& inputs) const;  // class probabilities per row
  Eigen::VectorXd predict(const Eigen::MatrixXd& pattern) const;

  Batch forward(const Batch& inputs);
  Batch backward(const Batch& grad_logits);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  Eigen::Index parameter_count() const;
  void zero_grad();
  std::uint64_t activation_signature() const;

 private:
  std::string name_;
  Shape input_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

// CNN1: conv relu pool | dense relu dense
// CNN2: conv relu conv relu pool | dense relu dense
// CNN3: conv relu pool conv relu pool | dense relu dense
// CNN4: conv relu conv relu pool conv relu conv relu pool | dense relu dense
// Weights are U(-sqrt(6/fan_in), sqrt(6/fan_in)) from a stream seeded by
// `seed`; biases start at zero.
Network make_network(Architecture arch, Shape input, const ArchitectureOptions& options,
                     std::uint64_t seed);

// Re-draws every weight tensor from the seeded fan-in uniform stream.
void initialize(Network& network, std::uint64_t seed, bool zero_output_layer);

// Patterns as single-channel images, one per row.
Batch to_batch(std::span<const Eigen::MatrixXd> patterns);
Shape pattern_shape(const Eigen::MatrixXd& pattern);

}  // namespace sznet::nn
