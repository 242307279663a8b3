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

#include "sznet/nn/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "sznet/error.hpp"

namespace sznet::nn {

std::string_view architecture_name(Architecture arch) {
  switch (arch) {
    case Architecture::kCnn1:
      return "CNN1";
    case Architecture::kCnn2:
      return "CNN2";
    case Architecture::kCnn3:
      return "CNN3";
    case Architecture::kCnn4:
      return "CNN4";
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "CNN1") return Architecture::kCnn1;
  if (upper == "CNN2") return Architecture::kCnn2;
  if (upper == "CNN3") return Architecture::kCnn3;
  if (upper == "CNN4") return Architecture::kCnn4;
  throw ValidationError("unknown architecture '" + std::string(name) +
                        "' (expected CNN1..CNN4)");
}

Network::Network(std::string name, Shape input, std::vector<std::unique_ptr<Layer>> layers)
    : name_(std::move(name)), input_(input), layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("network needs at least one layer");
  Shape expect = input_;
  for (const auto& layer : layers_) {
    if (layer->input_shape().size() != expect.size()) {
      throw ValidationError("layer input " + to_string(layer->input_shape()) +
                            " does not follow " + to_string(expect));
    }
    expect = layer->output_shape();
  }
}

Network::Network(const Network& other) : name_(other.name_), input_(other.input_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Batch Network::logits(const Batch& inputs) const {
  Batch x = inputs;
  for (const auto& layer : layers_) x = layer->infer(x);
  return x;
}

Batch Network::predict(const Batch& inputs) const { return softmax(logits(inputs)); }

Eigen::VectorXd Network::predict(const Eigen::MatrixXd& pattern) const {
  const auto shape = pattern_shape(pattern);
  if (shape.size() != input_.size() || shape.height != input_.height) {
    throw ValidationError("pattern shape " + to_string(shape) +
                          " does not match network input " + to_string(input_));
  }
  const Eigen::MatrixXd one(pattern);
  return predict(to_batch(std::span<const Eigen::MatrixXd>(&one, 1))).row(0).transpose();
}

Batch Network::forward(const Batch& inputs) {
  Batch x = inputs;
  for (auto& layer : layers_) x = layer->forward(x);
  return x;
}

Batch Network::backward(const Batch& grad_logits) {
  Batch g = grad_logits;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (auto& layer : layers_) {
    for (auto& p : layer->parameters()) out.push_back(&p);
  }
  return out;
}

std::vector<const Parameter*> Network::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& layer : layers_) {
    const Layer& l = *layer;
    for (const auto& p : l.parameters()) out.push_back(&p);
  }
  return out;
}

Eigen::Index Network::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

void Network::zero_grad() {
  for (auto* p : parameters()) p->grad.setZero();
}

std::uint64_t Network::activation_signature() const {
  std::uint64_t h = 0;
  for (const auto& layer : layers_) h = h * 31 + layer->activation_signature();
  return h;
}

void initialize(Network& network, std::uint64_t seed, bool zero_output_layer) {
  std::mt19937_64 rng(seed);
  const auto& layers = network.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto params = layers[i]->parameters();
    if (params.empty()) continue;
    const bool is_output = i + 1 == layers.size();
    auto& weights = params[0];
    Eigen::Index fan_in = 1;
    if (layers[i]->kind() == LayerKind::kConv) {
      fan_in = weights.value.size() / weights.shape[0];
    } else {
      fan_in = layers[i]->input_shape().size();
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index k = 0; k < weights.value.size(); ++k) {
      weights.value[k] = (is_output && zero_output_layer) ? 0.0 : dist(rng);
    }
    for (std::size_t j = 1; j < params.size(); ++j) params[j].value.setZero();
  }
  network.zero_grad();
}

Network make_network(Architecture arch, Shape input, const ArchitectureOptions& options,
                     std::uint64_t seed) {
  std::vector<std::unique_ptr<Layer>> layers;
  Shape shape = input;
  auto add = [&](std::unique_ptr<Layer> layer) {
    shape = layer->output_shape();
    layers.push_back(std::move(layer));
  };
  auto conv = [&] {
    add(std::make_unique<Conv2d>(shape, options.filters, options.kernel));
    add(std::make_unique<Relu>(shape));
  };
  auto pool = [&] { add(std::make_unique<MaxPool2>(shape)); };
  switch (arch) {
    case Architecture::kCnn1:
      conv();
      pool();
      break;
    case Architecture::kCnn2:
      conv();
      conv();
      pool();
      break;
    case Architecture::kCnn3:
      conv();
      pool();
      conv();
      pool();
      break;
    case Architecture::kCnn4:
      conv();
      conv();
      pool();
      conv();
      conv();
      pool();
      break;
  }
  add(std::make_unique<Dense>(shape, options.hidden_units));
  add(std::make_unique<Relu>(shape));
  add(std::make_unique<Dense>(shape, options.classes));
  Network net(std::string(architecture_name(arch)), input, std::move(layers));
  initialize(net, seed, options.zero_output_layer);
  return net;
}

Shape pattern_shape(const Eigen::MatrixXd& pattern) {
  return {pattern.rows(), pattern.cols(), 1};
}

Batch to_batch(std::span<const Eigen::MatrixXd> patterns) {
  if (patterns.empty()) return Batch(0, 0);
  const auto rows = patterns.front().rows();
  const auto cols = patterns.front().cols();
  Batch out(static_cast<Eigen::Index>(patterns.size()), rows * cols);
  for (std::size_t s = 0; s < patterns.size(); ++s) {
    if (patterns[s].rows() != rows || patterns[s].cols() != cols) {
      throw ValidationError("patterns in a batch must share one shape");
    }
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        out.row(static_cast<Eigen::Index>(s)).data(), rows, cols) = patterns[s];
  }
  return out;
}

}  // namespace sznet::nn
