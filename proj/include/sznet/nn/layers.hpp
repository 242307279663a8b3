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
#include <vector>

#include <Eigen/Dense>

namespace sznet::nn {

// One sample per row, each row a height x width x channels image flattened
// row-major (channel fastest).
using Batch = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Shape {
  Eigen::Index height = 1;
  Eigen::Index width = 1;
  Eigen::Index channels = 1;

  Eigen::Index size() const { return height * width * channels; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

// Flat trainable tensor and its accumulated gradient. `shape` is the logical
// row-major shape used for serialisation.
struct Parameter {
  std::string name;
  std::vector<Eigen::Index> shape;
  Eigen::VectorXd value;
  Eigen::VectorXd grad;
};

enum class LayerKind { kConv, kMaxPool, kRelu, kDense };

class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;

  const Shape& input_shape() const { return in_; }
  const Shape& output_shape() const { return out_; }

  // Stateless evaluation.
  virtual Batch infer(const Batch& in) const = 0;
  // Evaluation that keeps what backward() needs.
  virtual Batch forward(const Batch& in) = 0;
  // Gradient w.r.t. the last forward() input; parameter gradients accumulate.
  virtual Batch backward(const Batch& grad_out) = 0;

  virtual std::span<Parameter> parameters() { return {}; }
  virtual std::span<const Parameter> parameters() const { return {}; }

  // Hash of the piecewise-linear regime (ReLU masks, pooling argmaxes) chosen
  // by the last forward(). Finite differences are only valid when it is
  // unchanged by the perturbation.
  virtual std::uint64_t activation_signature() const { return 0; }

 protected:
  Shape in_;
  Shape out_;
};

// Square filters, stride 1, zero "same" padding (odd kernel sizes only).
class Conv2d : public Layer {
 public:
  Conv2d(Shape input, Eigen::Index filters, Eigen::Index kernel);

  LayerKind kind() const override { return LayerKind::kConv; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2d>(*this); }
  Batch infer(const Batch& in) const override;
  Batch forward(const Batch& in) override;
  Batch backward(const Batch& grad_out) override;
  std::span<Parameter> parameters() override { return params_; }
  std::span<const Parameter> parameters() const override { return params_; }

  Eigen::Index filters() const { return filters_; }
  Eigen::Index kernel() const { return kernel_; }
  // (kernel*kernel*in_channels) x filters view of the weights.
  Eigen::Map<const Eigen::MatrixXd> weights() const;
  Eigen::Map<Eigen::MatrixXd> weights();

 protected:
  // Patch matrix of one sample: (height*width) x (kernel*kernel*in_channels).
  Eigen::MatrixXd im2col(const double* sample) const;
  void col2im(const Eigen::MatrixXd& cols, double* sample) const;

  Eigen::Index filters_;
  Eigen::Index kernel_;
  std::vector<Parameter> params_;  // weights, bias
  Batch input_;
};

// 2x2 windows, stride 2; a trailing odd row/column is dropped. Ties route the
// gradient to the first element in window order.
class MaxPool2 : public Layer {
 public:
  explicit MaxPool2(Shape input);

  LayerKind kind() const override { return LayerKind::kMaxPool; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool2>(*this); }
  Batch infer(const Batch& in) const override;
  Batch forward(const Batch& in) override;
  Batch backward(const Batch& grad_out) override;
  std::uint64_t activation_signature() const override;

 private:
  Batch pool(const Batch& in, std::vector<Eigen::Index>* argmax) const;

  std::vector<Eigen::Index> argmax_;  // per sample, per output entry
};

// max(0, x); the subgradient at 0 is 0.
class Relu : public Layer {
 public:
  explicit Relu(Shape input);

  LayerKind kind() const override { return LayerKind::kRelu; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Relu>(*this); }
  Batch infer(const Batch& in) const override;
  Batch forward(const Batch& in) override;
  Batch backward(const Batch& grad_out) override;
  std::uint64_t activation_signature() const override;

 private:
  Batch output_;
};

// Fully connected on the flattened input.
class Dense : public Layer {
 public:
  Dense(Shape input, Eigen::Index units);

  LayerKind kind() const override { return LayerKind::kDense; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }
  Batch infer(const Batch& in) const override;
  Batch forward(const Batch& in) override;
  Batch backward(const Batch& grad_out) override;
  std::span<Parameter> parameters() override { return params_; }
  std::span<const Parameter> parameters() const override { return params_; }

  Eigen::Index units() const { return out_.channels; }
  // inputs x units view of the weights.
  Eigen::Map<const Eigen::MatrixXd> weights() const;
  Eigen::Map<Eigen::MatrixXd> weights();

 private:
  std::vector<Parameter> params_;  // weights, bias
  Batch input_;
};

struct LossResult {
  double loss = 0.0;      // mean over the batch
  Batch probabilities;
  Batch grad_logits;      // d(mean loss)/d(logits) = (p - y) / batch
};

// Max-subtracted softmax followed by cross-entropy against class indices.
// log is floored at 1e-12.
LossResult softmax_cross_entropy(const Batch& logits, std::span<const int> labels);
Batch softmax(const Batch& logits);

}  // namespace sznet::nn
