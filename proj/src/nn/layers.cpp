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

#include "sznet/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "sznet/error.hpp"

namespace sznet::nn {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

void check_input(const Batch& in, const Shape& shape, const char* layer) {
  if (in.cols() != shape.size()) {
    throw ValidationError(std::string(layer) + ": expected inputs of size " +
                          std::to_string(shape.size()) + ", got " +
                          std::to_string(in.cols()));
  }
}

Parameter make_parameter(std::string name, std::vector<Eigen::Index> shape) {
  Eigen::Index count = 1;
  for (const auto d : shape) count *= d;
  Parameter p;
  p.name = std::move(name);
  p.shape = std::move(shape);
  p.value = Eigen::VectorXd::Zero(count);
  p.grad = Eigen::VectorXd::Zero(count);
  return p;
}

}  // namespace

std::string to_string(const Shape& shape) {
  return std::to_string(shape.height) + "x" + std::to_string(shape.width) + "x" +
         std::to_string(shape.channels);
}

// ---- Conv2d ---------------------------------------------------------------

Conv2d::Conv2d(Shape input, Eigen::Index filters, Eigen::Index kernel)
    : filters_(filters), kernel_(kernel) {
  if (filters < 1 || kernel < 1 || kernel % 2 == 0) {
    throw ValidationError("conv: filters >= 1 and an odd kernel size required");
  }
  in_ = input;
  out_ = {input.height, input.width, filters};
  params_.push_back(make_parameter("weights", {filters, kernel, kernel, input.channels}));
  params_.push_back(make_parameter("bias", {filters}));
}

Eigen::Map<const Eigen::MatrixXd> Conv2d::weights() const {
  return {params_[0].value.data(), kernel_ * kernel_ * in_.channels, filters_};
}

Eigen::Map<Eigen::MatrixXd> Conv2d::weights() {
  return {params_[0].value.data(), kernel_ * kernel_ * in_.channels, filters_};
}

Eigen::MatrixXd Conv2d::im2col(const double* sample) const {
  const auto h = in_.height;
  const auto w = in_.width;
  const auto c = in_.channels;
  const auto pad = kernel_ / 2;
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(h * w, kernel_ * kernel_ * c);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const auto r = y * w + x;
      for (Eigen::Index dy = 0; dy < kernel_; ++dy) {
        const auto yy = y + dy - pad;
        if (yy < 0 || yy >= h) continue;
        for (Eigen::Index dx = 0; dx < kernel_; ++dx) {
          const auto xx = x + dx - pad;
          if (xx < 0 || xx >= w) continue;
          const double* src = sample + (yy * w + xx) * c;
          for (Eigen::Index ch = 0; ch < c; ++ch) {
            cols(r, (dy * kernel_ + dx) * c + ch) = src[ch];
          }
        }
      }
    }
  }
  return cols;
}

void Conv2d::col2im(const Eigen::MatrixXd& cols, double* sample) const {
  const auto h = in_.height;
  const auto w = in_.width;
  const auto c = in_.channels;
  const auto pad = kernel_ / 2;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const auto r = y * w + x;
      for (Eigen::Index dy = 0; dy < kernel_; ++dy) {
        const auto yy = y + dy - pad;
        if (yy < 0 || yy >= h) continue;
        for (Eigen::Index dx = 0; dx < kernel_; ++dx) {
          const auto xx = x + dx - pad;
          if (xx < 0 || xx >= w) continue;
          double* dst = sample + (yy * w + xx) * c;
          for (Eigen::Index ch = 0; ch < c; ++ch) {
            dst[ch] += cols(r, (dy * kernel_ + dx) * c + ch);
          }
        }
      }
    }
  }
}

Batch Conv2d::infer(const Batch& in) const {
  check_input(in, in_, "conv");
  const auto hw = in_.height * in_.width;
  Batch out(in.rows(), out_.size());
  const auto w = weights();
  const Eigen::Map<const Eigen::RowVectorXd> bias(params_[1].value.data(), filters_);
  for (Eigen::Index s = 0; s < in.rows(); ++s) {
    Eigen::Map<RowMatrix> o(out.row(s).data(), hw, filters_);
    o.noalias() = im2col(in.row(s).data()) * w;
    o.rowwise() += bias;
  }
  return out;
}

Batch Conv2d::forward(const Batch& in) {
  input_ = in;
  return infer(in);
}

Batch Conv2d::backward(const Batch& grad_out) {
  const auto hw = in_.height * in_.width;
  Batch grad_in = Batch::Zero(grad_out.rows(), in_.size());
  const auto w = weights();
  Eigen::Map<Eigen::MatrixXd> grad_w(params_[0].grad.data(), w.rows(), w.cols());
  for (Eigen::Index s = 0; s < grad_out.rows(); ++s) {
    const Eigen::Map<const RowMatrix> g(grad_out.row(s).data(), hw, filters_);
    const Eigen::MatrixXd cols = im2col(input_.row(s).data());
    grad_w.noalias() += cols.transpose() * g;
    params_[1].grad += g.colwise().sum().transpose();
    const Eigen::MatrixXd grad_cols = g * w.transpose();
    col2im(grad_cols, grad_in.row(s).data());
  }
  return grad_in;
}

// ---- MaxPool2 -------------------------------------------------------------

MaxPool2::MaxPool2(Shape input) {
  if (input.height < 2 || input.width < 2) {
    throw ValidationError("maxpool: input " + to_string(input) +
                          " is smaller than the 2x2 window");
  }
  in_ = input;
  out_ = {input.height / 2, input.width / 2, input.channels};
}

Batch MaxPool2::pool(const Batch& in, std::vector<Eigen::Index>* argmax) const {
  check_input(in, in_, "maxpool");
  const auto c = in_.channels;
  Batch out(in.rows(), out_.size());
  if (argmax) argmax->assign(static_cast<std::size_t>(in.rows() * out_.size()), 0);
  for (Eigen::Index s = 0; s < in.rows(); ++s) {
    const double* src = in.row(s).data();
    for (Eigen::Index y = 0; y < out_.height; ++y) {
      for (Eigen::Index x = 0; x < out_.width; ++x) {
        for (Eigen::Index ch = 0; ch < c; ++ch) {
          Eigen::Index best = ((2 * y) * in_.width + 2 * x) * c + ch;
          for (Eigen::Index k = 1; k < 4; ++k) {
            const Eigen::Index idx =
                ((2 * y + k / 2) * in_.width + 2 * x + k % 2) * c + ch;
            if (src[idx] > src[best]) best = idx;
          }
          const auto o = (y * out_.width + x) * c + ch;
          out(s, o) = src[best];
          if (argmax) (*argmax)[static_cast<std::size_t>(s * out_.size() + o)] = best;
        }
      }
    }
  }
  return out;
}

Batch MaxPool2::infer(const Batch& in) const { return pool(in, nullptr); }

Batch MaxPool2::forward(const Batch& in) { return pool(in, &argmax_); }

Batch MaxPool2::backward(const Batch& grad_out) {
  Batch grad_in = Batch::Zero(grad_out.rows(), in_.size());
  for (Eigen::Index s = 0; s < grad_out.rows(); ++s) {
    for (Eigen::Index o = 0; o < out_.size(); ++o) {
      grad_in(s, argmax_[static_cast<std::size_t>(s * out_.size() + o)]) += grad_out(s, o);
    }
  }
  return grad_in;
}

std::uint64_t MaxPool2::activation_signature() const {
  std::uint64_t h = kFnvOffset;
  for (const auto i : argmax_) h = fnv_mix(h, static_cast<std::uint64_t>(i));
  return h;
}

// ---- Relu -----------------------------------------------------------------

Relu::Relu(Shape input) {
  in_ = input;
  out_ = input;
}

Batch Relu::infer(const Batch& in) const {
  check_input(in, in_, "relu");
  return in.cwiseMax(0.0);
}

Batch Relu::forward(const Batch& in) {
  output_ = infer(in);
  return output_;
}

Batch Relu::backward(const Batch& grad_out) {
  return (output_.array() > 0.0).select(grad_out, 0.0);
}

std::uint64_t Relu::activation_signature() const {
  std::uint64_t h = kFnvOffset;
  std::uint64_t word = 0;
  int bits = 0;
  for (Eigen::Index i = 0; i < output_.size(); ++i) {
    word = (word << 1) | (output_.data()[i] > 0.0 ? 1u : 0u);
    if (++bits == 64) {
      h = fnv_mix(h, word);
      word = 0;
      bits = 0;
    }
  }
  return fnv_mix(h, word);
}

// ---- Dense ----------------------------------------------------------------

Dense::Dense(Shape input, Eigen::Index units) {
  if (units < 1) throw ValidationError("dense: at least one unit required");
  in_ = input;
  out_ = {1, 1, units};
  params_.push_back(make_parameter("weights", {units, input.size()}));
  params_.push_back(make_parameter("bias", {units}));
}

Eigen::Map<const Eigen::MatrixXd> Dense::weights() const {
  return {params_[0].value.data(), in_.size(), out_.channels};
}

Eigen::Map<Eigen::MatrixXd> Dense::weights() {
  return {params_[0].value.data(), in_.size(), out_.channels};
}

Batch Dense::infer(const Batch& in) const {
  check_input(in, in_, "dense");
  Batch out = in * weights();
  out.rowwise() += params_[1].value.transpose();
  return out;
}

Batch Dense::forward(const Batch& in) {
  input_ = in;
  return infer(in);
}

Batch Dense::backward(const Batch& grad_out) {
  Eigen::Map<Eigen::MatrixXd> grad_w(params_[0].grad.data(), in_.size(), out_.channels);
  grad_w.noalias() += input_.transpose() * grad_out;
  params_[1].grad += grad_out.colwise().sum().transpose();
  return grad_out * weights().transpose();
}

// ---- Loss -----------------------------------------------------------------

Batch softmax(const Batch& logits) {
  Batch p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

LossResult softmax_cross_entropy(const Batch& logits, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.rows()) {
    throw ValidationError("one label per logit row required");
  }
  if (logits.cols() < 2) throw ValidationError("at least two classes required");
  LossResult r;
  r.probabilities = softmax(logits);
  r.grad_logits = r.probabilities;
  const double batch = static_cast<double>(logits.rows());
  const double max_loss = -std::log(1e-12);
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    const int y = labels[static_cast<std::size_t>(s)];
    if (y < 0 || y >= logits.cols()) throw ValidationError("label out of range");
    // -log p_y evaluated as logsumexp(z) - z_y.
    const double m = logits.row(s).maxCoeff();
    const double lse = m + std::log((logits.row(s).array() - m).exp().sum());
    r.loss += std::min(lse - logits(s, y), max_loss);
    r.grad_logits(s, y) -= 1.0;
  }
  if (logits.rows() > 0) {
    r.loss /= batch;
    r.grad_logits /= batch;
  }
  return r;
}

}  // namespace sznet::nn
