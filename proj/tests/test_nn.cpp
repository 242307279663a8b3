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

#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "sznet/error.hpp"
#include "sznet/nn/layers.hpp"
#include "sznet/nn/model_io.hpp"
#include "sznet/nn/network.hpp"
#include "sznet/nn/train.hpp"

using namespace sznet;
using namespace sznet::nn;

namespace {

Batch random_batch(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sd);
  Batch b(rows, cols);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = normal(rng);
  return b;
}

std::vector<int> alternating(Eigen::Index n) {
  std::vector<int> y(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 2);
  return y;
}

template <typename... L>
Network stack(Shape input, L&&... layers) {
  std::vector<std::unique_ptr<Layer>> v;
  (v.push_back(std::forward<L>(layers)), ...);
  return Network("test", input, std::move(v));
}

// Central differences of the mean loss w.r.t. every input entry.
Batch numeric_input_grad(Network& net, const Batch& x, std::span<const int> y, double h) {
  Batch g(x.rows(), x.cols());
  Batch probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = probe.data()[i];
    probe.data()[i] = saved + h;
    const double plus = softmax_cross_entropy(net.logits(probe), y).loss;
    probe.data()[i] = saved - h;
    const double minus = softmax_cross_entropy(net.logits(probe), y).loss;
    probe.data()[i] = saved;
    g.data()[i] = (plus - minus) / (2.0 * h);
  }
  return g;
}

double max_rel(const Batch& a, const Batch& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = std::max({std::abs(a.data()[i]), std::abs(b.data()[i]), 1e-8});
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]) / d);
  }
  return worst;
}

class SignFlippedConv : public Conv2d {
 public:
  using Conv2d::Conv2d;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<SignFlippedConv>(*this); }
  Batch backward(const Batch& grad_out) override {
    const Eigen::VectorXd before = params_[0].grad;
    Batch g = Conv2d::backward(grad_out);
    params_[0].grad = before - (params_[0].grad - before);
    return g;
  }
};

}  // namespace

TEST_CASE("identity 1x1 convolution") {
  Conv2d conv(Shape{4, 5, 1}, 1, 1);
  conv.weights().setZero();
  conv.weights()(0, 0) = 1.0;
  conv.parameters()[1].value.setZero();
  const auto x = random_batch(3, 20, 1);
  CHECK(conv.infer(x) == x);
  CHECK(conv.output_shape() == Shape{4, 5, 1});
}

TEST_CASE("3x3 ones filter counts zero-padded neighbours") {
  Conv2d conv(Shape{5, 5, 1}, 1, 3);
  conv.weights().setOnes();
  conv.parameters()[1].value.setZero();
  const Batch y = conv.infer(Batch::Ones(1, 25));
  CHECK(y(0, 2 * 5 + 2) == 9.0);
  CHECK(y(0, 0) == 4.0);
  CHECK(y(0, 24) == 4.0);
  CHECK(y(0, 2) == 6.0);
  CHECK_THROWS_AS(conv.infer(Batch::Ones(1, 24)), ValidationError);
}

TEST_CASE("same padding preserves spatial shape") {
  for (const Eigen::Index k : {1, 3, 5}) {
    Conv2d conv(Shape{7, 6, 3}, 4, k);
    CHECK(conv.output_shape() == Shape{7, 6, 4});
    CHECK(conv.infer(random_batch(2, 7 * 6 * 3, 2)).cols() == 7 * 6 * 4);
  }
  CHECK_THROWS_AS(Conv2d(Shape{4, 4, 1}, 2, 4), ValidationError);
}

TEST_CASE("conv gradients match central differences on a 6x6x2 input") {
  auto net = stack(Shape{6, 6, 2}, std::make_unique<Conv2d>(Shape{6, 6, 2}, 3, 3),
                   std::make_unique<Dense>(Shape{6, 6, 3}, 2));
  initialize(net, 5, false);
  const auto x = random_batch(2, 72, 6);
  const auto y = alternating(2);
  GradCheckOptions opts;
  opts.entries_per_tensor = 1000;
  const auto report = grad_check(net, x, y, opts);
  CHECK(report.checked > 100);
  CHECK(report.max_relative_error < 1e-4);

  net.zero_grad();
  const auto loss = softmax_cross_entropy(net.forward(x), y);
  const Batch analytic = net.backward(loss.grad_logits);
  CHECK(max_rel(analytic, numeric_input_grad(net, x, y, 1e-4)) < 1e-4);
}

TEST_CASE("max pooling") {
  MaxPool2 pool(Shape{2, 2, 1});
  Batch x(1, 4);
  x << 1, 2, 3, 4;
  CHECK(pool.infer(x)(0, 0) == 4.0);

  MaxPool2 flat(Shape{4, 4, 1});
  const Batch ones = Batch::Ones(1, 16);
  const Batch y = flat.forward(ones);
  CHECK(y == Batch::Ones(1, 4));
  const Batch g = flat.backward(Batch::Ones(1, 4));
  // Ties route to the first element of each window.
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      CHECK(g(0, r * 4 + c) == ((r % 2 == 0 && c % 2 == 0) ? 1.0 : 0.0));
    }
  }

  CHECK(MaxPool2(Shape{70, 10, 1}).output_shape() == Shape{35, 5, 1});
  CHECK(MaxPool2(Shape{5, 5, 3}).output_shape() == Shape{2, 2, 3});
}

TEST_CASE("dense layer") {
  Dense d(Shape{1, 1, 4}, 4);
  d.weights() = Eigen::MatrixXd::Identity(4, 4);
  d.parameters()[1].value.setZero();
  const auto x = random_batch(3, 4, 7);
  CHECK(d.infer(x) == x);

  d.weights().setZero();
  d.parameters()[1].value << 1, -2, 3, 0.5;
  const Batch y = d.infer(x);
  for (Eigen::Index r = 0; r < 3; ++r) {
    CHECK(y(r, 0) == 1.0);
    CHECK(y(r, 1) == -2.0);
  }
  CHECK_THROWS_AS(d.infer(random_batch(1, 5, 1)), ValidationError);
}

TEST_CASE("dense-only network gradients") {
  auto net = stack(Shape{1, 1, 6}, std::make_unique<Dense>(Shape{1, 1, 6}, 5),
                   std::make_unique<Dense>(Shape{1, 1, 5}, 3));
  initialize(net, 8, false);
  const auto x = random_batch(4, 6, 9);
  const std::vector<int> y = {0, 1, 2, 1};
  GradCheckOptions opts;
  opts.step = 1e-5;
  const auto report = grad_check(net, x, y, opts);
  CHECK(report.checked == 6 * 5 + 5 + 5 * 3 + 3);
  CHECK(report.skipped_at_kinks == 0);
  CHECK(report.max_relative_error < 1e-6);
}

TEST_CASE("relu") {
  Relu r(Shape{1, 1, 3});
  Batch x(1, 3);
  x << -1, 0, 2;
  Batch expect(1, 3);
  expect << 0, 0, 2;
  CHECK(r.forward(x) == expect);
  CHECK(r.backward(Batch::Ones(1, 3)) == (Batch(1, 3) << 0, 0, 1).finished());
  const Batch neg = -Batch::Ones(2, 3);
  CHECK(r.forward(neg) == Batch::Zero(2, 3));
  CHECK(r.backward(Batch::Ones(2, 3)) == Batch::Zero(2, 3));
  const auto z = random_batch(5, 3, 10);
  CHECK(r.infer(r.infer(z)) == r.infer(z));
}

TEST_CASE("softmax cross-entropy") {
  Batch logits(1, 2);
  logits << 0, 0;
  const std::vector<int> zero = {0};
  auto res = softmax_cross_entropy(logits, zero);
  CHECK(res.probabilities(0, 0) == doctest::Approx(0.5));
  CHECK(res.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  logits << 30, -30;
  res = softmax_cross_entropy(logits, zero);
  CHECK(std::isfinite(res.loss));
  CHECK(res.loss >= 0.0);
  CHECK(res.loss < 1e-12);
  logits << -800, 800;
  res = softmax_cross_entropy(logits, zero);
  CHECK(res.loss == doctest::Approx(-std::log(1e-12)));

  // Gradient p - y (mean over the batch) against central differences.
  const auto z = random_batch(3, 4, 11, 2.0);
  const std::vector<int> y = {3, 0, 1};
  const auto base = softmax_cross_entropy(z, y);
  Batch numeric(3, 4);
  Batch probe = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double s = probe.data()[i];
    probe.data()[i] = s + 1e-5;
    const double plus = softmax_cross_entropy(probe, y).loss;
    probe.data()[i] = s - 1e-5;
    const double minus = softmax_cross_entropy(probe, y).loss;
    probe.data()[i] = s;
    numeric.data()[i] = (plus - minus) / 2e-5;
  }
  CHECK(max_rel(base.grad_logits, numeric) < 1e-4);
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      const double onehot = c == y[static_cast<std::size_t>(r)] ? 1.0 : 0.0;
      CHECK(base.grad_logits(r, c) ==
            doctest::Approx((base.probabilities(r, c) - onehot) / 3.0).epsilon(1e-12));
    }
  }

  const Batch shifted = (z.array() + 123.0).matrix();
  CHECK((softmax(shifted) - softmax(z)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(softmax_cross_entropy(z, std::vector<int>{0, 1}), ValidationError);
  CHECK_THROWS_AS(softmax_cross_entropy(z, std::vector<int>{0, 1, 4}), ValidationError);
}

TEST_CASE("adam") {
  Parameter p{"w", {3}, Eigen::VectorXd::Constant(3, 1.5), Eigen::VectorXd::Zero(3)};
  Parameter* params[] = {&p};
  AdamState state;
  adam_step(params, state);
  CHECK(p.value == Eigen::VectorXd::Constant(3, 1.5));
  CHECK(state.step == 1);

  AdamState fresh;
  p.grad << 1e-3, -5.0, 0.25;
  const Eigen::VectorXd before = p.value;
  adam_step(params, fresh);
  const Eigen::VectorXd update = p.value - before;
  for (Eigen::Index i = 0; i < 3; ++i) {
    const double sign = p.grad[i] > 0 ? 1.0 : -1.0;
    CHECK(std::abs(update[i] + 1e-3 * sign) < 1e-6);
  }

  // f(w) = (w - 3)^2 from w = 0. The default rate of 1e-3 moves w by at most
  // 0.2 in 200 steps, so this run uses 0.1.
  Parameter w{"w", {1}, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  Parameter* wp[] = {&w};
  AdamState s;
  s.config.learning_rate = 0.1;
  for (int k = 0; k < 200; ++k) {
    w.grad[0] = 2.0 * (w.value[0] - 3.0);
    adam_step(wp, s);
  }
  CHECK(std::abs(w.value[0] - 3.0) < 0.1);
}

TEST_CASE("named architectures") {
  const Shape in{70, 10, 1};
  ArchitectureOptions opts;
  auto kinds = [](const Network& n) {
    std::vector<LayerKind> k;
    for (const auto& l : n.layers()) k.push_back(l->kind());
    return k;
  };
  using K = LayerKind;
  const auto c1 = make_network(Architecture::kCnn1, in, opts, 1);
  CHECK(kinds(c1) == std::vector<K>{K::kConv, K::kRelu, K::kMaxPool, K::kDense, K::kRelu, K::kDense});
  const auto c2 = make_network(Architecture::kCnn2, in, opts, 1);
  CHECK(kinds(c2) == std::vector<K>{K::kConv, K::kRelu, K::kConv, K::kRelu, K::kMaxPool,
                                    K::kDense, K::kRelu, K::kDense});
  const auto c3 = make_network(Architecture::kCnn3, in, opts, 1);
  CHECK(kinds(c3) == std::vector<K>{K::kConv, K::kRelu, K::kMaxPool, K::kConv, K::kRelu,
                                    K::kMaxPool, K::kDense, K::kRelu, K::kDense});
  const auto c4 = make_network(Architecture::kCnn4, in, opts, 1);
  CHECK(kinds(c4) == std::vector<K>{K::kConv, K::kRelu, K::kConv, K::kRelu, K::kMaxPool,
                                    K::kConv, K::kRelu, K::kConv, K::kRelu, K::kMaxPool,
                                    K::kDense, K::kRelu, K::kDense});
  CHECK(c2.layers()[4]->output_shape() == Shape{35, 5, 10});
  CHECK(c2.layers()[5]->output_shape() == Shape{1, 1, 1000});
  CHECK(c4.layers()[9]->output_shape() == Shape{17, 2, 10});
  CHECK(c2.num_classes() == 2);
  const auto* conv = static_cast<const Conv2d*>(c2.layers()[0].get());
  CHECK(conv->filters() == 10);
  CHECK(conv->kernel() == 5);
  CHECK(architecture_name(Architecture::kCnn3) == "CNN3");
  CHECK(parse_architecture("CNN4") == Architecture::kCnn4);
  CHECK_THROWS_AS(parse_architecture("CNN9"), ValidationError);
}

TEST_CASE("predictions are normalised and start uniform") {
  ArchitectureOptions opts;
  opts.hidden_units = 16;
  const auto net = make_network(Architecture::kCnn2, Shape{8, 4, 1}, opts, 3);
  const auto x = random_batch(6, 32, 12);
  const auto p = net.predict(x);
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    CHECK(p(r, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(p.row(r).sum() - 1.0) < 1e-9);
  }
  opts.zero_output_layer = false;
  const auto rnd = make_network(Architecture::kCnn2, Shape{8, 4, 1}, opts, 3);
  const auto q = rnd.predict(random_batch(20, 32, 13, 5.0));
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    CHECK(q.row(r).minCoeff() >= 0.0);
    CHECK(std::abs(q.row(r).sum() - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(rnd.predict(random_batch(1, 31, 1)), ValidationError);
}

namespace {

// Two Gaussian blobs on a 4x4 single-channel image.
std::pair<Batch, std::vector<int>> blobs(Eigen::Index n, std::uint64_t seed) {
  Batch x = random_batch(n, 16, seed, 0.5);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    x.row(i).array() += (i % 2 == 0 ? -1.0 : 1.0);
  }
  return {x, y};
}

Network toy_network(std::uint64_t seed) {
  ArchitectureOptions opts;
  opts.filters = 2;
  opts.kernel = 3;
  opts.hidden_units = 8;
  return make_network(Architecture::kCnn1, Shape{4, 4, 1}, opts, seed);
}

}  // namespace

TEST_CASE("training on separable blobs") {
  const auto [x, y] = blobs(64, 14);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.validation_fraction = 0.0;
  cfg.adam.learning_rate = 1e-2;
  auto net = toy_network(2);
  const auto h = train(net, x, y, cfg);
  REQUIRE(h.train_loss.size() == 20);
  for (int e = 1; e < 5; ++e) CHECK(h.train_loss[e] < h.train_loss[e - 1]);
  const auto p = net.predict(x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int pred = p(i, 1) > p(i, 0) ? 1 : 0;
    CHECK(pred == y[static_cast<std::size_t>(i)]);
  }

  auto again = toy_network(2);
  const auto h2 = train(again, x, y, cfg);
  CHECK(h2.train_loss == h.train_loss);
  const auto pa = net.parameters();
  const auto pb = again.parameters();
  for (std::size_t k = 0; k < pa.size(); ++k) CHECK(pa[k]->value == pb[k]->value);

  auto frozen = toy_network(2);
  cfg.adam.learning_rate = 0.0;
  const auto h0 = train(frozen, x, y, cfg);
  for (const double l : h0.train_loss) CHECK(l == doctest::Approx(h0.train_loss[0]).epsilon(1e-12));

  auto empty_net = toy_network(2);
  CHECK_THROWS_AS(train(empty_net, Batch(0, 16), std::vector<int>{}, cfg), ValidationError);
}

TEST_CASE("early stopping keeps the best validation epoch") {
  const auto [x, y] = blobs(80, 15);
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.patience = 3;
  cfg.validation_fraction = 0.25;
  cfg.adam.learning_rate = 5e-2;
  auto net = toy_network(4);
  const auto h = train(net, x, y, cfg);
  REQUIRE(!h.validation_loss.empty());
  const auto best = std::min_element(h.validation_loss.begin(), h.validation_loss.end());
  CHECK(h.best_epoch == static_cast<int>(best - h.validation_loss.begin()));
  if (h.stopped_early) {
    CHECK(static_cast<int>(h.validation_loss.size()) == h.best_epoch + 1 + cfg.patience);
  }
}

TEST_CASE("gradient check detects a sign-flipped convolution") {
  const Shape in{14, 4, 1};
  auto build = [&](bool mutated) {
    std::vector<std::unique_ptr<Layer>> layers;
    if (mutated) {
      layers.push_back(std::make_unique<SignFlippedConv>(in, 2, 5));
    } else {
      layers.push_back(std::make_unique<Conv2d>(in, 2, 5));
    }
    layers.push_back(std::make_unique<Relu>(Shape{14, 4, 2}));
    layers.push_back(std::make_unique<Conv2d>(Shape{14, 4, 2}, 2, 5));
    layers.push_back(std::make_unique<Relu>(Shape{14, 4, 2}));
    layers.push_back(std::make_unique<MaxPool2>(Shape{14, 4, 2}));
    layers.push_back(std::make_unique<Dense>(Shape{7, 2, 2}, 20));
    layers.push_back(std::make_unique<Relu>(Shape{1, 1, 20}));
    layers.push_back(std::make_unique<Dense>(Shape{1, 1, 20}, 2));
    Network net("CNN2", in, std::move(layers));
    initialize(net, 17, false);
    return net;
  };
  const auto x = random_batch(4, 56, 18);
  const auto y = alternating(4);
  auto good = build(false);
  const auto ok = grad_check(good, x, y);
  CHECK(ok.checked > 200);
  CHECK(ok.max_relative_error < 1e-4);
  auto bad = build(true);
  CHECK(grad_check(bad, x, y).max_relative_error > 1e-1);
}

TEST_CASE("input sensitivity") {
  auto net = toy_network(5);
  initialize(net, 5, false);
  static_cast<Conv2d*>(const_cast<Layer*>(net.layers()[0].get()))->weights().setZero();
  const auto [x, y] = blobs(10, 19);
  const auto zero_map = input_sensitivity(net, x, y);
  CHECK(zero_map.rows() == 4);
  CHECK(zero_map.cols() == 4);
  CHECK(zero_map.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(input_sensitivity(net, Batch(0, 16), std::vector<int>{}), ValidationError);

  // Only entry (0,0) carries the class.
  Batch data = random_batch(200, 9, 20, 0.3);
  std::vector<int> labels(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    data(i, 0) = i % 2 == 0 ? -1.0 : 1.0;
  }
  auto dense = stack(Shape{3, 3, 1}, std::make_unique<Dense>(Shape{3, 3, 1}, 8),
                     std::make_unique<Relu>(Shape{1, 1, 8}),
                     std::make_unique<Dense>(Shape{1, 1, 8}, 2));
  initialize(dense, 21, true);
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.batch_size = 20;
  cfg.validation_fraction = 0.0;
  cfg.adam.learning_rate = 1e-2;
  train(dense, data, labels, cfg);
  const auto map = input_sensitivity(dense, data, labels);
  CHECK(map.minCoeff() >= 0.0);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  map.maxCoeff(&r, &c);
  CHECK(r == 0);
  CHECK(c == 0);
}

TEST_CASE("model files round trip") {
  ArchitectureOptions opts;
  opts.hidden_units = 12;
  opts.zero_output_layer = false;
  ModelBundle m{make_network(Architecture::kCnn3, Shape{14, 6, 1}, opts, 22),
                {Eigen::MatrixXd::Constant(14, 6, 0.25), Eigen::MatrixXd::Constant(14, 6, 2.0)},
                {FeatureFamily::kPlv, FeatureFamily::kEnergy, FeatureFamily::kEntropy},
                2,
                kNumBands,
                22};
  const auto [text, bin] = encode_model(m, "m.bin");
  const auto back = decode_model(text, bin);
  CHECK(back.network.name() == "CNN3");
  CHECK(back.families == m.families);
  CHECK(back.n_channels == 2);
  CHECK(back.seed == 22);
  CHECK(back.normalization.stddev(3, 4) == 2.0);
  const auto x = random_batch(5, 84, 23);
  CHECK((back.network.predict(x) - m.network.predict(x)).cwiseAbs().maxCoeff() < 1e-4);
  const auto [text2, bin2] = encode_model(back, "m.bin");
  CHECK(text2 == text);
  CHECK(bin2 == bin);

  const auto envelope = nlohmann::json::parse(text);
  CHECK(envelope["version"] == kModelFormatVersion);
  CHECK(envelope["layers"].back()["type"] == "softmax");
  CHECK(envelope["tensors"][0]["offset"] == 0);

  CHECK_THROWS_AS(decode_model(text, bin.substr(4)), ValidationError);
  auto tampered = envelope;
  tampered["tensors"][0]["shape"][0] = 99;
  CHECK_THROWS_AS(decode_model(tampered.dump(), bin), ValidationError);
  tampered = envelope;
  tampered["input_shape"][0] = 15;
  CHECK_THROWS_AS(decode_model(tampered.dump(), bin), ValidationError);
  CHECK_THROWS_AS(decode_model("{not json", bin), ValidationError);
}
