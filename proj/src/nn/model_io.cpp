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

#include "sznet/nn/model_io.hpp"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "sznet/error.hpp"
#include "sznet/io.hpp"

namespace sznet::nn {
namespace {

using nlohmann::json;

void append_floats(std::string& out, const double* data, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(data[i]));
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
}

void read_floats(std::string_view bin, std::size_t offset, double* out, Eigen::Index count,
                 const std::string& name) {
  if (offset + static_cast<std::size_t>(count) * 4 > bin.size()) {
    throw ParseError(offset, name, "model parameter file truncated");
  }
  for (Eigen::Index i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(
                  bin[offset + static_cast<std::size_t>(i) * 4 + static_cast<std::size_t>(b)]))
              << (8 * b);
    }
    out[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
}

json describe(const Layer& layer) {
  switch (layer.kind()) {
    case LayerKind::kConv: {
      const auto& c = static_cast<const Conv2d&>(layer);
      return {{"type", "conv"}, {"filters", c.filters()}, {"kernel", c.kernel()},
              {"padding", "same"}, {"stride", 1}};
    }
    case LayerKind::kMaxPool:
      return {{"type", "maxpool"}, {"size", 2}, {"stride", 2}};
    case LayerKind::kRelu:
      return {{"type", "relu"}};
    case LayerKind::kDense:
      return {{"type", "dense"}, {"units", static_cast<const Dense&>(layer).units()}};
  }
  return {};
}

Network rebuild(const std::string& name, Shape input, const json& specs) {
  std::vector<std::unique_ptr<Layer>> layers;
  Shape shape = input;
  for (const auto& spec : specs) {
    const auto type = spec.at("type").get<std::string>();
    std::unique_ptr<Layer> layer;
    if (type == "conv") {
      if (spec.value("padding", "same") != "same" || spec.value("stride", 1) != 1) {
        throw ValidationError("model: only same-padded stride-1 convolutions are supported");
      }
      layer = std::make_unique<Conv2d>(shape, spec.at("filters").get<Eigen::Index>(),
                                       spec.at("kernel").get<Eigen::Index>());
    } else if (type == "maxpool") {
      layer = std::make_unique<MaxPool2>(shape);
    } else if (type == "relu") {
      layer = std::make_unique<Relu>(shape);
    } else if (type == "dense") {
      layer = std::make_unique<Dense>(shape, spec.at("units").get<Eigen::Index>());
    } else if (type == "softmax") {
      continue;
    } else {
      throw ValidationError("model: unknown layer type '" + type + "'");
    }
    shape = layer->output_shape();
    layers.push_back(std::move(layer));
  }
  return Network(name, input, std::move(layers));
}

}  // namespace

std::pair<std::string, std::string> encode_model(const ModelBundle& model,
                                                 const std::string& sidecar_name) {
  const auto& net = model.network;
  json layers = json::array();
  for (const auto& layer : net.layers()) layers.push_back(describe(*layer));
  layers.push_back({{"type", "softmax"}});

  std::string bin;
  json tensors = json::array();
  auto add = [&](const std::string& name, const std::vector<Eigen::Index>& shape,
                 const double* data, Eigen::Index count) {
    tensors.push_back({{"name", name}, {"offset", bin.size()}, {"count", count},
                       {"shape", shape}});
    append_floats(bin, data, count);
  };
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const Layer& layer = *net.layers()[i];
    for (const auto& p : layer.parameters()) {
      add("layer" + std::to_string(i) + "." + p.name, p.shape, p.value.data(),
          p.value.size());
    }
  }
  const auto& norm = model.normalization;
  // Row-major on disk, like the patterns themselves.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mean =
      norm.mean;
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> stddev =
      norm.stddev;
  add("normalization.mean", {mean.rows(), mean.cols()}, mean.data(), mean.size());
  add("normalization.stddev", {stddev.rows(), stddev.cols()}, stddev.data(), stddev.size());

  json families = json::array();
  for (const auto f : model.families) families.push_back(std::string(family_name(f)));
  const auto& in = net.input_shape();
  json envelope = {
      {"format", "sznet-model"},
      {"version", kModelFormatVersion},
      {"architecture", net.name()},
      {"input_shape", {in.height, in.width, in.channels}},
      {"num_classes", net.num_classes()},
      {"layers", layers},
      {"feature_families", families},
      {"n_channels", model.n_channels},
      {"n_bands", model.n_bands},
      {"seed", model.seed},
      {"parameters_file", sidecar_name},
      {"parameters_bytes", bin.size()},
      {"tensors", tensors},
  };
  return {envelope.dump(2) + "\n", std::move(bin)};
}

ModelBundle decode_model(std::string_view json_text, std::string_view sidecar) {
  json envelope;
  try {
    envelope = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, "model", std::string("invalid model JSON: ") + e.what());
  }
  try {
    if (envelope.at("format") != "sznet-model") {
      throw ValidationError("model: not an sznet model file");
    }
    if (envelope.at("version").get<int>() != kModelFormatVersion) {
      throw ValidationError("model: unsupported format version");
    }
    if (envelope.at("parameters_bytes").get<std::size_t>() != sidecar.size()) {
      throw ValidationError("model: parameter file size does not match the envelope");
    }
    const auto shape = envelope.at("input_shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 3) throw ValidationError("model: input_shape needs three entries");
    const Shape input{shape[0], shape[1], shape[2]};
    Network net = rebuild(envelope.at("architecture").get<std::string>(), input,
                          envelope.at("layers"));
    if (net.num_classes() != envelope.at("num_classes").get<Eigen::Index>()) {
      throw ValidationError("model: class count does not match the layer stack");
    }

    std::map<std::string, json> tensors;
    for (const auto& t : envelope.at("tensors")) tensors[t.at("name").get<std::string>()] = t;
    auto fetch = [&](const std::string& name, const std::vector<Eigen::Index>& expect,
                     double* out) {
      const auto it = tensors.find(name);
      if (it == tensors.end()) throw ValidationError("model: missing tensor '" + name + "'");
      const auto& t = it->second;
      if (t.at("shape").get<std::vector<Eigen::Index>>() != expect) {
        throw ValidationError("model: tensor '" + name + "' has an unexpected shape");
      }
      Eigen::Index count = 1;
      for (const auto d : expect) count *= d;
      if (t.at("count").get<Eigen::Index>() != count) {
        throw ValidationError("model: tensor '" + name + "' has an inconsistent count");
      }
      read_floats(sidecar, t.at("offset").get<std::size_t>(), out, count, name);
    };
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
      for (auto& p : net.layers()[i]->parameters()) {
        fetch("layer" + std::to_string(i) + "." + p.name, p.shape, p.value.data());
      }
    }
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mean(
        input.height, input.width * input.channels);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> stddev(
        mean.rows(), mean.cols());
    fetch("normalization.mean", {mean.rows(), mean.cols()}, mean.data());
    fetch("normalization.stddev", {stddev.rows(), stddev.cols()}, stddev.data());

    std::vector<FeatureFamily> families;
    for (const auto& f : envelope.at("feature_families")) {
      families.push_back(family_from_name(f.get<std::string>()));
    }
    ModelBundle model{std::move(net), {mean, stddev}, std::move(families),
                      envelope.at("n_channels").get<Eigen::Index>(),
                      envelope.at("n_bands").get<std::size_t>(),
                      envelope.at("seed").get<std::uint64_t>()};
    if (model.n_channels * static_cast<Eigen::Index>(model.n_bands) != input.height ||
        model.n_channels * static_cast<Eigen::Index>(model.families.size()) !=
            input.width * input.channels) {
      throw ValidationError("model: feature layout does not match the input shape");
    }
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: malformed envelope: ") + e.what());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& json_path) {
  auto p = json_path;
  p.replace_extension(".bin");
  return p;
}

void save_model(const std::filesystem::path& json_path, const ModelBundle& model) {
  const auto bin_path = sidecar_path(json_path);
  const auto [text, bin] = encode_model(model, bin_path.filename().string());
  write_file(bin_path, bin);
  write_file(json_path, text);
}

ModelBundle load_model(const std::filesystem::path& json_path) {
  const auto text = read_file(json_path);
  json envelope;
  std::string sidecar_name;
  try {
    sidecar_name = json::parse(text).at("parameters_file").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: malformed envelope: ") + e.what());
  }
  return decode_model(text, read_file(json_path.parent_path() / sidecar_name));
}

}  // namespace sznet::nn
