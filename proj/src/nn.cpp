// Copyright 2026 The Bertrand Arena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bertrand/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include <nlohmann/json.hpp>

#include "bertrand/errors.hpp"

namespace bertrand::nn {

std::size_t parameter_count(const std::vector<std::size_t>& layer_dims) {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    count += layer_dims[l] * layer_dims[l + 1] + layer_dims[l + 1];
  }
  return count;
}

Mlp::Mlp(std::vector<std::size_t> layer_dims) : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2) {
    throw InvalidParameter("an MLP needs at least input and output dims");
  }
  for (std::size_t d : dims_) {
    if (d == 0) throw InvalidParameter("MLP layer dims must be positive");
  }
  offsets_.resize(dims_.size() - 1);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_[l] = offset;
    offset += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
  params_.assign(offset, 0.0);
}

Mlp Mlp::he_uniform(std::vector<std::size_t> layer_dims, Rng& rng) {
  Mlp net(std::move(layer_dims));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const std::size_t in = net.dims_[l];
    const std::size_t out = net.dims_[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    double* w = net.params_.data() + net.offsets_[l];
    for (std::size_t i = 0; i < in * out; ++i) {
      w[i] = (2.0 * uniform01(rng) - 1.0) * bound;
    }
  }
  return net;
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  Cache cache;
  forward(input, cache);
  return std::move(cache.inputs.back());
}

void Mlp::forward(std::span<const double> input, Cache& cache) const {
  if (dims_.empty()) throw InvalidParameter("forward on an empty network");
  if (input.size() != dims_.front()) {
    throw ShapeMismatch("MLP input has " + std::to_string(input.size()) +
                        " entries, expected " + std::to_string(dims_.front()));
  }
  const std::size_t layers = layer_count();
  cache.inputs.resize(layers + 1);
  cache.inputs[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = dims_[l];
    const std::size_t out = dims_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + in * out;
    const double* x = cache.inputs[l].data();
    std::vector<double>& y = cache.inputs[l + 1];
    y.resize(out);
    const bool hidden = l + 1 < layers;
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = w + o * in;
      // Four partial sums let the compiler vectorize; order is fixed, so
      // results stay reproducible.
      double part[4] = {0.0, 0.0, 0.0, 0.0};
      std::size_t i = 0;
      for (; i + 4 <= in; i += 4) {
        part[0] += row[i] * x[i];
        part[1] += row[i + 1] * x[i + 1];
        part[2] += row[i + 2] * x[i + 2];
        part[3] += row[i + 3] * x[i + 3];
      }
      double acc = b[o] + ((part[0] + part[1]) + (part[2] + part[3]));
      for (; i < in; ++i) acc += row[i] * x[i];
      y[o] = hidden && acc < 0.0 ? 0.0 : acc;
    }
  }
}

void Mlp::backward(const Cache& cache, std::span<const double> output_grad,
                   std::span<double> param_grad) const {
  const std::size_t layers = layer_count();
  if (cache.empty() || cache.inputs.size() != layers + 1) {
    throw InvalidParameter("backward requires a cache from forward()");
  }
  if (output_grad.size() != dims_.back()) {
    throw ShapeMismatch("output gradient size does not match output dim");
  }
  if (param_grad.size() != params_.size()) {
    throw ShapeMismatch("parameter gradient size does not match network");
  }
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> delta_prev;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = dims_[l];
    const std::size_t out = dims_[l + 1];
    const double* w = params_.data() + offsets_[l];
    double* gw = param_grad.data() + offsets_[l];
    double* gb = gw + in * out;
    const double* x = cache.inputs[l].data();
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* grow = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) grow[i] += d * x[i];
      gb[o] += d;
    }
    if (l == 0) break;
    delta_prev.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) delta_prev[i] += row[i] * d;
    }
    // ReLU: the stored activation is positive exactly where the unit was on.
    for (std::size_t i = 0; i < in; ++i) {
      if (!(x[i] > 0.0)) delta_prev[i] = 0.0;
    }
    std::swap(delta, delta_prev);
  }
}

Adam::Adam(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
  if (!(config.lr >= 0.0) || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
      !(config.beta2 >= 0.0 && config.beta2 < 1.0) || !(config.epsilon > 0.0)) {
    throw InvalidParameter("Adam hyperparameters out of range");
  }
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeMismatch("Adam state does not match parameter shape");
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grads[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grads[i] * grads[i];
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    params[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Categorical::Categorical(std::span<const double> logits) {
  if (logits.empty()) throw InvalidParameter("categorical needs >= 1 logit");
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  probs_.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs_[i] = std::exp(logits[i] - top);
    sum += probs_[i];
  }
  const double log_sum = std::log(sum);
  log_probs_.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    log_probs_[i] = logits[i] - top - log_sum;
    probs_[i] /= sum;
  }
}

double Categorical::entropy() const {
  double h = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > 0.0) h -= probs_[i] * log_probs_[i];
  }
  return h;
}

std::size_t Categorical::sample(Rng& rng) const {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    cumulative += probs_[i];
    if (u < cumulative) return i;
  }
  // Rounding left u above the final cumulative sum: take the last action with
  // non-zero mass.
  for (std::size_t i = probs_.size(); i-- > 0;) {
    if (probs_[i] > 0.0) return i;
  }
  return probs_.size() - 1;
}

std::size_t Categorical::mode() const { return argmax(probs_); }

void write_u64_le(std::ostream& out, std::uint64_t value) {
  char bytes[8];
  for (int b = 0; b < 8; ++b) {
    bytes[b] = static_cast<char>((value >> (8 * b)) & 0xffu);
  }
  out.write(bytes, 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw FormatError("unexpected end of binary data");
  }
  std::uint64_t value = 0;
  for (int b = 0; b < 8; ++b) {
    value |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  }
  return value;
}

void write_f64_le(std::ostream& out, std::span<const double> values) {
  for (double v : values) write_u64_le(out, std::bit_cast<std::uint64_t>(v));
}

void read_f64_le(std::istream& in, std::span<double> values) {
  for (double& v : values) v = std::bit_cast<double>(read_u64_le(in));
}

void save_parameters(const Mlp& net, const std::filesystem::path& stem,
                     const std::string& label) {
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path sidecar = stem;
  sidecar += ".json";
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw FormatError("cannot write " + bin.string());
    write_f64_le(out, net.parameters());
  }
  nlohmann::json meta;
  meta["format"] = "float64-le";
  meta["label"] = label;
  meta["layer_dims"] = net.layer_dims();
  meta["parameter_count"] = net.parameter_count();
  std::ofstream out(sidecar);
  if (!out) throw FormatError("cannot write " + sidecar.string());
  out << meta.dump(2) << '\n';
}

Mlp load_parameters(const std::filesystem::path& stem, std::string* label) {
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path sidecar = stem;
  sidecar += ".json";
  std::ifstream meta_in(sidecar);
  if (!meta_in) throw FormatError("missing weight sidecar " + sidecar.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed weight sidecar: " + std::string(e.what()));
  }
  if (meta.value("format", "") != "float64-le" ||
      !meta.contains("layer_dims") || !meta["layer_dims"].is_array()) {
    throw FormatError("weight sidecar lacks format/layer_dims");
  }
  const auto dims = meta["layer_dims"].get<std::vector<std::size_t>>();
  Mlp net(dims);
  if (meta.value("parameter_count", std::size_t{0}) != net.parameter_count()) {
    throw FormatError("weight sidecar parameter_count disagrees with dims");
  }
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw FormatError("missing weight file " + bin.string());
  read_f64_le(in, net.parameters());
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("weight file is longer than its sidecar declares");
  }
  if (label) *label = meta.value("label", "");
  return net;
}

}  // namespace bertrand::nn
