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

#ifndef BERTRAND_NN_HPP_
#define BERTRAND_NN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bertrand/rng.hpp"

namespace bertrand::nn {

// Fully connected network with ReLU hidden layers and a linear output layer.
// Parameters live in one flat vector: for each layer, the weight matrix
// (out x in, row-major) followed by its bias vector.
class Mlp {
 public:
  Mlp() = default;
  // Zero-initialized network. `layer_dims` = {input, hidden..., output}.
  explicit Mlp(std::vector<std::size_t> layer_dims);

  // He-style uniform fan-in initialization: W ~ U(-sqrt(6/in), sqrt(6/in)),
  // biases zero.
  static Mlp he_uniform(std::vector<std::size_t> layer_dims, Rng& rng);

  // Activations recorded by forward() for use in backward().
  struct Cache {
    // inputs[l] is the input of layer l; inputs.back() is the network output.
    std::vector<std::vector<double>> inputs;
    bool empty() const { return inputs.empty(); }
  };

  std::vector<double> forward(std::span<const double> input) const;
  // Writes the output into cache.inputs.back().
  void forward(std::span<const double> input, Cache& cache) const;

  // Accumulates d(loss)/d(params) into `param_grad` given d(loss)/d(output).
  // Returns nothing; throws ShapeMismatch / InvalidParameter on bad inputs or
  // an empty cache.
  void backward(const Cache& cache, std::span<const double> output_grad,
                std::span<double> param_grad) const;

  std::size_t input_dim() const { return dims_.front(); }
  std::size_t output_dim() const { return dims_.back(); }
  std::size_t layer_count() const { return dims_.size() - 1; }
  const std::vector<std::size_t>& layer_dims() const { return dims_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  bool operator==(const Mlp& other) const = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Σ (in_l * out_l + out_l).
std::size_t parameter_count(const std::vector<std::size_t>& layer_dims);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t parameter_count, AdamConfig config);

  // One bias-corrected Adam update of `params` along `grads`.
  void step(std::span<double> params, std::span<const double> grads);

  std::size_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t steps_ = 0;
};

// Softmax distribution over discrete actions, computed in max-subtracted form.
class Categorical {
 public:
  explicit Categorical(std::span<const double> logits);

  const std::vector<double>& probs() const { return probs_; }
  const std::vector<double>& log_probs() const { return log_probs_; }
  double entropy() const;
  std::size_t sample(Rng& rng) const;
  // Most probable action, lowest index on ties.
  std::size_t mode() const;

 private:
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

// Index of the largest value, lowest index on ties.
std::size_t argmax(std::span<const double> values);

// Snapshot files: `<stem>.bin` holds the parameters as little-endian float64,
// `<stem>.json` records layer dims, parameter count and a label.
void save_parameters(const Mlp& net, const std::filesystem::path& stem,
                     const std::string& label);
Mlp load_parameters(const std::filesystem::path& stem,
                    std::string* label = nullptr);

// Little-endian float64 helpers shared with the Q-table format.
void write_f64_le(std::ostream& out, std::span<const double> values);
void read_f64_le(std::istream& in, std::span<double> values);
void write_u64_le(std::ostream& out, std::uint64_t value);
std::uint64_t read_u64_le(std::istream& in);

}  // namespace bertrand::nn

#endif  // BERTRAND_NN_HPP_
