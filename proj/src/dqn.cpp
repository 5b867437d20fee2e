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

#include "bertrand/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "bertrand/errors.hpp"

namespace bertrand::dqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw InvalidParameter("replay capacity must be >= 1");
}

void ReplayBuffer::push(Transition transition) {
  if (size_ < storage_.size()) {
    storage_[size_++] = std::move(transition);
    return;
  }
  storage_[head_] = std::move(transition);
  head_ = (head_ + 1) % storage_.size();
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw InvalidParameter("replay index out of range");
  return storage_[(head_ + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count,
                                                      Rng& rng) const {
  if (count > size_) {
    throw InsufficientData("cannot sample " + std::to_string(count) +
                           " distinct transitions from " +
                           std::to_string(size_));
  }
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  for (std::size_t j = size_ - count; j < size_; ++j) {
    const auto candidate = static_cast<std::size_t>(uniform_index(rng, j + 1));
    if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end()) {
      chosen.push_back(candidate);
    } else {
      chosen.push_back(j);
    }
  }
  return chosen;
}

void DqnConfig::validate() const {
  if (batch_size == 0 || batch_size > capacity) {
    throw InvalidParameter("DQN batch size must lie in [1, capacity]");
  }
  if (target_sync_period < 1) {
    throw InvalidParameter("DQN target sync period must be >= 1");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidParameter("DQN lambda must lie in [0, 1]");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidParameter("DQN gamma must lie in [0, 1)");
  }
  if (!(beta >= 0.0)) throw InvalidParameter("DQN beta must be >= 0");
  if (hidden.empty()) throw InvalidParameter("DQN needs hidden layers");
}

double td_target(const DqnConfig& config, double reward, double avg_reward,
                 double max_next_q) {
  if (config.mode == TargetMode::kAverageReward) {
    return reward - avg_reward + max_next_q;
  }
  return reward + config.gamma * max_next_q;
}

namespace {

std::vector<std::size_t> layer_dims(const DqnConfig& config, std::size_t in,
                                    std::size_t out) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

DqnAgent::DqnAgent(DqnConfig config, std::size_t input_dim,
                   std::size_t num_actions, Rng& init_rng)
    : config_(std::move(config)), buffer_(std::max<std::size_t>(config_.capacity, 1)) {
  config_.validate();
  local_ = nn::Mlp::he_uniform(layer_dims(config_, input_dim, num_actions),
                               init_rng);
  target_ = local_;
  adam_ = nn::Adam(local_.parameter_count(), config_.adam);
  grad_.assign(local_.parameter_count(), 0.0);
}

std::size_t DqnAgent::greedy_action(std::span<const double> state) const {
  return nn::argmax(local_.forward(state));
}

std::size_t DqnAgent::act_with_epsilon(std::span<const double> state,
                                       double epsilon, Rng& rng) const {
  if (epsilon > 0.0 && uniform01(rng) < epsilon) {
    return static_cast<std::size_t>(uniform_index(rng, local_.output_dim()));
  }
  return greedy_action(state);
}

std::size_t DqnAgent::act(std::span<const double> state, std::int64_t t,
                          Rng& rng) const {
  return act_with_epsilon(
      state, std::exp(-config_.beta * static_cast<double>(t)), rng);
}

void DqnAgent::store(Transition transition) {
  if (transition.state.size() != local_.input_dim() ||
      transition.next_state.size() != local_.input_dim()) {
    throw ShapeMismatch("transition state does not match network input");
  }
  if (transition.action >= local_.output_dim()) {
    throw InvalidParameter("transition action outside the action space");
  }
  buffer_.push(std::move(transition));
}

double DqnAgent::max_target_q(std::span<const double> state) const {
  const std::vector<double> q = target_.forward(state);
  return *std::max_element(q.begin(), q.end());
}

double DqnAgent::train_step(const Transition& live, Rng& rng) {
  const std::size_t needed = std::max(config_.warmup, config_.batch_size);
  if (buffer_.size() < needed) {
    throw InsufficientData("replay holds " + std::to_string(buffer_.size()) +
                           " transitions, training needs " +
                           std::to_string(needed));
  }
  const std::vector<std::size_t> batch =
      buffer_.sample_indices(config_.batch_size, rng);
  std::fill(grad_.begin(), grad_.end(), 0.0);
  std::vector<double> out_grad(local_.output_dim(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t idx : batch) {
    const Transition& tr = buffer_.at(idx);
    const double target =
        td_target(config_, tr.reward, avg_reward_, max_target_q(tr.next_state));
    local_.forward(tr.state, cache_);
    const double error = cache_.inputs.back()[tr.action] - target;
    loss += error * error * scale;
    std::fill(out_grad.begin(), out_grad.end(), 0.0);
    out_grad[tr.action] = 2.0 * error * scale;
    local_.backward(cache_, out_grad, grad_);
  }
  adam_.step(local_.parameters(), grad_);

  if (config_.mode == TargetMode::kAverageReward) {
    const std::vector<double> q_now = target_.forward(live.state);
    avg_reward_ += config_.lambda * (live.reward - avg_reward_ +
                                     max_target_q(live.next_state) -
                                     q_now.at(live.action));
  }
  ++train_steps_;
  return loss;
}

void DqnAgent::observe(Transition transition, Rng& rng) {
  store(transition);
  ++env_steps_;
  if (buffer_.size() >= std::max(config_.warmup, config_.batch_size)) {
    train_step(transition, rng);
  }
  if (env_steps_ % config_.target_sync_period == 0) sync_target();
}

void DqnAgent::sync_target() {
  target_ = local_;
  ++syncs_;
}

void DqnAgent::import_weights(const nn::Mlp& weights) {
  if (weights.layer_dims() != local_.layer_dims()) {
    throw ShapeMismatch("imported weights have a different topology");
  }
  local_ = weights;
  target_ = weights;
}

}  // namespace bertrand::dqn
