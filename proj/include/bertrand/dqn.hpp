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

#ifndef BERTRAND_DQN_HPP_
#define BERTRAND_DQN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bertrand/nn.hpp"
#include "bertrand/rng.hpp"

namespace bertrand::dqn {

struct Transition {
  std::vector<double> state;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_state;

  bool operator==(const Transition&) const = default;
};

// Fixed-capacity FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition transition);
  // i-th oldest stored transition.
  const Transition& at(std::size_t i) const;
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }

  // `count` distinct indices, uniformly without replacement (Floyd's method).
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

 private:
  std::vector<Transition> storage_;
  std::size_t head_ = 0;  // slot of the oldest element once full
  std::size_t size_ = 0;
};

enum class TargetMode { kAverageReward, kDiscounted };

struct DqnConfig {
  TargetMode mode = TargetMode::kAverageReward;
  double lambda = 0.01;       // average-reward step size
  double gamma = 0.95;        // discount (kDiscounted only)
  std::size_t batch_size = 32;
  std::int64_t target_sync_period = 1000;
  double beta = 1e-4;         // exploration decay, epsilon_t = exp(-beta t)
  std::size_t capacity = 10000;
  std::size_t warmup = 1000;
  std::vector<std::size_t> hidden = {64, 64};
  nn::AdamConfig adam{1e-3};

  void validate() const;
};

// AverageReward: r - rbar + max_next. Discounted: r + gamma * max_next.
double td_target(const DqnConfig& config, double reward, double avg_reward,
                 double max_next_q);

class DqnAgent {
 public:
  DqnAgent(DqnConfig config, std::size_t input_dim, std::size_t num_actions,
           Rng& init_rng);

  // epsilon-greedy over Q(state, .) with exp(-beta t) exploration.
  std::size_t act(std::span<const double> state, std::int64_t t,
                  Rng& rng) const;
  std::size_t act_with_epsilon(std::span<const double> state, double epsilon,
                               Rng& rng) const;
  std::size_t greedy_action(std::span<const double> state) const;

  void store(Transition transition);

  // One minibatch regression step toward the targets, followed by the
  // average-reward update on `live` (the newest transition). Throws
  // InsufficientData below warmup. Returns the minibatch mean squared error.
  double train_step(const Transition& live, Rng& rng);

  // Stores the transition, trains once warm, and syncs the target network
  // every target_sync_period calls.
  void observe(Transition transition, Rng& rng);

  void sync_target();

  nn::Mlp export_weights() const { return local_; }
  void import_weights(const nn::Mlp& weights);

  const nn::Mlp& local() const { return local_; }
  const nn::Mlp& target() const { return target_; }
  double avg_reward() const { return avg_reward_; }
  void set_avg_reward(double value) { avg_reward_ = value; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const DqnConfig& config() const { return config_; }
  std::int64_t train_steps() const { return train_steps_; }
  std::int64_t env_steps() const { return env_steps_; }
  std::int64_t syncs() const { return syncs_; }

 private:
  double max_target_q(std::span<const double> state) const;

  DqnConfig config_;
  nn::Mlp local_;
  nn::Mlp target_;
  nn::Adam adam_;
  ReplayBuffer buffer_;
  double avg_reward_ = 0.0;
  std::int64_t train_steps_ = 0;
  std::int64_t env_steps_ = 0;
  std::int64_t syncs_ = 0;
  std::vector<double> grad_;
  nn::Mlp::Cache cache_;
};

}  // namespace bertrand::dqn

#endif  // BERTRAND_DQN_HPP_
