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

#ifndef BERTRAND_PPO_HPP_
#define BERTRAND_PPO_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bertrand/nn.hpp"
#include "bertrand/rng.hpp"

namespace bertrand::ppo {

// One on-policy collection window.
struct RolloutBuffer {
  std::vector<std::vector<double>> states;
  std::vector<std::size_t> actions;
  std::vector<double> log_probs;  // log pi_old(a|s) at collection time
  std::vector<double> rewards;
  std::vector<double> values;     // V_phi(s) at collection time

  std::size_t size() const { return actions.size(); }
  bool empty() const { return actions.empty(); }
  void clear();
  // Throws InvalidParameter when the parallel sequences disagree in length.
  void check_consistent() const;
};

struct PpoConfig {
  double clip = 0.2;
  double gamma = 0.99;
  std::size_t rollout_len = 1000;
  std::size_t update_epochs = 4;
  std::size_t minibatch_size = 250;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  bool normalize_advantages = true;
  std::vector<std::size_t> hidden = {64, 64};
  nn::AdamConfig actor_adam{3e-4};
  nn::AdamConfig critic_adam{1e-3};

  void validate() const;
};

// R_t = sum_{k>=t} gamma^(k-t) r_k + gamma^(n-t) * bootstrap_value.
std::vector<double> rewards_to_go(std::span<const double> rewards,
                                  double gamma, double bootstrap_value);

// R_t - V(s_t), optionally normalized to zero mean and unit variance.
std::vector<double> advantages(std::span<const double> returns,
                               std::span<const double> values, bool normalize);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A).
double clipped_objective_term(double ratio, double advantage, double clip);

// Mean clipped surrogate plus entropy_coef * mean entropy over the samples in
// `batch`. When `grad` is non-null, accumulates the gradient of the objective
// with respect to the actor parameters into it.
double surrogate_objective(const nn::Mlp& actor, const RolloutBuffer& buffer,
                           std::span<const double> advantages,
                           std::span<const std::size_t> batch, double clip,
                           double entropy_coef, std::span<double> grad = {},
                           double* mean_entropy = nullptr);

// value_coef * mean (V(s) - R)^2 over `batch`; gradient accumulated as above.
double value_loss(const nn::Mlp& critic, const RolloutBuffer& buffer,
                  std::span<const double> returns,
                  std::span<const std::size_t> batch, double value_coef,
                  std::span<double> grad = {});

struct ActResult {
  std::size_t action = 0;
  double log_prob = 0.0;
  double value = 0.0;
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

class PpoAgent {
 public:
  PpoAgent(PpoConfig config, std::size_t input_dim, std::size_t num_actions,
           Rng& init_rng);

  ActResult act(std::span<const double> state, Rng& rng) const;
  // Mode of the policy; used by frozen copies.
  std::size_t greedy_action(std::span<const double> state) const;
  std::vector<double> action_probabilities(std::span<const double> state) const;
  double value(std::span<const double> state) const;

  // Appends one collected step to the rollout.
  void record(std::span<const double> state, const ActResult& step,
              double reward);

  // Runs update_epochs passes of shuffled minibatches over `buffer`, with the
  // infinite-horizon tail closed by bootstrap_value. Throws InvalidParameter
  // on an empty buffer.
  UpdateStats update(const RolloutBuffer& buffer, double bootstrap_value,
                     Rng& rng);

  // Updates on the internal rollout when it is full, then clears it. Returns
  // true if an update ran.
  bool maybe_update(std::span<const double> next_state, Rng& rng);

  const RolloutBuffer& rollout() const { return rollout_; }
  const nn::Mlp& actor() const { return actor_; }
  const nn::Mlp& critic() const { return critic_; }
  void import_weights(const nn::Mlp& actor, const nn::Mlp& critic);
  const PpoConfig& config() const { return config_; }
  std::int64_t updates() const { return updates_; }

 private:
  PpoConfig config_;
  nn::Mlp actor_;
  nn::Mlp critic_;
  nn::Adam actor_adam_;
  nn::Adam critic_adam_;
  RolloutBuffer rollout_;
  std::int64_t updates_ = 0;
};

}  // namespace bertrand::ppo

#endif  // BERTRAND_PPO_HPP_
