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

#include "bertrand/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bertrand/errors.hpp"

namespace bertrand::ppo {

void RolloutBuffer::clear() {
  states.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
}

void RolloutBuffer::check_consistent() const {
  const std::size_t n = actions.size();
  if (states.size() != n || log_probs.size() != n || rewards.size() != n ||
      values.size() != n) {
    throw InvalidParameter("rollout sequences differ in length");
  }
}

void PpoConfig::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) {
    throw InvalidParameter("PPO clip must lie in (0, 1)");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidParameter("PPO gamma must lie in [0, 1]");
  }
  if (minibatch_size == 0 || rollout_len < minibatch_size) {
    throw InvalidParameter("PPO needs 1 <= minibatch_size <= rollout_len");
  }
  if (update_epochs == 0) throw InvalidParameter("PPO update_epochs >= 1");
  if (!(value_coef >= 0.0) || !(entropy_coef >= 0.0)) {
    throw InvalidParameter("PPO loss coefficients must be >= 0");
  }
  if (hidden.empty()) throw InvalidParameter("PPO needs hidden layers");
}

std::vector<double> rewards_to_go(std::span<const double> rewards,
                                  double gamma, double bootstrap_value) {
  if (rewards.empty()) throw InvalidParameter("rewards_to_go on empty rewards");
  std::vector<double> out(rewards.size());
  double running = bootstrap_value;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    running = rewards[t] + gamma * running;
    out[t] = running;
  }
  return out;
}

std::vector<double> advantages(std::span<const double> returns,
                               std::span<const double> values,
                               bool normalize) {
  if (returns.size() != values.size()) {
    throw ShapeMismatch("returns and values differ in length");
  }
  std::vector<double> adv(returns.size());
  for (std::size_t t = 0; t < adv.size(); ++t) adv[t] = returns[t] - values[t];
  if (!normalize || adv.empty()) return adv;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double std_dev = std::sqrt(var / n);
  for (double& a : adv) a = (a - mean) / (std_dev + 1e-8);
  return adv;
}

double clipped_objective_term(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

double surrogate_objective(const nn::Mlp& actor, const RolloutBuffer& buffer,
                           std::span<const double> advantages,
                           std::span<const std::size_t> batch, double clip,
                           double entropy_coef, std::span<double> grad,
                           double* mean_entropy) {
  if (batch.empty()) throw InvalidParameter("empty PPO minibatch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  nn::Mlp::Cache cache;
  std::vector<double> out_grad(actor.output_dim());
  double objective = 0.0;
  double entropy_sum = 0.0;
  for (std::size_t idx : batch) {
    actor.forward(buffer.states.at(idx), cache);
    const nn::Categorical dist(cache.inputs.back());
    const std::size_t a = buffer.actions.at(idx);
    const double adv = advantages[idx];
    const double ratio =
        std::exp(dist.log_probs()[a] - buffer.log_probs.at(idx));
    const double entropy = dist.entropy();
    entropy_sum += entropy;
    objective += scale * (clipped_objective_term(ratio, adv, clip) +
                          entropy_coef * entropy);
    if (grad.empty()) continue;
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * adv;
    const double d_ratio = unclipped <= clipped ? adv : 0.0;
    const auto& p = dist.probs();
    const auto& logp = dist.log_probs();
    for (std::size_t j = 0; j < out_grad.size(); ++j) {
      const double d_logp = (j == a ? 1.0 : 0.0) - p[j];
      const double d_entropy = p[j] > 0.0 ? -p[j] * (logp[j] + entropy) : 0.0;
      out_grad[j] =
          scale * (d_ratio * ratio * d_logp + entropy_coef * d_entropy);
    }
    actor.backward(cache, out_grad, grad);
  }
  if (mean_entropy) *mean_entropy = entropy_sum * scale;
  return objective;
}

double value_loss(const nn::Mlp& critic, const RolloutBuffer& buffer,
                  std::span<const double> returns,
                  std::span<const std::size_t> batch, double value_coef,
                  std::span<double> grad) {
  if (batch.empty()) throw InvalidParameter("empty PPO minibatch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  nn::Mlp::Cache cache;
  double loss = 0.0;
  for (std::size_t idx : batch) {
    critic.forward(buffer.states.at(idx), cache);
    const double error = cache.inputs.back()[0] - returns[idx];
    loss += value_coef * scale * error * error;
    if (grad.empty()) continue;
    const double out_grad = 2.0 * value_coef * scale * error;
    critic.backward(cache, std::span<const double>(&out_grad, 1), grad);
  }
  return loss;
}

namespace {

std::vector<std::size_t> layer_dims(const std::vector<std::size_t>& hidden,
                                    std::size_t in, std::size_t out) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

PpoAgent::PpoAgent(PpoConfig config, std::size_t input_dim,
                   std::size_t num_actions, Rng& init_rng)
    : config_(std::move(config)) {
  config_.validate();
  actor_ = nn::Mlp::he_uniform(layer_dims(config_.hidden, input_dim, num_actions),
                               init_rng);
  critic_ =
      nn::Mlp::he_uniform(layer_dims(config_.hidden, input_dim, 1), init_rng);
  actor_adam_ = nn::Adam(actor_.parameter_count(), config_.actor_adam);
  critic_adam_ = nn::Adam(critic_.parameter_count(), config_.critic_adam);
}

ActResult PpoAgent::act(std::span<const double> state, Rng& rng) const {
  const nn::Categorical dist(actor_.forward(state));
  ActResult out;
  out.action = dist.sample(rng);
  out.log_prob = dist.log_probs()[out.action];
  out.value = value(state);
  return out;
}

std::size_t PpoAgent::greedy_action(std::span<const double> state) const {
  return nn::argmax(actor_.forward(state));
}

std::vector<double> PpoAgent::action_probabilities(
    std::span<const double> state) const {
  return nn::Categorical(actor_.forward(state)).probs();
}

double PpoAgent::value(std::span<const double> state) const {
  return critic_.forward(state)[0];
}

void PpoAgent::record(std::span<const double> state, const ActResult& step,
                      double reward) {
  rollout_.states.emplace_back(state.begin(), state.end());
  rollout_.actions.push_back(step.action);
  rollout_.log_probs.push_back(step.log_prob);
  rollout_.rewards.push_back(reward);
  rollout_.values.push_back(step.value);
}

UpdateStats PpoAgent::update(const RolloutBuffer& buffer,
                             double bootstrap_value, Rng& rng) {
  if (buffer.empty()) throw InvalidParameter("PPO update on an empty buffer");
  buffer.check_consistent();
  const std::vector<double> returns =
      rewards_to_go(buffer.rewards, config_.gamma, bootstrap_value);
  const std::vector<double> adv =
      advantages(returns, buffer.values, config_.normalize_advantages);

  const std::size_t n = buffer.size();
  const std::size_t mb = std::min(config_.minibatch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> actor_grad(actor_.parameter_count());
  std::vector<double> critic_grad(critic_.parameter_count());

  UpdateStats stats;
  std::size_t batches = 0;
  for (std::size_t epoch = 0; epoch < config_.update_epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    for (std::size_t start = 0; start < n; start += mb) {
      const std::size_t stop = std::min(start + mb, n);
      const std::span<const std::size_t> batch(order.data() + start,
                                               stop - start);
      std::fill(actor_grad.begin(), actor_grad.end(), 0.0);
      std::fill(critic_grad.begin(), critic_grad.end(), 0.0);
      double entropy = 0.0;
      const double objective =
          surrogate_objective(actor_, buffer, adv, batch, config_.clip,
                              config_.entropy_coef, actor_grad, &entropy);
      // Adam minimizes; the surrogate is maximized.
      for (double& g : actor_grad) g = -g;
      const double v_loss = value_loss(critic_, buffer, returns, batch,
                                       config_.value_coef, critic_grad);
      actor_adam_.step(actor_.parameters(), actor_grad);
      critic_adam_.step(critic_.parameters(), critic_grad);

      stats.policy_loss += -(objective - config_.entropy_coef * entropy);
      stats.value_loss += v_loss;
      stats.entropy += entropy;
      ++batches;
    }
  }
  stats.policy_loss /= static_cast<double>(batches);
  stats.value_loss /= static_cast<double>(batches);
  stats.entropy /= static_cast<double>(batches);
  ++updates_;
  return stats;
}

bool PpoAgent::maybe_update(std::span<const double> next_state, Rng& rng) {
  if (rollout_.size() < config_.rollout_len) return false;
  update(rollout_, value(next_state), rng);
  rollout_.clear();
  return true;
}

void PpoAgent::import_weights(const nn::Mlp& actor, const nn::Mlp& critic) {
  if (actor.layer_dims() != actor_.layer_dims() ||
      critic.layer_dims() != critic_.layer_dims()) {
    throw ShapeMismatch("imported PPO weights have a different topology");
  }
  actor_ = actor;
  critic_ = critic;
}

}  // namespace bertrand::ppo
