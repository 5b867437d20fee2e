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

#ifndef BERTRAND_AGENTS_HPP_
#define BERTRAND_AGENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>

#include "bertrand/config.hpp"
#include "bertrand/dqn.hpp"
#include "bertrand/nn.hpp"
#include "bertrand/ppo.hpp"
#include "bertrand/pricing_env.hpp"
#include "bertrand/record.hpp"
#include "bertrand/rng.hpp"
#include "bertrand/tql.hpp"

namespace bertrand {

// A seat at the market. Each agent owns its random stream.
class PricingAgent {
 public:
  virtual ~PricingAgent() = default;

  virtual AgentKind kind() const = 0;
  virtual bool learning() const = 0;

  // `t` is the number of steps already played.
  virtual std::size_t act(const Observation& obs, std::int64_t t) = 0;
  virtual void observe(const Observation& obs, std::size_t action,
                       double reward, const Observation& next,
                       std::int64_t t) = 0;
  virtual std::size_t greedy_action(const Observation& obs) const = 0;

  virtual std::int64_t update_count() const { return 0; }
  virtual PolicySnapshot snapshot() const = 0;
};

struct AgentContext {
  std::uint64_t num_states = 0;   // tabular state-space size
  std::size_t input_dim = 0;      // neural feature length
  std::size_t num_actions = 0;
  std::int64_t horizon = 0;       // resolves the automatic beta
};

AgentContext make_context(const StateSpec& state, std::size_t m,
                          NeuralEncoding encoding, std::int64_t horizon);

// Exploration decay in effect for `config` under `horizon`.
double resolved_beta(const AgentConfig& config, std::int64_t horizon);

class TqlPricer final : public PricingAgent {
 public:
  TqlPricer(tql::TqlConfig config, const AgentContext& ctx, Rng rng);

  AgentKind kind() const override { return AgentKind::kTql; }
  bool learning() const override { return true; }
  std::size_t act(const Observation& obs, std::int64_t t) override;
  void observe(const Observation& obs, std::size_t action, double reward,
               const Observation& next, std::int64_t t) override;
  std::size_t greedy_action(const Observation& obs) const override;
  std::int64_t update_count() const override { return agent_.update_count(); }
  PolicySnapshot snapshot() const override;

  const tql::TqlAgent& agent() const { return agent_; }

 private:
  tql::TqlAgent agent_;
  Rng rng_;
};

// Greedy, never learns.
class FrozenTqlPricer final : public PricingAgent {
 public:
  explicit FrozenTqlPricer(tql::GreedyPolicy policy);

  AgentKind kind() const override { return AgentKind::kTql; }
  bool learning() const override { return false; }
  std::size_t act(const Observation& obs, std::int64_t t) override;
  void observe(const Observation&, std::size_t, double, const Observation&,
               std::int64_t) override {}
  std::size_t greedy_action(const Observation& obs) const override;
  PolicySnapshot snapshot() const override;

 private:
  tql::GreedyPolicy policy_;
};

class DqnPricer final : public PricingAgent {
 public:
  DqnPricer(dqn::DqnConfig config, const AgentContext& ctx, Rng rng);

  AgentKind kind() const override { return AgentKind::kDqn; }
  bool learning() const override { return true; }
  std::size_t act(const Observation& obs, std::int64_t t) override;
  void observe(const Observation& obs, std::size_t action, double reward,
               const Observation& next, std::int64_t t) override;
  std::size_t greedy_action(const Observation& obs) const override;
  std::int64_t update_count() const override { return agent_.train_steps(); }
  PolicySnapshot snapshot() const override;

  dqn::DqnAgent& agent() { return agent_; }
  const dqn::DqnAgent& agent() const { return agent_; }

 private:
  dqn::DqnAgent agent_;
  Rng rng_;
};

class PpoPricer final : public PricingAgent {
 public:
  PpoPricer(ppo::PpoConfig config, const AgentContext& ctx, Rng rng);

  AgentKind kind() const override { return AgentKind::kPpo; }
  bool learning() const override { return true; }
  std::size_t act(const Observation& obs, std::int64_t t) override;
  void observe(const Observation& obs, std::size_t action, double reward,
               const Observation& next, std::int64_t t) override;
  std::size_t greedy_action(const Observation& obs) const override;
  std::int64_t update_count() const override { return agent_.updates(); }
  PolicySnapshot snapshot() const override;

  ppo::PpoAgent& agent() { return agent_; }
  const ppo::PpoAgent& agent() const { return agent_; }

 private:
  ppo::PpoAgent agent_;
  Rng rng_;
  ppo::ActResult pending_;
  bool has_pending_ = false;
};

// A transferred network acting greedily: argmax of Q-values for DQN, the
// mode of the policy for PPO. Weights change only through `load`.
class FrozenNetPricer final : public PricingAgent {
 public:
  FrozenNetPricer(AgentKind kind, nn::Mlp net);

  AgentKind kind() const override { return kind_; }
  bool learning() const override { return false; }
  std::size_t act(const Observation& obs, std::int64_t t) override;
  void observe(const Observation&, std::size_t, double, const Observation&,
               std::int64_t) override {}
  std::size_t greedy_action(const Observation& obs) const override;
  PolicySnapshot snapshot() const override;

  void load(const nn::Mlp& net);
  const nn::Mlp& net() const { return net_; }

 private:
  AgentKind kind_;
  nn::Mlp net_;
};

class FixedPricer final : public PricingAgent {
 public:
  explicit FixedPricer(std::size_t action) : action_(action) {}

  AgentKind kind() const override { return AgentKind::kFixed; }
  bool learning() const override { return false; }
  std::size_t act(const Observation&, std::int64_t) override { return action_; }
  void observe(const Observation&, std::size_t, double, const Observation&,
               std::int64_t) override {}
  std::size_t greedy_action(const Observation&) const override {
    return action_;
  }
  PolicySnapshot snapshot() const override;

 private:
  std::size_t action_;
};

std::unique_ptr<PricingAgent> make_agent(const AgentConfig& config,
                                         const AgentContext& ctx, Rng rng);

}  // namespace bertrand

#endif  // BERTRAND_AGENTS_HPP_
