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

#include "bertrand/agents.hpp"

#include <utility>

#include "bertrand/errors.hpp"

namespace bertrand {

AgentContext make_context(const StateSpec& state, std::size_t m,
                          NeuralEncoding encoding, std::int64_t horizon) {
  AgentContext ctx;
  ctx.num_states = state_space_size(state, m);
  ctx.input_dim = neural_input_dim(state, m, encoding);
  ctx.num_actions = m;
  ctx.horizon = horizon;
  return ctx;
}

double resolved_beta(const AgentConfig& config, std::int64_t horizon) {
  if (config.beta) return *config.beta;
  return tql::TqlConfig::beta_for_horizon(horizon);
}

// TQL ------------------------------------------------------------------

TqlPricer::TqlPricer(tql::TqlConfig config, const AgentContext& ctx, Rng rng)
    : agent_(config, ctx.num_states, ctx.num_actions), rng_(std::move(rng)) {}

std::size_t TqlPricer::act(const Observation& obs, std::int64_t t) {
  return agent_.select_action(obs.index, t, rng_);
}

void TqlPricer::observe(const Observation& obs, std::size_t action,
                        double reward, const Observation& next, std::int64_t) {
  agent_.update(obs.index, action, reward, next.index);
}

std::size_t TqlPricer::greedy_action(const Observation& obs) const {
  return agent_.greedy_action(obs.index);
}

PolicySnapshot TqlPricer::snapshot() const {
  PolicySnapshot snap;
  snap.kind = AgentKind::kTql;
  snap.table = agent_.freeze().shared_table();
  return snap;
}

FrozenTqlPricer::FrozenTqlPricer(tql::GreedyPolicy policy)
    : policy_(std::move(policy)) {}

std::size_t FrozenTqlPricer::act(const Observation& obs, std::int64_t) {
  return policy_.act(obs.index);
}

std::size_t FrozenTqlPricer::greedy_action(const Observation& obs) const {
  return policy_.act(obs.index);
}

PolicySnapshot FrozenTqlPricer::snapshot() const {
  PolicySnapshot snap;
  snap.kind = AgentKind::kTql;
  snap.table = policy_.shared_table();
  return snap;
}

// DQN ------------------------------------------------------------------

namespace {

Rng split_init(Rng& rng) {
  // Network init draws from its own child stream so that exploration draws
  // do not depend on the parameter count.
  return make_stream(rng(), 0x1417);
}

}  // namespace

DqnPricer::DqnPricer(dqn::DqnConfig config, const AgentContext& ctx, Rng rng)
    : agent_([&] {
        Rng init = split_init(rng);
        return dqn::DqnAgent(std::move(config), ctx.input_dim, ctx.num_actions,
                             init);
      }()),
      rng_(std::move(rng)) {}

std::size_t DqnPricer::act(const Observation& obs, std::int64_t t) {
  return agent_.act(obs.features, t, rng_);
}

void DqnPricer::observe(const Observation& obs, std::size_t action,
                        double reward, const Observation& next, std::int64_t) {
  agent_.observe(dqn::Transition{obs.features, action, reward, next.features},
                 rng_);
}

std::size_t DqnPricer::greedy_action(const Observation& obs) const {
  return agent_.greedy_action(obs.features);
}

PolicySnapshot DqnPricer::snapshot() const {
  PolicySnapshot snap;
  snap.kind = AgentKind::kDqn;
  snap.nets = {agent_.local()};
  return snap;
}

// PPO ------------------------------------------------------------------

PpoPricer::PpoPricer(ppo::PpoConfig config, const AgentContext& ctx, Rng rng)
    : agent_([&] {
        Rng init = split_init(rng);
        return ppo::PpoAgent(std::move(config), ctx.input_dim, ctx.num_actions,
                             init);
      }()),
      rng_(std::move(rng)) {}

std::size_t PpoPricer::act(const Observation& obs, std::int64_t) {
  pending_ = agent_.act(obs.features, rng_);
  has_pending_ = true;
  return pending_.action;
}

void PpoPricer::observe(const Observation& obs, std::size_t action,
                        double reward, const Observation& next, std::int64_t) {
  if (!has_pending_ || pending_.action != action) {
    throw InvalidParameter("PPO observe without a matching act");
  }
  agent_.record(obs.features, pending_, reward);
  has_pending_ = false;
  agent_.maybe_update(next.features, rng_);
}

std::size_t PpoPricer::greedy_action(const Observation& obs) const {
  return agent_.greedy_action(obs.features);
}

PolicySnapshot PpoPricer::snapshot() const {
  PolicySnapshot snap;
  snap.kind = AgentKind::kPpo;
  snap.nets = {agent_.actor(), agent_.critic()};
  return snap;
}

// Frozen networks --------------------------------------------------------

FrozenNetPricer::FrozenNetPricer(AgentKind kind, nn::Mlp net)
    : kind_(kind), net_(std::move(net)) {
  if (kind_ != AgentKind::kDqn && kind_ != AgentKind::kPpo) {
    throw InvalidParameter("frozen network agents must be dqn or ppo");
  }
}

std::size_t FrozenNetPricer::act(const Observation& obs, std::int64_t) {
  return greedy_action(obs);
}

std::size_t FrozenNetPricer::greedy_action(const Observation& obs) const {
  // Softmax is monotone, so the policy mode is the argmax of the logits.
  return nn::argmax(net_.forward(obs.features));
}

void FrozenNetPricer::load(const nn::Mlp& net) {
  if (net.layer_dims() != net_.layer_dims()) {
    throw ShapeMismatch("transferred network has different layer dims");
  }
  net_ = net;
}

PolicySnapshot FrozenNetPricer::snapshot() const {
  PolicySnapshot snap;
  snap.kind = kind_;
  snap.nets = {net_};
  return snap;
}

PolicySnapshot FixedPricer::snapshot() const {
  PolicySnapshot snap;
  snap.kind = AgentKind::kFixed;
  return snap;
}

std::unique_ptr<PricingAgent> make_agent(const AgentConfig& config,
                                         const AgentContext& ctx, Rng rng) {
  switch (config.kind) {
    case AgentKind::kTql: {
      tql::TqlConfig c = config.tql;
      c.beta = resolved_beta(config, ctx.horizon);
      return std::make_unique<TqlPricer>(c, ctx, std::move(rng));
    }
    case AgentKind::kDqn: {
      dqn::DqnConfig c = config.dqn;
      c.beta = resolved_beta(config, ctx.horizon);
      return std::make_unique<DqnPricer>(std::move(c), ctx, std::move(rng));
    }
    case AgentKind::kPpo:
      return std::make_unique<PpoPricer>(config.ppo, ctx, std::move(rng));
    case AgentKind::kFixed:
      if (config.fixed_action >= ctx.num_actions) {
        throw InvalidParameter("fixed action outside the price grid");
      }
      return std::make_unique<FixedPricer>(config.fixed_action);
  }
  throw InvalidParameter("unknown agent kind");
}

}  // namespace bertrand
