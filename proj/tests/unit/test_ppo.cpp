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

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "../support/gradcheck.hpp"
#include "bertrand/errors.hpp"
#include "bertrand/ppo.hpp"
#include "bertrand/rng.hpp"

namespace bertrand {
namespace {

using ppo::PpoAgent;
using ppo::PpoConfig;
using ppo::RolloutBuffer;

PpoConfig small_config() {
  PpoConfig c;
  c.rollout_len = 64;
  c.minibatch_size = 32;
  c.hidden = {16, 16};
  return c;
}

// Collects `n` steps from a stateless or random-state environment.
RolloutBuffer collect(const PpoAgent& agent, std::size_t n, std::size_t dim,
                      Rng& rng) {
  RolloutBuffer buf;
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> s(dim);
    for (double& x : s) x = uniform01(rng);
    const auto step = agent.act(s, rng);
    buf.states.push_back(s);
    buf.actions.push_back(step.action);
    buf.log_probs.push_back(step.log_prob);
    buf.rewards.push_back(uniform01(rng) - 0.5);
    buf.values.push_back(step.value);
  }
  return buf;
}

TEST(RewardsToGo, HandCases) {
  EXPECT_EQ(ppo::rewards_to_go(std::vector<double>{1, 2, 3}, 1.0, 0.0),
            (std::vector<double>{6, 5, 3}));
  EXPECT_EQ(ppo::rewards_to_go(std::vector<double>{1}, 0.5, 4.0),
            (std::vector<double>{3}));
  EXPECT_THROW(ppo::rewards_to_go(std::vector<double>{}, 0.9, 0.0),
               InvalidParameter);
}

TEST(RewardsToGo, MatchesBruteForce) {
  Rng rng = make_stream(1, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 200);
    std::vector<double> r(n);
    for (double& x : r) x = 2 * uniform01(rng) - 1;
    const double gamma = uniform01(rng);
    const double boot = 3 * uniform01(rng);
    const auto got = ppo::rewards_to_go(r, gamma, boot);
    for (std::size_t t = 0; t < n; ++t) {
      double want = 0.0;
      for (std::size_t k = t; k < n; ++k) want += std::pow(gamma, k - t) * r[k];
      want += std::pow(gamma, n - t) * boot;
      EXPECT_NEAR(got[t], want, 1e-12);
    }
  }
}

TEST(Advantages, HandAndNormalized) {
  const std::vector<double> ret{3.0, 1.0, 2.0};
  EXPECT_EQ(ppo::advantages(ret, ret, false), (std::vector<double>{0, 0, 0}));
  const std::vector<double> val{1.0, 2.0, 0.5};
  const auto raw = ppo::advantages(ret, val, false);
  EXPECT_EQ(raw, (std::vector<double>{2.0, -1.0, 1.5}));
  const auto norm = ppo::advantages(ret, val, true);
  // mean 5/6, population std sqrt(((7/6)^2 + (11/6)^2 + (2/3)^2) / 3)
  const double mean = 5.0 / 6.0;
  const double sd = std::sqrt((49.0 + 121.0 + 16.0) / 36.0 / 3.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(norm[i], (raw[i] - mean) / sd, 1e-7);
  EXPECT_LT(std::abs(std::accumulate(norm.begin(), norm.end(), 0.0)), 1e-9);
  EXPECT_THROW(ppo::advantages(ret, std::vector<double>{1.0}, false),
               ShapeMismatch);
}

TEST(ClippedTerm, HandCases) {
  EXPECT_DOUBLE_EQ(ppo::clipped_objective_term(1.5, 1.0, 0.2), 1.2);
  EXPECT_DOUBLE_EQ(ppo::clipped_objective_term(0.5, -1.0, 0.2), -0.8);
  for (double clip : {0.05, 0.2, 0.9}) {
    EXPECT_EQ(ppo::clipped_objective_term(1.0, 0.37, clip), 0.37);
    EXPECT_EQ(ppo::clipped_objective_term(1.0, -2.5, clip), -2.5);
  }
}

TEST(ClippedTerm, BoundedByClipTimesAdvantage) {
  Rng rng = make_stream(2, 0);
  for (int i = 0; i < 10000; ++i) {
    const double ratio = 3 * uniform01(rng);
    const double adv = 4 * uniform01(rng) - 2;
    const double v = ppo::clipped_objective_term(ratio, adv, 0.2);
    EXPECT_LE(v, 1.2 * std::abs(adv) + 1e-15);
    // Pessimistic bound: unclipped ratios only count when they lower the value.
    EXPECT_LE(v, std::clamp(ratio, 0.8, 1.2) * adv + 1e-15);
  }
}

TEST(Agent, ActIsDeterministicGivenSeed) {
  Rng ia = make_stream(3, 0);
  Rng ib = make_stream(3, 0);
  const PpoAgent a(small_config(), 2, 5, ia);
  const PpoAgent b(small_config(), 2, 5, ib);
  Rng ra = make_stream(3, 1);
  Rng rb = make_stream(3, 1);
  const std::vector<double> s{0.2, 0.9};
  for (int i = 0; i < 100; ++i) {
    const auto x = a.act(s, ra);
    const auto y = b.act(s, rb);
    EXPECT_EQ(x.action, y.action);
    EXPECT_EQ(x.log_prob, y.log_prob);
    EXPECT_EQ(x.value, y.value);
  }
  const auto p = a.action_probabilities(s);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
}

TEST(Update, FirstPassRatioIsOne) {
  Rng init = make_stream(4, 0);
  const PpoAgent agent(small_config(), 3, 4, init);
  Rng rng = make_stream(4, 1);
  const auto buf = collect(agent, 40, 3, rng);
  std::vector<double> adv(40);
  for (double& a : adv) a = 2 * uniform01(rng) - 1;
  std::vector<std::size_t> batch(40);
  std::iota(batch.begin(), batch.end(), 0);
  const double obj = ppo::surrogate_objective(agent.actor(), buf, adv, batch,
                                              0.2, 0.0);
  EXPECT_NEAR(obj, std::accumulate(adv.begin(), adv.end(), 0.0) / 40, 1e-12);
  for (std::size_t i = 0; i < 40; ++i) {
    const nn::Categorical d(agent.actor().forward(buf.states[i]));
    EXPECT_NEAR(std::exp(d.log_probs()[buf.actions[i]] - buf.log_probs[i]), 1.0,
                1e-12);
  }
}

TEST(Update, SurrogateGradientMatchesFiniteDifferences) {
  Rng init = make_stream(5, 0);
  PpoConfig c = small_config();
  c.hidden = {8, 8};
  PpoAgent agent(c, 2, 3, init);
  Rng rng = make_stream(5, 1);
  const auto buf = collect(agent, 12, 2, rng);
  // Move the actor off the collection policy so some ratios leave 1.
  agent.update(buf, 0.0, rng);
  std::vector<double> adv(12);
  for (double& a : adv) a = 2 * uniform01(rng) - 1;
  std::vector<std::size_t> batch(12);
  std::iota(batch.begin(), batch.end(), 0);
  const auto check = testing::check_surrogate_gradient(agent.actor(), buf, adv,
                                                       batch, 0.2, 0.01);
  EXPECT_LE(check.max_rel_error, 1e-4);
  EXPECT_GT(check.checked, 0u);
}

TEST(Update, ZeroLearningRateLeavesParameters) {
  PpoConfig c = small_config();
  c.actor_adam.lr = 0.0;
  c.critic_adam.lr = 0.0;
  Rng init = make_stream(6, 0);
  PpoAgent agent(c, 2, 3, init);
  const nn::Mlp actor = agent.actor();
  const nn::Mlp critic = agent.critic();
  Rng rng = make_stream(6, 1);
  const auto buf = collect(agent, 64, 2, rng);
  agent.update(buf, 0.0, rng);
  EXPECT_TRUE(agent.actor() == actor);
  EXPECT_TRUE(agent.critic() == critic);
}

TEST(Update, ZeroAdvantagesWithoutEntropyLeavePolicy) {
  PpoConfig c = small_config();
  c.entropy_coef = 0.0;
  c.normalize_advantages = false;
  c.gamma = 0.0;
  Rng init = make_stream(7, 0);
  PpoAgent agent(c, 2, 3, init);
  const nn::Mlp actor = agent.actor();
  Rng rng = make_stream(7, 1);
  auto buf = collect(agent, 64, 2, rng);
  buf.rewards = buf.values;  // gamma 0: returns equal values, advantages zero
  agent.update(buf, 0.0, rng);
  EXPECT_TRUE(agent.actor() == actor);

  c.entropy_coef = 0.01;
  Rng init2 = make_stream(7, 0);
  PpoAgent with_entropy(c, 2, 3, init2);
  with_entropy.update(buf, 0.0, rng);
  EXPECT_FALSE(with_entropy.actor() == actor);
}

TEST(Update, EmptyOrRaggedBufferThrows) {
  Rng init = make_stream(8, 0);
  PpoAgent agent(small_config(), 2, 3, init);
  Rng rng = make_stream(8, 1);
  EXPECT_THROW(agent.update(RolloutBuffer{}, 0.0, rng), InvalidParameter);
  auto buf = collect(agent, 8, 2, rng);
  buf.rewards.pop_back();
  EXPECT_THROW(agent.update(buf, 0.0, rng), InvalidParameter);
}

TEST(Update, MaybeUpdateCadence) {
  Rng init = make_stream(9, 0);
  PpoAgent agent(small_config(), 1, 2, init);
  Rng rng = make_stream(9, 1);
  const std::vector<double> s{1.0};
  int ran = 0;
  for (int t = 1; t <= 640; ++t) {
    agent.record(s, agent.act(s, rng), 0.0);
    const bool did = agent.maybe_update(s, rng);
    EXPECT_EQ(did, t % 64 == 0);
    ran += did;
  }
  EXPECT_EQ(ran, 10);
  EXPECT_EQ(agent.updates(), 10);
  EXPECT_TRUE(agent.rollout().empty());
}

// Default configuration: 1000-step rollouts, 64x64 networks.
TEST(Update, TwoArmedBandit) {
  int solved = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Rng init = make_stream(200 + seed, 0);
    PpoAgent agent(PpoConfig{}, 1, 2, init);
    Rng rng = make_stream(200 + seed, 1);
    const std::vector<double> s{1.0};
    bool ok = false;
    for (int t = 0; !ok && agent.updates() < 50; ++t) {
      const auto step = agent.act(s, rng);
      agent.record(s, step, step.action == 0 ? 1.0 : 0.0);
      if (agent.maybe_update(s, rng)) ok = agent.action_probabilities(s)[0] > 0.95;
    }
    solved += ok;
  }
  EXPECT_GE(solved, 9);
}

TEST(Update, DeterministicGivenSeeds) {
  auto run = [] {
    Rng init = make_stream(10, 0);
    PpoAgent agent(small_config(), 2, 4, init);
    Rng rng = make_stream(10, 1);
    for (int t = 0; t < 256; ++t) {
      const std::vector<double> s{uniform01(rng), uniform01(rng)};
      const auto step = agent.act(s, rng);
      agent.record(s, step, step.action * 0.1);
      agent.maybe_update(s, rng);
    }
    return std::make_pair(agent.actor(), agent.critic());
  };
  EXPECT_TRUE(run() == run());
}

TEST(Weights, ImportChecksTopology) {
  Rng ia = make_stream(11, 0);
  Rng ib = make_stream(12, 0);
  PpoAgent a(small_config(), 2, 3, ia);
  PpoAgent b(small_config(), 2, 3, ib);
  b.import_weights(a.actor(), a.critic());
  EXPECT_TRUE(b.actor() == a.actor());
  EXPECT_THROW(b.import_weights(a.critic(), a.actor()), ShapeMismatch);
}

}  // namespace
}  // namespace bertrand
