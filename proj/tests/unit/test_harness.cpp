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
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bertrand/agents.hpp"
#include "bertrand/errors.hpp"
#include "bertrand/harness.hpp"
#include "bertrand/market.hpp"
#include "bertrand/tql.hpp"

namespace bertrand {
namespace {

namespace fs = std::filesystem;

ExperimentConfig small(Scenario scenario, std::int64_t horizon) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.market = MarketSpec::standard();
  c.m = 15;
  c.horizon = horizon;
  c.epoch_len = 500;
  c.metrics_window = 500;
  c.n_runs = 2;
  c.pretrain_horizon = 2000;
  return c;
}

AgentConfig fixed(std::size_t action) {
  AgentConfig a = AgentConfig::make(AgentKind::kFixed);
  a.fixed_action = action;
  return a;
}

AgentConfig small_dqn() {
  AgentConfig a = AgentConfig::make(AgentKind::kDqn);
  a.dqn.hidden = {16, 16};
  a.dqn.warmup = 200;
  a.dqn.target_sync_period = 100;
  return a;
}

AgentConfig small_ppo() {
  AgentConfig a = AgentConfig::make(AgentKind::kPpo);
  a.ppo.hidden = {16, 16};
  a.ppo.rollout_len = 250;
  a.ppo.minibatch_size = 125;
  return a;
}

TEST(RunSimulation, MonopolyFixedAgentsEarnOneEighth) {
  ExperimentConfig c = small(Scenario::kHomogeneous, 3000);
  c.agents = {fixed(7), fixed(7)};  // grid price 0.5 = p^M
  const RunRecord r = run_simulation(c, 1);
  ASSERT_EQ(r.epochs.size(), 6u);
  for (const auto& row : r.epochs) {
    EXPECT_EQ(row.price0, 0.5);
    EXPECT_DOUBLE_EQ(row.profit0, 0.125);
    EXPECT_DOUBLE_EQ(row.profit1, 0.125);
  }
  EXPECT_EQ(r.epochs.front().epoch, 1);
  EXPECT_EQ(r.tail.size(), 500u);
  EXPECT_EQ(r.tail.t.back(), 3000);
}

TEST(RunSimulation, NashFixedAgentsEarnNashProfit) {
  ExperimentConfig c = small(Scenario::kHomogeneous, 1000);
  c.market = MarketSpec::standard(0.2);
  c.m = 11;  // grid step 0.1, so p^N = 0.2 sits at index 2
  c.agents = {fixed(2), fixed(2)};
  const MarketSetup setup = setup_market(c);
  ASSERT_NEAR(setup.grid.price(2), setup.eq.p_nash, 1e-12);
  const RunRecord r = run_simulation(c, 1);
  for (const auto& row : r.epochs) {
    EXPECT_NEAR(row.profit0, setup.eq.pi_nash, 1e-12);
    EXPECT_NEAR(row.profit1, setup.eq.pi_nash, 1e-12);
  }
}

TEST(RunSimulation, DeterministicPerSeed) {
  ExperimentConfig c = small(Scenario::kHomogeneous, 4000);
  c.market = MarketSpec::logit();
  c.agents = {AgentConfig::make(AgentKind::kTql), small_dqn()};
  const RunRecord a = run_simulation(c, 5);
  const RunRecord b = run_simulation(c, 5);
  const RunRecord other = run_simulation(c, 6);
  EXPECT_TRUE(a.same_trajectory(b));
  EXPECT_TRUE(a.snapshots[1].nets == b.snapshots[1].nets);
  EXPECT_FALSE(a.same_trajectory(other));
}

TEST(RunSimulation, ShapeErrors) {
  ExperimentConfig c = small(Scenario::kHomogeneous, 1000);
  c.epoch_len = 300;  // 1000 is not a multiple
  EXPECT_THROW(run_simulation(c, 1), InvalidParameter);
}

// Seat 1 remembers what it saw when it acted.
class ProbeAgent final : public PricingAgent {
 public:
  AgentKind kind() const override { return AgentKind::kFixed; }
  bool learning() const override { return false; }
  std::size_t act(const Observation& obs, std::int64_t) override {
    seen.push_back(obs.index);
    return 3;
  }
  void observe(const Observation&, std::size_t, double, const Observation&,
               std::int64_t) override {}
  std::size_t greedy_action(const Observation&) const override { return 3; }
  PolicySnapshot snapshot() const override { return {}; }
  std::vector<std::uint64_t> seen;
};

TEST(Match, AgentsNeverSeeSameStepActions) {
  ExperimentConfig c = small(Scenario::kHomogeneous, 2000);
  const MarketSetup setup = setup_market(c);
  AgentContext ctx = make_context(c.state, c.m, c.encoding, 2000);
  AgentConfig explorer = AgentConfig::make(AgentKind::kTql);
  explorer.beta = 0.0;  // uniform random actions throughout
  auto probe = std::make_unique<ProbeAgent>();
  ProbeAgent* probe_ptr = probe.get();
  Match match(PricingEnv(setup.market, setup.grid, c.state),
              make_agent(explorer, ctx, make_stream(1, kStreamAgent0)),
              std::move(probe), Recorder(500, 2000, 0));
  Rng env_rng = make_stream(1, kStreamEnv);
  match.start(env_rng, false);
  for (int i = 0; i < 2000; ++i) match.step();
  const RunRecord r = match.finish("probe", 1);
  ASSERT_EQ(probe_ptr->seen.size(), 2000u);
  EXPECT_EQ(probe_ptr->seen[0], 0u);  // fixed start {0, 0}
  int differs = 0;
  for (std::size_t i = 1; i < 2000; ++i) {
    // Own slot first, then the rival's, both from the previous step.
    const std::uint64_t prev = r.tail.action1[i - 1] * c.m + r.tail.action0[i - 1];
    EXPECT_EQ(probe_ptr->seen[i], prev);
    differs += r.tail.action0[i] != r.tail.action0[i - 1];
  }
  EXPECT_GT(differs, 1000);
}

TEST(RunSimulation, UpdateCadence) {
  ExperimentConfig c = small(Scenario::kHomogeneous, 3000);
  c.agents = {AgentConfig::make(AgentKind::kTql), small_dqn()};
  RunRecord r = run_simulation(c, 2);
  EXPECT_EQ(r.updates[0], 3000);
  EXPECT_EQ(r.updates[1], 3000 - 200 + 1);

  c.agents = {small_ppo(), fixed(4)};
  r = run_simulation(c, 2);
  EXPECT_EQ(r.updates[0], 3000 / 250);
  EXPECT_EQ(r.updates[1], 0);
}

TEST(Pretrain, StepsFileAndDeterminism) {
  ExperimentConfig c = small(Scenario::kTqlVsDrl, 1000);
  c.agents = {AgentConfig::make(AgentKind::kTql), small_dqn()};
  const PretrainResult a = pretrain_tql(c, 3);
  const PretrainResult b = pretrain_tql(c, 3);
  EXPECT_EQ(a.steps, 2000);
  EXPECT_EQ(a.policy.table().digest(), b.policy.table().digest());
  c.pretrain_agent = 1;
  EXPECT_NE(pretrain_tql(c, 3).policy.table().digest(),
            a.policy.table().digest());
  c.pretrain_agent = 0;

  const fs::path dir = fs::temp_directory_path() / "bertrand_pretrain_test";
  fs::remove_all(dir);
  const auto jobs = plan_jobs(c);
  ASSERT_EQ(jobs.front().group, "tql_vs_dqn");
  const auto recs = execute_job(jobs.front(), dir, {});
  ASSERT_EQ(recs.size(), 1u);
  const auto loaded = tql::load_qtable(
      dir / "tql_vs_dqn" / ("pretrained_" + std::to_string(jobs.front().seed) + ".qtable"));
  const tql::GreedyPolicy reloaded(loaded.table);
  const PretrainResult direct = pretrain_tql(c, jobs.front().seed);
  for (std::uint64_t s = 0; s < loaded.table->num_states(); ++s) {
    EXPECT_EQ(reloaded.act(s), direct.policy.act(s));
  }
  EXPECT_EQ(recs[0].updates[0], 0);  // frozen seat never learns
  EXPECT_GT(recs[0].updates[1], 0);
  fs::remove_all(dir);
}

TEST(Exchange, CountsAndCopies) {
  ExperimentConfig c = small(Scenario::kHeteroExchange, 2000);
  c.agents = {small_ppo(), small_dqn()};
  c.exchange_period = 500;
  const ExchangeResult ex = run_hetero_exchange(c, 4);
  EXPECT_EQ(ex.ppo_env.exchanges, 4);
  EXPECT_EQ(ex.ppo_env.group, "ppo_env");
  EXPECT_EQ(ex.dqn_env.group, "dqn_env");
  // The last exchange falls on the final step, so foreign copies equal the
  // home learners' final weights.
  EXPECT_TRUE(ex.ppo_env.snapshots[1].nets.at(0) == ex.dqn_env.snapshots[1].nets.at(0));
  EXPECT_TRUE(ex.dqn_env.snapshots[0].nets.at(0) == ex.ppo_env.snapshots[0].nets.at(0));
  EXPECT_EQ(ex.ppo_env.updates[1], 0);
  EXPECT_EQ(ex.dqn_env.updates[0], 0);

  c.exchange_period = 5000;
  const ExchangeResult none = run_hetero_exchange(c, 4);
  EXPECT_EQ(none.ppo_env.exchanges, 0);
  // Without exchange the foreign copies keep the learners' initial weights.
  const AgentContext ctx = make_context(c.state, c.m, c.encoding, 2000);
  const auto ppo0 = make_agent(c.agents[0], ctx, make_stream(4, kStreamAgent0));
  const auto dqn0 = make_agent(c.agents[1], ctx, make_stream(4, kStreamAgent1));
  EXPECT_TRUE(none.dqn_env.snapshots[0].nets.at(0) == ppo0->snapshot().nets.at(0));
  EXPECT_TRUE(none.ppo_env.snapshots[1].nets.at(0) == dqn0->snapshot().nets.at(0));
}

TEST(LrAsymmetry, PairingsAndRecords) {
  const auto pairs = lr_pairings({0.01, 0.05, 0.1, 0.5});
  const std::vector<std::pair<double, double>> want{
      {0.05, 0.01}, {0.1, 0.01}, {0.5, 0.01},
      {0.1, 0.05},  {0.5, 0.05}, {0.5, 0.1}};
  EXPECT_EQ(pairs, want);

  ExperimentConfig c = small(Scenario::kLrAsymmetry, 1000);
  const auto jobs = plan_jobs(c);
  ASSERT_EQ(jobs.size(), 12u);
  for (const auto& job : jobs) {
    EXPECT_GT(job.config.agents[0].tql.alpha, job.config.agents[1].tql.alpha);
    EXPECT_EQ(job.group, lr_group_name(job.config.agents[0].tql.alpha,
                                       job.config.agents[1].tql.alpha));
  }
  EXPECT_EQ(jobs[0].seed, c.base_seed);
  EXPECT_EQ(jobs[1].seed, c.base_seed + 1);
  EXPECT_EQ(run_lr_asymmetry(c).size(), 12u);
}

TEST(StateSpaceSweep, NamesAndSizes) {
  ExperimentConfig c = small(Scenario::kStateSpaceSweep, 1000);
  c.n_runs = 1;
  const auto jobs = plan_jobs(c);
  std::vector<std::string> names;
  std::vector<std::uint64_t> sizes;
  for (const auto& job : jobs) {
    names.push_back(job.group);
    sizes.push_back(state_space_size(job.config.state, job.config.m));
  }
  EXPECT_EQ(names, (std::vector<std::string>{"k1", "k2", "k3", "self_k1",
                                              "self_k2", "self_k3"}));
  EXPECT_EQ(sizes, (std::vector<std::uint64_t>{225, 50625, 11390625, 15, 225,
                                                3375}));
}

TEST(RunExperiment, ParallelEqualsSerial) {
  ExperimentConfig c = small(Scenario::kHomogeneous, 2000);
  c.market = MarketSpec::logit();
  c.n_runs = 4;
  c.agents = {small_dqn(), small_dqn()};
  ExperimentOptions serial;
  ExperimentOptions parallel;
  parallel.n_workers = 3;
  const auto a = run_experiment(c, serial);
  const auto b = run_experiment(c, parallel);
  ASSERT_TRUE(a.failures.empty());
  ASSERT_EQ(a.records.size(), 4u);
  ASSERT_EQ(b.records.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.records[i].seed, c.base_seed + i);
    EXPECT_TRUE(a.records[i].same_trajectory(b.records[i]));
  }
}

TEST(RunExperiment, InvalidConfigIsRejectedBeforeAnyRun) {
  ExperimentConfig c = small(Scenario::kTqlVsDrl, 1000);
  c.agents = {AgentConfig::make(AgentKind::kTql), small_dqn()};
  c.pretrain_horizon = 1;
  EXPECT_THROW(run_experiment(c, {}), InvalidParameter);
}

}  // namespace
}  // namespace bertrand
