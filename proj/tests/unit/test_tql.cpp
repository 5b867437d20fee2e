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
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "bertrand/errors.hpp"
#include "bertrand/pricing_env.hpp"
#include "bertrand/rng.hpp"
#include "bertrand/tql.hpp"

namespace bertrand {
namespace {

using tql::QTable;
using tql::TqlAgent;
using tql::TqlConfig;

TEST(Epsilon, Schedule) {
  TqlConfig c;
  c.beta = std::log(2.0);
  EXPECT_EQ(tql::epsilon_at(c, 0), 1.0);
  EXPECT_NEAR(tql::epsilon_at(c, 1), 0.5, 1e-15);
  c.beta = 1e-3;
  double prev = 1.0;
  for (std::int64_t t = 0; t < 10000; t += 37) {
    const double e = tql::epsilon_at(c, t);
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(Epsilon, BetaForHorizonHitsOneInThousandAtHalf) {
  TqlConfig c;
  c.beta = TqlConfig::beta_for_horizon(200000);
  EXPECT_NEAR(tql::epsilon_at(c, 100000), 1e-3, 1e-15);
  EXPECT_THROW(TqlConfig::beta_for_horizon(1), InvalidParameter);
}

TEST(Config, Validation) {
  TqlConfig c;
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c.alpha = 1.0;
  EXPECT_NO_THROW(c.validate());
  c.gamma = 1.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c.gamma = 0.0;
  c.beta = -1.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
}

TEST(SelectAction, GreedyAndTies) {
  TqlAgent agent({}, 4, 3);
  Rng rng = make_stream(1, 1);
  EXPECT_EQ(agent.select_action_with_epsilon(0, 0.0, rng), 0u);  // all equal
  auto row = agent.table().row(2);
  row[0] = 0.0;
  row[1] = 5.0;
  row[2] = 1.0;
  EXPECT_EQ(agent.select_action_with_epsilon(2, 0.0, rng), 1u);
  row[2] = 5.0;
  EXPECT_EQ(agent.greedy_action(2), 1u);
}

TEST(SelectAction, FullExplorationIsUniform) {
  TqlAgent agent({}, 1, 5);
  agent.table().row(0)[3] = 10.0;
  Rng rng = make_stream(2, 1);
  const int n = 100000;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < n; ++i) ++counts[agent.select_action_with_epsilon(0, 1.0, rng)];
  const double p = 0.2;
  const double sd = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_NEAR(c, n * p, 3 * sd);
}

TEST(Update, HandArithmetic) {
  TqlConfig c;
  c.alpha = 0.1;
  c.gamma = 0.95;
  TqlAgent agent(c, 3, 2);
  agent.update(0, 1, 0.125, 2);
  EXPECT_DOUBLE_EQ(agent.table().row(0)[1], 0.0125);
  EXPECT_EQ(agent.table().row(0)[0], 0.0);
  EXPECT_EQ(agent.update_count(), 1);
}

TEST(Update, AlphaOneGammaZeroStoresReward) {
  TqlConfig c;
  c.alpha = 1.0;
  c.gamma = 0.0;
  TqlAgent agent(c, 2, 2);
  agent.table().row(1)[0] = 42.0;
  agent.update(0, 0, 0.37, 1);
  EXPECT_EQ(agent.table().row(0)[0], 0.37);
}

TEST(Update, ConvergesToDiscountedFixedPoint) {
  TqlConfig c;
  c.alpha = 0.1;
  c.gamma = 0.95;
  TqlAgent agent(c, 1, 1);
  for (int i = 0; i < 5000; ++i) agent.update(0, 0, 0.2, 0);
  EXPECT_NEAR(agent.table().row(0)[0], 0.2 / (1 - 0.95), 1e-9);
}

TEST(Update, RejectsBadIndices) {
  TqlAgent agent({}, 2, 2);
  EXPECT_THROW(agent.update(0, 2, 0.0, 1), InvalidParameter);
  EXPECT_THROW(agent.update(5, 0, 0.0, 1), InvalidParameter);
}

TEST(Update, QValuesStayBounded) {
  TqlConfig c;
  c.alpha = 0.3;
  c.gamma = 0.9;
  c.q_init = 0.5;
  TqlAgent agent(c, 16, 4);
  Rng rng = make_stream(4, 1);
  const double bound = 1.0 / (1 - c.gamma) + std::abs(c.q_init);
  for (int i = 0; i < 200000; ++i) {
    const auto s = uniform_index(rng, 16);
    const auto a = uniform_index(rng, 4);
    const double r = 2.0 * uniform01(rng) - 1.0;
    agent.update(s, a, r, uniform_index(rng, 16));
  }
  for (std::uint64_t s = 0; s < 16; ++s) {
    for (double q : agent.table().row(s)) EXPECT_LE(std::abs(q), bound);
  }
}

TEST(Freeze, MatchesGreedyAndIgnoresLaterUpdates) {
  TqlAgent agent({}, 9, 3);
  Rng rng = make_stream(5, 1);
  for (int i = 0; i < 2000; ++i) {
    agent.update(uniform_index(rng, 9), uniform_index(rng, 3),
                 uniform01(rng), uniform_index(rng, 9));
  }
  const tql::GreedyPolicy frozen = agent.freeze();
  const std::uint64_t hash = frozen.table().digest();
  for (std::uint64_t s = 0; s < 9; ++s) {
    EXPECT_EQ(frozen.act(s), agent.select_action_with_epsilon(s, 0.0, rng));
  }
  for (int i = 0; i < 10000; ++i) {
    agent.update(uniform_index(rng, 9), uniform_index(rng, 3),
                 uniform01(rng), uniform_index(rng, 9));
  }
  EXPECT_EQ(frozen.table().digest(), hash);
  EXPECT_NE(agent.table().digest(), hash);
}

TEST(QTable, DenseAndSparseAgree) {
  QTable dense(100, 3, 0.25);
  EXPECT_TRUE(dense.dense());
  QTable sparse((std::uint64_t{1} << 30), 3, 0.25);
  EXPECT_FALSE(sparse.dense());
  EXPECT_EQ(sparse.touched_rows(), 0u);
  const QTable& view = sparse;
  for (double q : view.row(123456789)) EXPECT_EQ(q, 0.25);
  EXPECT_EQ(sparse.touched_rows(), 0u);
  sparse.row(7)[1] = 2.0;
  dense.row(7)[1] = 2.0;
  EXPECT_EQ(sparse.touched_rows(), 1u);
  EXPECT_EQ(sparse.digest(), dense.digest());
  EXPECT_THROW(sparse.row(std::uint64_t{1} << 30), InvalidParameter);
}

TEST(Persistence, RoundTripPreservesActions) {
  const auto path = std::filesystem::temp_directory_path() / "bertrand_tql_rt.qtable";
  StateSpec spec;
  spec.memory_len = 1;
  const std::size_t m = 5;
  TqlAgent agent({}, state_space_size(spec, m), m);
  Rng rng = make_stream(6, 1);
  for (int i = 0; i < 3000; ++i) {
    agent.update(uniform_index(rng, 25), uniform_index(rng, m), uniform01(rng),
                 uniform_index(rng, 25));
  }
  tql::save_qtable(agent.table(), spec, path);
  EXPECT_EQ(std::filesystem::file_size(path), 8 + 4 * 8 + 25 * m * 8);
  const auto loaded = tql::load_qtable(path);
  EXPECT_EQ(loaded.state.memory_len, 1u);
  EXPECT_EQ(loaded.state.info, InfoMode::kFullInformation);
  EXPECT_EQ(loaded.table->digest(), agent.table().digest());
  const tql::GreedyPolicy policy(loaded.table);
  for (std::uint64_t s = 0; s < 25; ++s) {
    EXPECT_EQ(policy.act(s), agent.greedy_action(s));
  }
  std::filesystem::remove(path);
}

TEST(Persistence, RejectsGarbage) {
  const auto path = std::filesystem::temp_directory_path() / "bertrand_tql_bad.qtable";
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTATABLE and then some bytes";
  }
  EXPECT_THROW(tql::load_qtable(path), FormatError);
  EXPECT_THROW(tql::load_qtable(path.string() + ".missing"), FormatError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace bertrand
