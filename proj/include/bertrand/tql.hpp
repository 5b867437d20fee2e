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

#ifndef BERTRAND_TQL_HPP_
#define BERTRAND_TQL_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "bertrand/pricing_env.hpp"
#include "bertrand/rng.hpp"

namespace bertrand::tql {

// |S| x m table of action values. Small tables are stored densely; tables
// above kDenseLimit entries allocate rows on first touch, every untouched row
// reading as q_init.
class QTable {
 public:
  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 24;

  QTable(std::uint64_t num_states, std::size_t num_actions, double q_init);

  std::span<double> row(std::uint64_t state);
  std::span<const double> row(std::uint64_t state) const;

  std::uint64_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  double q_init() const { return q_init_; }
  bool dense() const { return dense_; }
  std::size_t touched_rows() const;

  // Order-independent FNV-1a digest over every row that differs from q_init.
  std::uint64_t digest() const;

 private:
  void check_state(std::uint64_t state) const;

  std::uint64_t num_states_;
  std::size_t num_actions_;
  double q_init_;
  bool dense_;
  std::vector<double> dense_values_;
  std::unordered_map<std::uint64_t, std::vector<double>> sparse_rows_;
  std::vector<double> init_row_;
};

struct TqlConfig {
  double alpha = 0.1;     // learning rate in (0, 1]
  double gamma = 0.95;    // discount in [0, 1)
  double beta = 1e-5;     // exploration decay per timestep
  double q_init = 0.0;

  void validate() const;
  // beta such that exp(-beta * T / 2) = 0.001.
  static double beta_for_horizon(std::int64_t horizon);
};

// exp(-beta t).
double epsilon_at(const TqlConfig& config, std::int64_t t);

// Greedy snapshot of a Q-table: argmax with lowest-index ties, no updates.
class GreedyPolicy {
 public:
  explicit GreedyPolicy(std::shared_ptr<const QTable> table);

  std::size_t act(std::uint64_t state) const;
  const QTable& table() const { return *table_; }
  std::shared_ptr<const QTable> shared_table() const { return table_; }

 private:
  std::shared_ptr<const QTable> table_;
};

class TqlAgent {
 public:
  TqlAgent(TqlConfig config, std::uint64_t num_states, std::size_t num_actions);

  // epsilon-greedy at timestep t using the configured decay.
  std::size_t select_action(std::uint64_t state, std::int64_t t, Rng& rng) const;
  std::size_t select_action_with_epsilon(std::uint64_t state, double epsilon,
                                         Rng& rng) const;
  std::size_t greedy_action(std::uint64_t state) const;

  // Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a')).
  void update(std::uint64_t state, std::size_t action, double reward,
              std::uint64_t next_state);

  GreedyPolicy freeze() const;

  const QTable& table() const { return table_; }
  QTable& table() { return table_; }
  const TqlConfig& config() const { return config_; }
  std::int64_t update_count() const { return updates_; }

 private:
  TqlConfig config_;
  QTable table_;
  std::int64_t updates_ = 0;
};

// Binary layout: magic "BQTABLE1", then little-endian u64 m, |S|, l, info flag
// (0 full, 1 self-only), then |S| * m float64 values row-major.
void save_qtable(const QTable& table, const StateSpec& state,
                 const std::filesystem::path& path);

struct LoadedQTable {
  std::shared_ptr<QTable> table;
  StateSpec state;
};
LoadedQTable load_qtable(const std::filesystem::path& path);

}  // namespace bertrand::tql

#endif  // BERTRAND_TQL_HPP_
