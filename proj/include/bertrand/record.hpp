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

#ifndef BERTRAND_RECORD_HPP_
#define BERTRAND_RECORD_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bertrand/nn.hpp"
#include "bertrand/tql.hpp"

namespace bertrand {

enum class AgentKind { kTql, kDqn, kPpo, kFixed };

std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view name);

// Mean prices and profits over one logging window.
struct EpochRow {
  std::int64_t epoch = 0;
  double price0 = 0.0;
  double price1 = 0.0;
  double profit0 = 0.0;
  double profit1 = 0.0;

  bool operator==(const EpochRow&) const = default;
};

// Per-step prices and profits, either the final metrics window or a
// downsampled full series. `t` is the 1-based step count after each step.
struct StepSeries {
  std::vector<std::int64_t> t;
  std::vector<std::uint32_t> action0;
  std::vector<std::uint32_t> action1;
  std::vector<double> price0;
  std::vector<double> price1;
  std::vector<double> profit0;
  std::vector<double> profit1;

  std::size_t size() const { return t.size(); }
  void push(std::int64_t step, std::uint32_t a0, std::uint32_t a1, double p0,
            double p1, double r0, double r1);
  bool operator==(const StepSeries&) const = default;
};

// Learned state at the end of a run, kept for pretraining and exchange.
struct PolicySnapshot {
  AgentKind kind = AgentKind::kFixed;
  std::shared_ptr<const tql::QTable> table;  // TQL
  std::vector<nn::Mlp> nets;                 // DQN: {q}; PPO: {actor, critic}
};

struct RunRecord {
  std::string group;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  std::vector<EpochRow> epochs;
  StepSeries tail;     // last metrics_window steps
  StepSeries series;   // optional downsampled full series
  std::array<std::int64_t, 2> updates{};
  std::int64_t exchanges = 0;
  std::array<PolicySnapshot, 2> snapshots;

  // Compares everything except the policy snapshots.
  bool same_trajectory(const RunRecord& other) const;
};

// "epoch,price0,price1,profit0,profit1".
void write_epochs_csv(std::ostream& out, const std::vector<EpochRow>& epochs);
std::vector<EpochRow> read_epochs_csv(std::istream& in);

// "t,action0,action1,price0,price1,profit0,profit1".
void write_series_csv(std::ostream& out, const StepSeries& series);
StepSeries read_series_csv(std::istream& in);

}  // namespace bertrand

#endif  // BERTRAND_RECORD_HPP_
