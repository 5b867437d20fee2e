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

#ifndef BERTRAND_CONFIG_HPP_
#define BERTRAND_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bertrand/dqn.hpp"
#include "bertrand/equilibrium.hpp"
#include "bertrand/market.hpp"
#include "bertrand/ppo.hpp"
#include "bertrand/pricing_env.hpp"
#include "bertrand/record.hpp"
#include "bertrand/tql.hpp"

namespace bertrand {

enum class Scenario {
  kLrAsymmetry,
  kHomogeneous,
  kTqlVsDrl,
  kHeteroExchange,
  kStateSpaceSweep,
};

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view name);

struct AgentConfig {
  AgentKind kind = AgentKind::kTql;
  tql::TqlConfig tql;
  dqn::DqnConfig dqn;
  ppo::PpoConfig ppo;
  // Exploration decay for TQL/DQN; unset means "reach 0.001 at T/2".
  std::optional<double> beta;
  std::size_t fixed_action = 0;

  static AgentConfig make(AgentKind kind);
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kHomogeneous;
  MarketSpec market;
  ScanOptions scan;
  std::size_t m = 15;
  double zeta = 0.1;
  StateSpec state;
  NeuralEncoding encoding = NeuralEncoding::kNormalized;
  std::array<AgentConfig, 2> agents{AgentConfig::make(AgentKind::kTql),
                                    AgentConfig::make(AgentKind::kTql)};
  // Unset: 1,000,000 for TQL-only scenarios, 100,000 when a DRL agent plays.
  std::optional<std::int64_t> horizon;
  std::int64_t epoch_len = 1000;
  int n_runs = 20;
  std::uint64_t base_seed = 1;
  std::int64_t exchange_period = 1000;
  std::int64_t metrics_window = 10000;
  std::int64_t pretrain_horizon = 1000000;
  int pretrain_agent = 0;  // which self-play table is frozen
  std::vector<double> lr_grid = {0.01, 0.05, 0.1, 0.5};
  std::int64_t series_downsample = 0;  // 0 disables the full series
  bool random_start = true;

  // Horizon in effect for a run whose agents are `kinds`.
  std::int64_t resolved_horizon(const std::array<AgentKind, 2>& kinds) const;

  // Throws InvalidParameter on any inconsistency.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies "dotted.path=value" to a full config document. The path must name
// an existing field; the value is parsed as JSON when possible and as a
// string otherwise. Setting an agent's "kind" resets that agent to the
// defaults of the new kind.
void apply_override(nlohmann::json& doc, std::string_view assignment);

// Hex FNV-1a digest of the canonical (sorted, compact) JSON document.
std::string config_hash(const ExperimentConfig& config);

}  // namespace bertrand

#endif  // BERTRAND_CONFIG_HPP_
