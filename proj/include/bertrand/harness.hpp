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

#ifndef BERTRAND_HARNESS_HPP_
#define BERTRAND_HARNESS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bertrand/agents.hpp"
#include "bertrand/config.hpp"
#include "bertrand/equilibrium.hpp"
#include "bertrand/pricing_env.hpp"
#include "bertrand/record.hpp"
#include "bertrand/tql.hpp"

namespace bertrand {

// Generator stream ids within one run seed.
enum Stream : std::uint64_t {
  kStreamEnv = 0,
  kStreamAgent0 = 1,
  kStreamAgent1 = 2,
  kStreamPretrainEnv = 3,
  kStreamPretrain0 = 4,
  kStreamPretrain1 = 5,
  kStreamEnvB = 6,  // second environment of the exchange protocol
};

struct ProgressEvent {
  std::string group;
  std::uint64_t seed = 0;
  EpochRow row;
  std::int64_t total_epochs = 0;
};
using ProgressFn = std::function<void(const ProgressEvent&)>;

struct MarketSetup {
  MarketSpec market;
  EquilibriumReport eq;
  PriceGrid grid;
};
MarketSetup setup_market(const ExperimentConfig& config);

class Recorder {
 public:
  Recorder(std::int64_t epoch_len, std::int64_t tail_len,
           std::int64_t downsample);

  void set_progress(ProgressFn fn, std::string group, std::uint64_t seed,
                    std::int64_t total_epochs);

  // `step` counts completed steps, starting at 1.
  void record(std::int64_t step, const JointAction& actions,
              const std::array<double, 2>& prices,
              const std::array<double, 2>& rewards);

  const std::vector<EpochRow>& epochs() const { return epochs_; }
  StepSeries tail() const;
  const StepSeries& series() const { return series_; }

 private:
  std::int64_t epoch_len_;
  std::int64_t tail_len_;
  std::int64_t downsample_;
  std::array<double, 4> epoch_sum_{};
  std::int64_t in_epoch_ = 0;
  std::vector<EpochRow> epochs_;
  StepSeries ring_;
  std::int64_t recorded_ = 0;
  StepSeries series_;
  ProgressFn progress_;
  std::string group_;
  std::uint64_t seed_ = 0;
  std::int64_t total_epochs_ = 0;
};

// One environment plus two seats. Both agents act on the pre-step state, so
// neither sees the other's same-step action.
class Match {
 public:
  Match(PricingEnv env, std::unique_ptr<PricingAgent> agent0,
        std::unique_ptr<PricingAgent> agent1, Recorder recorder);

  void start(Rng& env_rng, bool random_start);
  void step();

  std::int64_t steps() const { return env_.t(); }
  PricingAgent& agent(int i) { return *agents_.at(static_cast<std::size_t>(i)); }
  const PricingEnv& env() const { return env_; }
  const Recorder& recorder() const { return recorder_; }

  RunRecord finish(std::string group, std::uint64_t seed) const;

 private:
  PricingEnv env_;
  std::array<std::unique_ptr<PricingAgent>, 2> agents_;
  Recorder recorder_;
  std::array<Observation, 2> views_;
  bool started_ = false;
};

// Plays config.agents[0] against config.agents[1] for the resolved horizon.
RunRecord run_simulation(const ExperimentConfig& config, std::uint64_t seed,
                         const std::string& group = "run",
                         const ProgressFn& progress = {});

struct PretrainResult {
  tql::GreedyPolicy policy;
  StateSpec state;
  std::int64_t steps = 0;
};

// TQL self-play with the agents[0] template in both seats for
// pretrain_horizon steps; the pretrain_agent table is frozen.
PretrainResult pretrain_tql(const ExperimentConfig& config, std::uint64_t seed);

// Frozen pretrained TQL in seat 0 against the learning agents[1].
RunRecord run_tql_vs_drl(const ExperimentConfig& config,
                         const tql::GreedyPolicy& pretrained,
                         std::uint64_t seed, const std::string& group = "run",
                         const ProgressFn& progress = {});

struct ExchangeResult {
  RunRecord ppo_env;  // learning PPO vs frozen DQN copy
  RunRecord dqn_env;  // frozen PPO copy vs learning DQN
};

// PPO sits in seat 0 and DQN in seat 1 of both environments.
ExchangeResult run_hetero_exchange(const ExperimentConfig& config,
                                   std::uint64_t seed,
                                   const ProgressFn& progress = {});

// The unordered learning-rate pairs, higher rate first.
std::vector<std::pair<double, double>> lr_pairings(std::vector<double> grid);
std::string lr_group_name(double a0, double a1);

struct RunJob {
  std::string group;
  ExperimentConfig config;  // pairing already resolved
  std::uint64_t seed = 0;
};

std::vector<RunJob> plan_jobs(const ExperimentConfig& config);

// Executes one job; the exchange protocol yields two records. When
// `artifact_dir` is non-empty, pretrained tables are written below it.
std::vector<RunRecord> execute_job(const RunJob& job,
                                   const std::filesystem::path& artifact_dir,
                                   const ProgressFn& progress);

struct JobFailure {
  std::string group;
  std::uint64_t seed = 0;
  std::string message;
};

struct ExperimentOptions {
  std::size_t n_workers = 1;
  std::filesystem::path out_dir;  // empty: keep results in memory only
  ProgressFn progress;
};

struct ExperimentResult {
  MarketSetup setup;
  std::vector<RunRecord> records;  // plan order, seeds ascending per group
  std::vector<JobFailure> failures;
  std::vector<std::string> groups;
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const ExperimentOptions& options);

std::vector<RunRecord> run_lr_asymmetry(const ExperimentConfig& config,
                                        std::size_t n_workers = 1);
std::vector<RunRecord> run_state_space_sweep(const ExperimentConfig& config,
                                             std::size_t n_workers = 1);

// Writes manifest.json and per-run CSV/JSON files under `dir`.
void write_experiment(const std::filesystem::path& dir,
                      const ExperimentConfig& config,
                      const ExperimentResult& result);

struct ReportResult {
  std::vector<std::string> groups;
  std::size_t runs = 0;
};

// Reads a finished experiment directory and writes summary.csv,
// aggregate.json, boxstats.csv and <group>/heatmap.csv.
ReportResult write_report(const std::filesystem::path& dir);

}  // namespace bertrand

#endif  // BERTRAND_HARNESS_HPP_
