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

#include "bertrand/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "bertrand/errors.hpp"
#include "bertrand/metrics.hpp"

namespace bertrand {

using nlohmann::json;
namespace fs = std::filesystem;

MarketSetup setup_market(const ExperimentConfig& config) {
  MarketSetup s;
  s.market = config.market;
  s.eq = equilibrium_report(s.market, config.scan);
  s.grid = build_grid(s.market, s.eq, config.m, config.zeta);
  return s;
}

// Recorder ---------------------------------------------------------------

Recorder::Recorder(std::int64_t epoch_len, std::int64_t tail_len,
                   std::int64_t downsample)
    : epoch_len_(epoch_len), tail_len_(tail_len), downsample_(downsample) {
  if (epoch_len_ < 1) throw InvalidParameter("epoch_len must be >= 1");
  if (tail_len_ < 0 || downsample_ < 0) {
    throw InvalidParameter("tail length and downsample must be >= 0");
  }
}

void Recorder::set_progress(ProgressFn fn, std::string group,
                            std::uint64_t seed, std::int64_t total_epochs) {
  progress_ = std::move(fn);
  group_ = std::move(group);
  seed_ = seed;
  total_epochs_ = total_epochs;
}

void Recorder::record(std::int64_t step, const JointAction& actions,
                      const std::array<double, 2>& prices,
                      const std::array<double, 2>& rewards) {
  epoch_sum_[0] += prices[0];
  epoch_sum_[1] += prices[1];
  epoch_sum_[2] += rewards[0];
  epoch_sum_[3] += rewards[1];
  if (++in_epoch_ == epoch_len_) {
    const double n = static_cast<double>(epoch_len_);
    EpochRow row{static_cast<std::int64_t>(epochs_.size()) + 1,
                 epoch_sum_[0] / n, epoch_sum_[1] / n, epoch_sum_[2] / n,
                 epoch_sum_[3] / n};
    epochs_.push_back(row);
    epoch_sum_ = {};
    in_epoch_ = 0;
    if (progress_) progress_({group_, seed_, row, total_epochs_});
  }

  const auto a0 = static_cast<std::uint32_t>(actions[0]);
  const auto a1 = static_cast<std::uint32_t>(actions[1]);
  if (tail_len_ > 0) {
    if (recorded_ < tail_len_) {
      ring_.push(step, a0, a1, prices[0], prices[1], rewards[0], rewards[1]);
    } else {
      const auto i = static_cast<std::size_t>(recorded_ % tail_len_);
      ring_.t[i] = step;
      ring_.action0[i] = a0;
      ring_.action1[i] = a1;
      ring_.price0[i] = prices[0];
      ring_.price1[i] = prices[1];
      ring_.profit0[i] = rewards[0];
      ring_.profit1[i] = rewards[1];
    }
  }
  ++recorded_;
  if (downsample_ > 0 && step % downsample_ == 0) {
    series_.push(step, a0, a1, prices[0], prices[1], rewards[0], rewards[1]);
  }
}

StepSeries Recorder::tail() const {
  if (recorded_ <= tail_len_) return ring_;
  StepSeries out;
  const auto n = static_cast<std::size_t>(tail_len_);
  const auto start = static_cast<std::size_t>(recorded_ % tail_len_);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (start + k) % n;
    out.push(ring_.t[i], ring_.action0[i], ring_.action1[i], ring_.price0[i],
             ring_.price1[i], ring_.profit0[i], ring_.profit1[i]);
  }
  return out;
}

// Match --------------------------------------------------------------------

Match::Match(PricingEnv env, std::unique_ptr<PricingAgent> agent0,
             std::unique_ptr<PricingAgent> agent1, Recorder recorder)
    : env_(std::move(env)),
      agents_{std::move(agent0), std::move(agent1)},
      recorder_(std::move(recorder)) {
  if (!agents_[0] || !agents_[1]) throw InvalidParameter("match needs two agents");
}

void Match::start(Rng& env_rng, bool random_start) {
  views_ = random_start ? env_.reset(env_rng) : env_.reset_fixed({0, 0});
  started_ = true;
}

void Match::step() {
  if (!started_) throw InvalidParameter("match stepped before start");
  const std::int64_t t = env_.t();
  const JointAction actions{agents_[0]->act(views_[0], t),
                            agents_[1]->act(views_[1], t)};
  StepOutcome out = env_.step(actions);
  for (int i = 0; i < 2; ++i) {
    agents_[i]->observe(views_[i], actions[i], out.rewards[i],
                        out.next_views[i], t);
  }
  recorder_.record(env_.t(), actions, out.prices, out.rewards);
  views_ = std::move(out.next_views);
}

RunRecord Match::finish(std::string group, std::uint64_t seed) const {
  RunRecord r;
  r.group = std::move(group);
  r.seed = seed;
  r.steps = env_.t();
  r.epochs = recorder_.epochs();
  r.tail = recorder_.tail();
  r.series = recorder_.series();
  for (int i = 0; i < 2; ++i) {
    r.updates[i] = agents_[i]->update_count();
    r.snapshots[i] = agents_[i]->snapshot();
  }
  return r;
}

// Single runs --------------------------------------------------------------

namespace {

std::int64_t checked_horizon(const ExperimentConfig& config,
                             std::array<AgentKind, 2> kinds) {
  const std::int64_t t = config.resolved_horizon(kinds);
  if (t % config.epoch_len != 0) {
    throw InvalidParameter("horizon is not a multiple of epoch_len");
  }
  if (config.metrics_window > t) {
    throw InvalidParameter("metrics_window exceeds the horizon");
  }
  return t;
}

Recorder make_recorder(const ExperimentConfig& config, std::int64_t horizon,
                       const ProgressFn& progress, const std::string& group,
                       std::uint64_t seed) {
  Recorder rec(config.epoch_len, config.metrics_window,
               config.series_downsample);
  if (progress) {
    rec.set_progress(progress, group, seed, horizon / config.epoch_len);
  }
  return rec;
}

bool is_drl(AgentKind k) { return k == AgentKind::kDqn || k == AgentKind::kPpo; }

}  // namespace

RunRecord run_simulation(const ExperimentConfig& config, std::uint64_t seed,
                         const std::string& group, const ProgressFn& progress) {
  config.validate();
  const MarketSetup setup = setup_market(config);
  const std::int64_t horizon =
      checked_horizon(config, {config.agents[0].kind, config.agents[1].kind});
  const AgentContext ctx =
      make_context(config.state, config.m, config.encoding, horizon);

  Match match(PricingEnv(setup.market, setup.grid, config.state, config.encoding),
              make_agent(config.agents[0], ctx, make_stream(seed, kStreamAgent0)),
              make_agent(config.agents[1], ctx, make_stream(seed, kStreamAgent1)),
              make_recorder(config, horizon, progress, group, seed));
  Rng env_rng = make_stream(seed, kStreamEnv);
  match.start(env_rng, config.random_start);
  for (std::int64_t t = 0; t < horizon; ++t) match.step();
  return match.finish(group, seed);
}

PretrainResult pretrain_tql(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  if (config.agents[0].kind != AgentKind::kTql) {
    throw InvalidParameter("pretraining needs a tql template in agents[0]");
  }
  const MarketSetup setup = setup_market(config);
  const std::int64_t horizon = config.pretrain_horizon;
  if (horizon < 1) throw InvalidParameter("pretrain_horizon must be >= 1");
  const AgentContext ctx =
      make_context(config.state, config.m, config.encoding, horizon);

  Match match(PricingEnv(setup.market, setup.grid, config.state, config.encoding),
              make_agent(config.agents[0], ctx, make_stream(seed, kStreamPretrain0)),
              make_agent(config.agents[0], ctx, make_stream(seed, kStreamPretrain1)),
              Recorder(horizon, 0, 0));
  Rng env_rng = make_stream(seed, kStreamPretrainEnv);
  match.start(env_rng, config.random_start);
  for (std::int64_t t = 0; t < horizon; ++t) match.step();

  auto& learner = dynamic_cast<TqlPricer&>(match.agent(config.pretrain_agent));
  return PretrainResult{learner.agent().freeze(), config.state, match.steps()};
}

RunRecord run_tql_vs_drl(const ExperimentConfig& config,
                         const tql::GreedyPolicy& pretrained,
                         std::uint64_t seed, const std::string& group,
                         const ProgressFn& progress) {
  config.validate();
  if (!is_drl(config.agents[1].kind)) {
    throw InvalidParameter("the learning seat must hold a dqn or ppo agent");
  }
  const MarketSetup setup = setup_market(config);
  const std::int64_t horizon =
      checked_horizon(config, {AgentKind::kTql, config.agents[1].kind});
  const AgentContext ctx =
      make_context(config.state, config.m, config.encoding, horizon);
  if (pretrained.table().num_states() != ctx.num_states ||
      pretrained.table().num_actions() != ctx.num_actions) {
    throw ShapeMismatch("pretrained table does not fit the state definition");
  }

  Match match(PricingEnv(setup.market, setup.grid, config.state, config.encoding),
              std::make_unique<FrozenTqlPricer>(pretrained),
              make_agent(config.agents[1], ctx, make_stream(seed, kStreamAgent1)),
              make_recorder(config, horizon, progress, group, seed));
  Rng env_rng = make_stream(seed, kStreamEnv);
  match.start(env_rng, config.random_start);
  for (std::int64_t t = 0; t < horizon; ++t) match.step();
  return match.finish(group, seed);
}

ExchangeResult run_hetero_exchange(const ExperimentConfig& config,
                                   std::uint64_t seed,
                                   const ProgressFn& progress) {
  config.validate();
  if (config.agents[0].kind != AgentKind::kPpo ||
      config.agents[1].kind != AgentKind::kDqn) {
    throw InvalidParameter("exchange needs agents[0] = ppo and agents[1] = dqn");
  }
  if (config.exchange_period < 1) {
    throw InvalidParameter("exchange_period must be >= 1");
  }
  const MarketSetup setup = setup_market(config);
  const std::int64_t horizon =
      checked_horizon(config, {AgentKind::kPpo, AgentKind::kDqn});
  const AgentContext ctx =
      make_context(config.state, config.m, config.encoding, horizon);

  auto ppo_owned = make_agent(config.agents[0], ctx, make_stream(seed, kStreamAgent0));
  auto dqn_owned = make_agent(config.agents[1], ctx, make_stream(seed, kStreamAgent1));
  auto* ppo_learner = static_cast<PpoPricer*>(ppo_owned.get());
  auto* dqn_learner = static_cast<DqnPricer*>(dqn_owned.get());
  // Foreign copies start from the learners' initial weights.
  auto dqn_copy_owned = std::make_unique<FrozenNetPricer>(
      AgentKind::kDqn, dqn_learner->agent().local());
  auto ppo_copy_owned = std::make_unique<FrozenNetPricer>(
      AgentKind::kPpo, ppo_learner->agent().actor());
  FrozenNetPricer* dqn_copy = dqn_copy_owned.get();
  FrozenNetPricer* ppo_copy = ppo_copy_owned.get();

  Match ppo_env(PricingEnv(setup.market, setup.grid, config.state, config.encoding),
                std::move(ppo_owned), std::move(dqn_copy_owned),
                make_recorder(config, horizon, progress, "ppo_env", seed));
  Match dqn_env(PricingEnv(setup.market, setup.grid, config.state, config.encoding),
                std::move(ppo_copy_owned), std::move(dqn_owned),
                make_recorder(config, horizon, progress, "dqn_env", seed));
  Rng env_a = make_stream(seed, kStreamEnv);
  Rng env_b = make_stream(seed, kStreamEnvB);
  ppo_env.start(env_a, config.random_start);
  dqn_env.start(env_b, config.random_start);

  std::int64_t exchanges = 0;
  for (std::int64_t step = 1; step <= horizon; ++step) {
    ppo_env.step();
    dqn_env.step();
    if (step % config.exchange_period == 0) {
      dqn_copy->load(dqn_learner->agent().local());
      ppo_copy->load(ppo_learner->agent().actor());
      ++exchanges;
    }
  }
  ExchangeResult out{ppo_env.finish("ppo_env", seed),
                     dqn_env.finish("dqn_env", seed)};
  out.ppo_env.exchanges = exchanges;
  out.dqn_env.exchanges = exchanges;
  return out;
}

// Scenario planning ----------------------------------------------------------

std::vector<std::pair<double, double>> lr_pairings(std::vector<double> grid) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t lo = 0; lo < grid.size(); ++lo) {
    for (std::size_t hi = lo + 1; hi < grid.size(); ++hi) {
      out.emplace_back(grid[hi], grid[lo]);
    }
  }
  return out;
}

std::string lr_group_name(double a0, double a1) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g_%g", a0, a1);
  return buf;
}

std::vector<RunJob> plan_jobs(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::pair<std::string, ExperimentConfig>> groups;
  switch (config.scenario) {
    case Scenario::kLrAsymmetry:
      for (const auto& [hi, lo] : lr_pairings(config.lr_grid)) {
        ExperimentConfig c = config;
        c.agents[1] = c.agents[0];
        c.agents[0].tql.alpha = hi;
        c.agents[1].tql.alpha = lo;
        groups.emplace_back(lr_group_name(hi, lo), c);
      }
      break;
    case Scenario::kHomogeneous: {
      ExperimentConfig c = config;
      c.agents[1] = c.agents[0];
      groups.emplace_back(std::string(to_string(c.agents[0].kind)), c);
      break;
    }
    case Scenario::kTqlVsDrl:
      groups.emplace_back("tql_vs_" + std::string(to_string(config.agents[1].kind)),
                          config);
      break;
    case Scenario::kHeteroExchange:
      groups.emplace_back("exchange", config);
      break;
    case Scenario::kStateSpaceSweep:
      for (InfoMode info : {InfoMode::kFullInformation, InfoMode::kSelfOnly}) {
        for (std::size_t l = 1; l <= 3; ++l) {
          ExperimentConfig c = config;
          c.agents[1] = c.agents[0];
          c.state = StateSpec{l, info};
          const std::string prefix =
              info == InfoMode::kSelfOnly ? "self_k" : "k";
          groups.emplace_back(prefix + std::to_string(l), c);
        }
      }
      break;
  }
  std::vector<RunJob> jobs;
  for (const auto& [name, c] : groups) {
    for (int i = 0; i < config.n_runs; ++i) {
      jobs.push_back({name, c, config.base_seed + static_cast<std::uint64_t>(i)});
    }
  }
  return jobs;
}

std::vector<RunRecord> execute_job(const RunJob& job,
                                   const fs::path& artifact_dir,
                                   const ProgressFn& progress) {
  switch (job.config.scenario) {
    case Scenario::kTqlVsDrl: {
      const PretrainResult pre = pretrain_tql(job.config, job.seed);
      if (!artifact_dir.empty()) {
        const fs::path dir = artifact_dir / job.group;
        fs::create_directories(dir);
        tql::save_qtable(pre.policy.table(), pre.state,
                         dir / ("pretrained_" + std::to_string(job.seed) + ".qtable"));
      }
      return {run_tql_vs_drl(job.config, pre.policy, job.seed, job.group, progress)};
    }
    case Scenario::kHeteroExchange: {
      ExchangeResult ex = run_hetero_exchange(job.config, job.seed, progress);
      return {std::move(ex.ppo_env), std::move(ex.dqn_env)};
    }
    default:
      return {run_simulation(job.config, job.seed, job.group, progress)};
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const ExperimentOptions& options) {
  ExperimentResult result;
  result.setup = setup_market(config);
  const std::vector<RunJob> jobs = plan_jobs(config);

  std::vector<std::vector<RunRecord>> outputs(jobs.size());
  std::vector<std::optional<std::string>> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        outputs[i] = execute_job(jobs[i], options.out_dir, options.progress);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min(options.n_workers, jobs.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::set<std::string> seen;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i]) {
      result.failures.push_back({jobs[i].group, jobs[i].seed, *errors[i]});
      continue;
    }
    for (auto& record : outputs[i]) {
      if (seen.insert(record.group).second) result.groups.push_back(record.group);
      result.records.push_back(std::move(record));
    }
  }
  // Exchange runs interleave two groups per job; keep each group contiguous.
  std::stable_sort(result.records.begin(), result.records.end(),
                   [&](const RunRecord& a, const RunRecord& b) {
                     const auto ia = std::find(result.groups.begin(),
                                               result.groups.end(), a.group);
                     const auto ib = std::find(result.groups.begin(),
                                               result.groups.end(), b.group);
                     if (ia != ib) return ia < ib;
                     return a.seed < b.seed;
                   });

  if (!options.out_dir.empty()) {
    write_experiment(options.out_dir, config, result);
    if (!result.records.empty()) write_report(options.out_dir);
  }
  return result;
}

namespace {

std::vector<RunRecord> run_or_throw(const ExperimentConfig& config,
                                    std::size_t n_workers) {
  ExperimentOptions options;
  options.n_workers = n_workers;
  ExperimentResult r = run_experiment(config, options);
  if (!r.failures.empty()) {
    const JobFailure& f = r.failures.front();
    throw std::runtime_error("run " + f.group + "/" + std::to_string(f.seed) +
                             " failed: " + f.message);
  }
  return std::move(r.records);
}

}  // namespace

std::vector<RunRecord> run_lr_asymmetry(const ExperimentConfig& config,
                                        std::size_t n_workers) {
  ExperimentConfig c = config;
  c.scenario = Scenario::kLrAsymmetry;
  return run_or_throw(c, n_workers);
}

std::vector<RunRecord> run_state_space_sweep(const ExperimentConfig& config,
                                             std::size_t n_workers) {
  ExperimentConfig c = config;
  c.scenario = Scenario::kStateSpaceSweep;
  return run_or_throw(c, n_workers);
}

// Disk layout --------------------------------------------------------------

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  return in;
}

json eq_json(const EquilibriumReport& eq) {
  return {{"p_nash", eq.p_nash},
          {"p_monopoly", eq.p_monopoly},
          {"pi_nash", eq.pi_nash},
          {"pi_monopoly", eq.pi_monopoly}};
}

std::string run_stem(std::uint64_t seed) { return "run_" + std::to_string(seed); }

json stat_json(const metrics::Stat& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"std", s.std}, {"ci95", s.ci95}};
}

}  // namespace

void write_experiment(const fs::path& dir, const ExperimentConfig& config,
                      const ExperimentResult& result) {
  fs::create_directories(dir);
  const std::string hash = config_hash(config);
  json runs = json::array();
  for (const RunRecord& r : result.records) {
    const fs::path group_dir = dir / r.group;
    fs::create_directories(group_dir);
    const std::string stem = run_stem(r.seed);
    {
      auto out = open_out(group_dir / (stem + ".csv"));
      write_epochs_csv(out, r.epochs);
    }
    {
      auto out = open_out(group_dir / (stem + "_tail.csv"));
      write_series_csv(out, r.tail);
    }
    if (r.series.size() > 0) {
      auto out = open_out(group_dir / (stem + "_series.csv"));
      write_series_csv(out, r.series);
    }
    json meta = {{"group", r.group},
                 {"seed", r.seed},
                 {"steps", r.steps},
                 {"epochs", r.epochs.size()},
                 {"updates", r.updates},
                 {"exchanges", r.exchanges},
                 {"config_hash", hash},
                 {"equilibrium", eq_json(result.setup.eq)}};
    {
      auto out = open_out(group_dir / (stem + ".json"));
      out << meta.dump(2) << '\n';
    }
    runs.push_back({{"group", r.group},
                    {"seed", r.seed},
                    {"epochs_csv", r.group + "/" + stem + ".csv"},
                    {"tail_csv", r.group + "/" + stem + "_tail.csv"}});
  }
  json failures = json::array();
  for (const JobFailure& f : result.failures) {
    failures.push_back({{"group", f.group}, {"seed", f.seed}, {"message", f.message}});
  }
  const PriceGrid& g = result.setup.grid;
  json manifest = {
      {"scenario", std::string(to_string(config.scenario))},
      {"market", std::string(to_string(config.market.kind))},
      {"config", config_to_json(config)},
      {"config_hash", hash},
      {"equilibrium", eq_json(result.setup.eq)},
      {"grid", {{"m", g.m}, {"lower", g.lower}, {"upper", g.upper}, {"values", g.values}}},
      {"metrics_window", config.metrics_window},
      {"groups", result.groups},
      {"runs", runs},
      {"failures", failures}};
  auto out = open_out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

ReportResult write_report(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::is_directory(dir) || !fs::exists(manifest_path)) {
    throw InsufficientData("no experiment found in " + dir.string() +
                           " (manifest.json missing)");
  }
  json manifest;
  try {
    auto in = open_in(manifest_path);
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("malformed manifest.json: " + std::string(e.what()));
  }
  const json& runs = manifest.at("runs");
  if (runs.empty()) {
    throw InsufficientData("experiment in " + dir.string() + " has no finished runs");
  }
  EquilibriumReport eq;
  const json& e = manifest.at("equilibrium");
  eq.p_nash = e.at("p_nash").get<double>();
  eq.p_monopoly = e.at("p_monopoly").get<double>();
  eq.pi_nash = e.at("pi_nash").get<double>();
  eq.pi_monopoly = e.at("pi_monopoly").get<double>();
  PriceGrid grid;
  const json& gj = manifest.at("grid");
  grid.m = gj.at("m").get<std::size_t>();
  grid.lower = gj.at("lower").get<double>();
  grid.upper = gj.at("upper").get<double>();
  grid.values = gj.at("values").get<std::vector<double>>();
  const auto window = manifest.at("metrics_window").get<std::size_t>();
  const std::string scenario = manifest.at("scenario").get<std::string>();
  const std::string market = manifest.at("market").get<std::string>();

  std::vector<std::string> groups;
  std::map<std::string, std::vector<RunRecord>> by_group;
  std::vector<metrics::RunMetrics> summaries;
  for (const json& entry : runs) {
    RunRecord r;
    r.group = entry.at("group").get<std::string>();
    r.seed = entry.at("seed").get<std::uint64_t>();
    auto in = open_in(dir / entry.at("tail_csv").get<std::string>());
    r.tail = read_series_csv(in);
    summaries.push_back(metrics::summarize_run(r, eq, window));
    if (!by_group.count(r.group)) groups.push_back(r.group);
    by_group[r.group].push_back(std::move(r));
  }

  {
    std::vector<metrics::RunMetrics> labelled = summaries;
    for (auto& s : labelled) s.group = scenario + "/" + s.group;
    auto out = open_out(dir / "summary.csv");
    metrics::write_summary_csv(out, market, labelled);
  }
  {
    auto out = open_out(dir / "boxstats.csv");
    metrics::write_boxstats_csv(out, summaries);
  }
  json agg_groups = json::array();
  for (const std::string& group : groups) {
    std::vector<metrics::RunMetrics> members;
    for (const auto& s : summaries) {
      if (s.group == group) members.push_back(s);
    }
    const metrics::AggregateMetrics a = metrics::aggregate(members);
    agg_groups.push_back({{"group", group},
                          {"n", members.size()},
                          {"rpdi", {stat_json(a.rpdi[0]), stat_json(a.rpdi[1])}},
                          {"delta", {stat_json(a.delta[0]), stat_json(a.delta[1])}},
                          {"rpdi_diff", stat_json(a.rpdi_diff)},
                          {"delta_diff", stat_json(a.delta_diff)}});
    const auto heat = metrics::price_heatmap(by_group[group], window, grid);
    auto out = open_out(dir / group / "heatmap.csv");
    metrics::write_heatmap_csv(out, heat, grid);
  }
  {
    json agg = {{"scenario", scenario},
                {"market", market},
                {"metrics_window", window},
                {"equilibrium", manifest.at("equilibrium")},
                {"groups", agg_groups}};
    auto out = open_out(dir / "aggregate.json");
    out << agg.dump(2) << '\n';
  }
  return ReportResult{groups, summaries.size()};
}

}  // namespace bertrand
