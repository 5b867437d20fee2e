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

#include "bertrand/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "bertrand/errors.hpp"

namespace bertrand {

using nlohmann::json;

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kLrAsymmetry:
      return "lr_asymmetry";
    case Scenario::kHomogeneous:
      return "homogeneous";
    case Scenario::kTqlVsDrl:
      return "tql_vs_drl";
    case Scenario::kHeteroExchange:
      return "hetero_exchange";
    case Scenario::kStateSpaceSweep:
      return "state_space_sweep";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::kLrAsymmetry, Scenario::kHomogeneous,
                     Scenario::kTqlVsDrl, Scenario::kHeteroExchange,
                     Scenario::kStateSpaceSweep}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidParameter("unknown scenario '" + std::string(name) + "'");
}

AgentConfig AgentConfig::make(AgentKind kind) {
  AgentConfig config;
  config.kind = kind;
  return config;
}

std::int64_t ExperimentConfig::resolved_horizon(
    const std::array<AgentKind, 2>& kinds) const {
  if (horizon) return *horizon;
  for (AgentKind k : kinds) {
    if (k == AgentKind::kDqn || k == AgentKind::kPpo) return 100000;
  }
  return 1000000;
}

namespace {

// Reads fields from one JSON object and rejects keys nobody asked for.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string where)
      : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) {
      throw InvalidParameter(where_ + " must be a JSON object");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InvalidParameter(where_ + "." + key + " has the wrong type");
    }
  }

  // Numbers, or the string "auto" / null for unset.
  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto")) {
      out.reset();
      return;
    }
    if (!v.is_number()) {
      throw InvalidParameter(where_ + "." + key + " must be a number or \"auto\"");
    }
    out = v.get<T>();
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) {
        throw InvalidParameter("unknown config key " + where_ + "." + key);
      }
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

json beta_json(const std::optional<double>& beta) {
  return beta ? json(*beta) : json("auto");
}

AgentConfig agent_from_json(const json& doc, const std::string& where) {
  FieldReader r(doc, where);
  std::string kind_name = "tql";
  r.get("kind", kind_name);
  AgentConfig a = AgentConfig::make(parse_agent_kind(kind_name));
  switch (a.kind) {
    case AgentKind::kTql:
      r.get("alpha", a.tql.alpha);
      r.get("gamma", a.tql.gamma);
      r.get("q_init", a.tql.q_init);
      r.get_optional("beta", a.beta);
      break;
    case AgentKind::kDqn: {
      std::string mode = "average_reward";
      r.get("mode", mode);
      if (mode == "average_reward") {
        a.dqn.mode = dqn::TargetMode::kAverageReward;
      } else if (mode == "discounted") {
        a.dqn.mode = dqn::TargetMode::kDiscounted;
      } else {
        throw InvalidParameter(where + ".mode must be average_reward or discounted");
      }
      r.get("lambda", a.dqn.lambda);
      r.get("gamma", a.dqn.gamma);
      r.get("batch_size", a.dqn.batch_size);
      r.get("target_sync_period", a.dqn.target_sync_period);
      r.get("capacity", a.dqn.capacity);
      r.get("warmup", a.dqn.warmup);
      r.get("lr", a.dqn.adam.lr);
      r.get("hidden", a.dqn.hidden);
      r.get_optional("beta", a.beta);
      break;
    }
    case AgentKind::kPpo:
      r.get("clip", a.ppo.clip);
      r.get("gamma", a.ppo.gamma);
      r.get("rollout_len", a.ppo.rollout_len);
      r.get("update_epochs", a.ppo.update_epochs);
      r.get("minibatch_size", a.ppo.minibatch_size);
      r.get("value_coef", a.ppo.value_coef);
      r.get("entropy_coef", a.ppo.entropy_coef);
      r.get("normalize_advantages", a.ppo.normalize_advantages);
      r.get("actor_lr", a.ppo.actor_adam.lr);
      r.get("critic_lr", a.ppo.critic_adam.lr);
      r.get("hidden", a.ppo.hidden);
      break;
    case AgentKind::kFixed:
      r.get("action", a.fixed_action);
      break;
  }
  r.finish();
  return a;
}

json agent_to_json(const AgentConfig& a) {
  json doc;
  doc["kind"] = std::string(to_string(a.kind));
  switch (a.kind) {
    case AgentKind::kTql:
      doc["alpha"] = a.tql.alpha;
      doc["gamma"] = a.tql.gamma;
      doc["q_init"] = a.tql.q_init;
      doc["beta"] = beta_json(a.beta);
      break;
    case AgentKind::kDqn:
      doc["mode"] = a.dqn.mode == dqn::TargetMode::kAverageReward
                        ? "average_reward"
                        : "discounted";
      doc["lambda"] = a.dqn.lambda;
      doc["gamma"] = a.dqn.gamma;
      doc["batch_size"] = a.dqn.batch_size;
      doc["target_sync_period"] = a.dqn.target_sync_period;
      doc["capacity"] = a.dqn.capacity;
      doc["warmup"] = a.dqn.warmup;
      doc["lr"] = a.dqn.adam.lr;
      doc["hidden"] = a.dqn.hidden;
      doc["beta"] = beta_json(a.beta);
      break;
    case AgentKind::kPpo:
      doc["clip"] = a.ppo.clip;
      doc["gamma"] = a.ppo.gamma;
      doc["rollout_len"] = a.ppo.rollout_len;
      doc["update_epochs"] = a.ppo.update_epochs;
      doc["minibatch_size"] = a.ppo.minibatch_size;
      doc["value_coef"] = a.ppo.value_coef;
      doc["entropy_coef"] = a.ppo.entropy_coef;
      doc["normalize_advantages"] = a.ppo.normalize_advantages;
      doc["actor_lr"] = a.ppo.actor_adam.lr;
      doc["critic_lr"] = a.ppo.critic_adam.lr;
      doc["hidden"] = a.ppo.hidden;
      break;
    case AgentKind::kFixed:
      doc["action"] = a.fixed_action;
      break;
  }
  return doc;
}

void validate_agent(const AgentConfig& a, std::size_t m, const char* label) {
  const std::string where = std::string(label);
  try {
    switch (a.kind) {
      case AgentKind::kTql:
        a.tql.validate();
        break;
      case AgentKind::kDqn:
        a.dqn.validate();
        break;
      case AgentKind::kPpo:
        a.ppo.validate();
        break;
      case AgentKind::kFixed:
        if (a.fixed_action >= m) {
          throw InvalidParameter("fixed action outside the price grid");
        }
        break;
    }
    if (a.beta && !(*a.beta >= 0.0)) {
      throw InvalidParameter("beta must be >= 0");
    }
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(where + ": " + e.what());
  }
}

bool is_drl(AgentKind k) { return k == AgentKind::kDqn || k == AgentKind::kPpo; }

}  // namespace

void ExperimentConfig::validate() const {
  market.validate();
  state.validate();
  if (m < 2) throw InvalidParameter("grid.m must be >= 2");
  if (!(zeta >= 0.0)) throw InvalidParameter("grid.zeta must be >= 0");
  if (n_runs < 1) throw InvalidParameter("n_runs must be >= 1");
  if (epoch_len < 1) throw InvalidParameter("epoch_len must be >= 1");
  if (metrics_window < 1) throw InvalidParameter("metrics_window must be >= 1");
  if (series_downsample < 0) {
    throw InvalidParameter("series_downsample must be >= 0");
  }
  if (horizon && *horizon < 1) throw InvalidParameter("horizon must be >= 1");
  validate_agent(agents[0], m, "agents[0]");
  validate_agent(agents[1], m, "agents[1]");

  std::array<AgentKind, 2> kinds{agents[0].kind, agents[1].kind};
  switch (scenario) {
    case Scenario::kLrAsymmetry: {
      if (agents[0].kind != AgentKind::kTql) {
        throw InvalidParameter("lr_asymmetry requires a tql template in agents[0]");
      }
      std::set<double> distinct(lr_grid.begin(), lr_grid.end());
      if (distinct.size() < 2) {
        throw InvalidParameter("lr_grid needs at least two distinct rates");
      }
      for (double lr : distinct) {
        if (!(lr > 0.0 && lr <= 1.0)) {
          throw InvalidParameter("lr_grid rates must lie in (0, 1]");
        }
      }
      kinds = {AgentKind::kTql, AgentKind::kTql};
      break;
    }
    case Scenario::kHomogeneous:
      kinds = {agents[0].kind, agents[0].kind};
      break;
    case Scenario::kStateSpaceSweep:
      if (agents[0].kind != AgentKind::kTql) {
        throw InvalidParameter("state_space_sweep requires a tql template in agents[0]");
      }
      kinds = {AgentKind::kTql, AgentKind::kTql};
      break;
    case Scenario::kTqlVsDrl:
      if (agents[0].kind != AgentKind::kTql || !is_drl(agents[1].kind)) {
        throw InvalidParameter(
            "tql_vs_drl requires agents[0] = tql and agents[1] = dqn or ppo");
      }
      if (pretrain_horizon < 2) {
        throw InvalidParameter("pretrain_horizon must be >= 2");
      }
      if (pretrain_agent != 0 && pretrain_agent != 1) {
        throw InvalidParameter("pretrain_agent must be 0 or 1");
      }
      break;
    case Scenario::kHeteroExchange:
      if (agents[0].kind != AgentKind::kPpo ||
          agents[1].kind != AgentKind::kDqn) {
        throw InvalidParameter(
            "hetero_exchange requires agents[0] = ppo and agents[1] = dqn");
      }
      if (exchange_period < 1) {
        throw InvalidParameter("exchange_period must be >= 1");
      }
      break;
  }
  const std::int64_t t = resolved_horizon(kinds);
  if (t % epoch_len != 0) {
    throw InvalidParameter("horizon " + std::to_string(t) +
                           " is not a multiple of epoch_len " +
                           std::to_string(epoch_len));
  }
  if (metrics_window > t) {
    throw InvalidParameter("metrics_window exceeds the horizon");
  }
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  FieldReader r(doc, "config");
  std::string scenario = std::string(to_string(c.scenario));
  r.get("scenario", scenario);
  c.scenario = parse_scenario(scenario);

  if (const json* market = r.child("market")) {
    FieldReader mr(*market, "market");
    std::string model = "standard";
    mr.get("model", model);
    c.market.kind = parse_market_kind(model);
    // Defaults follow the experimental setup of each model.
    if (c.market.kind == MarketKind::kLogit) c.market.c = 1.0;
    mr.get("c", c.market.c);
    mr.get("g", c.market.g);
    mr.get("mu", c.market.mu);
    mr.get("k", c.market.k);
    mr.get("tie_tolerance", c.market.tie_tolerance);
    mr.finish();
  }
  if (const json* scan = r.child("scan")) {
    FieldReader sr(*scan, "scan");
    sr.get("grid_points", c.scan.grid_points);
    sr.get("tolerance", c.scan.tolerance);
    sr.get("max_iterations", c.scan.max_iterations);
    sr.finish();
  }
  if (const json* grid = r.child("grid")) {
    FieldReader gr(*grid, "grid");
    gr.get("m", c.m);
    gr.get("zeta", c.zeta);
    gr.finish();
  }
  if (const json* state = r.child("state")) {
    FieldReader sr(*state, "state");
    sr.get("memory", c.state.memory_len);
    std::string info = "full";
    sr.get("info", info);
    c.state.info = parse_info_mode(info);
    std::string encoding = "normalized";
    sr.get("encoding", encoding);
    if (encoding == "normalized") {
      c.encoding = NeuralEncoding::kNormalized;
    } else if (encoding == "one_hot") {
      c.encoding = NeuralEncoding::kOneHot;
    } else {
      throw InvalidParameter("state.encoding must be normalized or one_hot");
    }
    sr.finish();
  }
  if (const json* agents = r.child("agents")) {
    if (!agents->is_array() || agents->size() != 2) {
      throw InvalidParameter("config.agents must be an array of two agents");
    }
    c.agents[0] = agent_from_json((*agents)[0], "agents[0]");
    c.agents[1] = agent_from_json((*agents)[1], "agents[1]");
  }
  r.get_optional("horizon", c.horizon);
  r.get("epoch_len", c.epoch_len);
  r.get("n_runs", c.n_runs);
  r.get("base_seed", c.base_seed);
  r.get("exchange_period", c.exchange_period);
  r.get("metrics_window", c.metrics_window);
  r.get("pretrain_horizon", c.pretrain_horizon);
  r.get("pretrain_agent", c.pretrain_agent);
  r.get("lr_grid", c.lr_grid);
  r.get("series_downsample", c.series_downsample);
  r.get("random_start", c.random_start);
  r.finish();
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["scenario"] = std::string(to_string(c.scenario));
  doc["market"] = {{"model", std::string(to_string(c.market.kind))},
                   {"c", c.market.c},
                   {"g", c.market.g},
                   {"mu", c.market.mu},
                   {"k", c.market.k},
                   {"tie_tolerance", c.market.tie_tolerance}};
  doc["scan"] = {{"grid_points", c.scan.grid_points},
                 {"tolerance", c.scan.tolerance},
                 {"max_iterations", c.scan.max_iterations}};
  doc["grid"] = {{"m", c.m}, {"zeta", c.zeta}};
  doc["state"] = {{"memory", c.state.memory_len},
                  {"info", std::string(to_string(c.state.info))},
                  {"encoding", c.encoding == NeuralEncoding::kOneHot
                                   ? "one_hot"
                                   : "normalized"}};
  doc["agents"] = json::array({agent_to_json(c.agents[0]),
                               agent_to_json(c.agents[1])});
  doc["horizon"] = c.horizon ? json(*c.horizon) : json("auto");
  doc["epoch_len"] = c.epoch_len;
  doc["n_runs"] = c.n_runs;
  doc["base_seed"] = c.base_seed;
  doc["exchange_period"] = c.exchange_period;
  doc["metrics_window"] = c.metrics_window;
  doc["pretrain_horizon"] = c.pretrain_horizon;
  doc["pretrain_agent"] = c.pretrain_agent;
  doc["lr_grid"] = c.lr_grid;
  doc["series_downsample"] = c.series_downsample;
  doc["random_start"] = c.random_start;
  return doc;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw InvalidParameter("malformed config " + path.string() + ": " +
                           e.what());
  }
  return config_from_json(doc);
}

void apply_override(json& doc, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw InvalidParameter("override '" + std::string(assignment) +
                           "' must look like key=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));

  std::vector<std::string> keys;
  for (std::size_t start = 0;;) {
    const std::size_t dot = path.find('.', start);
    keys.push_back(path.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json* node = &doc;
  json* parent = nullptr;
  for (const std::string& key : keys) {
    parent = node;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(key);
      } catch (const std::exception&) {
        throw InvalidParameter("override path '" + path + "': '" + key +
                               "' is not an array index");
      }
      if (idx >= node->size()) {
        throw InvalidParameter("override path '" + path + "' index out of range");
      }
      node = &(*node)[idx];
    } else if (node->is_object() && node->contains(key)) {
      node = &(*node)[key];
    } else {
      throw InvalidParameter("override path '" + path +
                             "' does not name a config field");
    }
  }
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  if (keys.back() == "kind" && parent && parent->is_object()) {
    if (!value.is_string()) {
      throw InvalidParameter("override '" + path + "' needs an agent kind");
    }
    *parent = agent_to_json(AgentConfig::make(parse_agent_kind(value.get<std::string>())));
    return;
  }
  *node = value;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string canonical = config_to_json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bertrand
