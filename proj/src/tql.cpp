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

#include "bertrand/tql.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "bertrand/errors.hpp"
#include "bertrand/nn.hpp"

namespace bertrand::tql {
namespace {

constexpr char kMagic[8] = {'B', 'Q', 'T', 'A', 'B', 'L', 'E', '1'};

}  // namespace

QTable::QTable(std::uint64_t num_states, std::size_t num_actions,
               double q_init)
    : num_states_(num_states),
      num_actions_(num_actions),
      q_init_(q_init),
      dense_(false),
      init_row_(num_actions, q_init) {
  if (num_states == 0 || num_actions == 0) {
    throw InvalidParameter("Q-table needs at least one state and action");
  }
  if (!std::isfinite(q_init)) throw InvalidParameter("q_init must be finite");
  dense_ = num_states <= kDenseLimit / num_actions;
  if (dense_) dense_values_.assign(num_states * num_actions, q_init);
}

void QTable::check_state(std::uint64_t state) const {
  if (state >= num_states_) {
    throw InvalidParameter("state index " + std::to_string(state) +
                           " outside Q-table of " +
                           std::to_string(num_states_) + " states");
  }
}

std::span<double> QTable::row(std::uint64_t state) {
  check_state(state);
  if (dense_) {
    return {dense_values_.data() + state * num_actions_, num_actions_};
  }
  auto [it, inserted] = sparse_rows_.try_emplace(state, init_row_);
  return it->second;
}

std::span<const double> QTable::row(std::uint64_t state) const {
  check_state(state);
  if (dense_) {
    return {dense_values_.data() + state * num_actions_, num_actions_};
  }
  const auto it = sparse_rows_.find(state);
  if (it == sparse_rows_.end()) return init_row_;
  return it->second;
}

std::size_t QTable::touched_rows() const {
  if (!dense_) return sparse_rows_.size();
  std::size_t count = 0;
  for (std::uint64_t s = 0; s < num_states_; ++s) {
    const auto r = row(s);
    if (!std::equal(r.begin(), r.end(), init_row_.begin())) ++count;
  }
  return count;
}

std::uint64_t QTable::digest() const {
  // Per-row FNV-1a hashes combined by addition, so sparse iteration order
  // does not matter.
  auto hash_row = [](std::uint64_t state, std::span<const double> r) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t word) {
      for (int b = 0; b < 8; ++b) {
        h ^= (word >> (8 * b)) & 0xffu;
        h *= 1099511628211ull;
      }
    };
    mix(state);
    for (double v : r) mix(std::bit_cast<std::uint64_t>(v));
    return h;
  };
  std::uint64_t total = 0;
  if (dense_) {
    for (std::uint64_t s = 0; s < num_states_; ++s) {
      const auto r = row(s);
      if (!std::equal(r.begin(), r.end(), init_row_.begin())) {
        total += hash_row(s, r);
      }
    }
  } else {
    for (const auto& [s, r] : sparse_rows_) {
      if (!std::equal(r.begin(), r.end(), init_row_.begin())) {
        total += hash_row(s, r);
      }
    }
  }
  return total;
}

void TqlConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidParameter("TQL alpha must lie in (0, 1]");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidParameter("TQL gamma must lie in [0, 1)");
  }
  if (!(beta >= 0.0)) throw InvalidParameter("TQL beta must be >= 0");
  if (!std::isfinite(q_init)) throw InvalidParameter("q_init must be finite");
}

double TqlConfig::beta_for_horizon(std::int64_t horizon) {
  if (horizon < 2) throw InvalidParameter("horizon must be >= 2");
  return std::log(1000.0) / (static_cast<double>(horizon) / 2.0);
}

double epsilon_at(const TqlConfig& config, std::int64_t t) {
  return std::exp(-config.beta * static_cast<double>(t));
}

GreedyPolicy::GreedyPolicy(std::shared_ptr<const QTable> table)
    : table_(std::move(table)) {
  if (!table_) throw InvalidParameter("greedy policy needs a Q-table");
}

std::size_t GreedyPolicy::act(std::uint64_t state) const {
  return nn::argmax(table_->row(state));
}

TqlAgent::TqlAgent(TqlConfig config, std::uint64_t num_states,
                   std::size_t num_actions)
    : config_(config), table_(num_states, num_actions, config.q_init) {
  config_.validate();
}

std::size_t TqlAgent::greedy_action(std::uint64_t state) const {
  return nn::argmax(table_.row(state));
}

std::size_t TqlAgent::select_action_with_epsilon(std::uint64_t state,
                                                 double epsilon,
                                                 Rng& rng) const {
  if (epsilon > 0.0 && uniform01(rng) < epsilon) {
    return static_cast<std::size_t>(
        uniform_index(rng, table_.num_actions()));
  }
  return greedy_action(state);
}

std::size_t TqlAgent::select_action(std::uint64_t state, std::int64_t t,
                                    Rng& rng) const {
  return select_action_with_epsilon(state, epsilon_at(config_, t), rng);
}

void TqlAgent::update(std::uint64_t state, std::size_t action, double reward,
                      std::uint64_t next_state) {
  if (action >= table_.num_actions()) {
    throw InvalidParameter("action index outside the Q-table");
  }
  const auto next = table_.row(next_state);
  const double best_next = *std::max_element(next.begin(), next.end());
  const auto current = table_.row(state);
  current[action] = (1.0 - config_.alpha) * current[action] +
                    config_.alpha * (reward + config_.gamma * best_next);
  ++updates_;
}

GreedyPolicy TqlAgent::freeze() const {
  return GreedyPolicy(std::make_shared<const QTable>(table_));
}

void save_qtable(const QTable& table, const StateSpec& state,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  nn::write_u64_le(out, table.num_actions());
  nn::write_u64_le(out, table.num_states());
  nn::write_u64_le(out, state.memory_len);
  nn::write_u64_le(out, state.info == InfoMode::kSelfOnly ? 1 : 0);
  for (std::uint64_t s = 0; s < table.num_states(); ++s) {
    nn::write_f64_le(out, table.row(s));
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

LoadedQTable load_qtable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open Q-table " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(path.string() + " is not a Q-table file");
  }
  const std::uint64_t m = nn::read_u64_le(in);
  const std::uint64_t num_states = nn::read_u64_le(in);
  LoadedQTable loaded;
  loaded.state.memory_len = nn::read_u64_le(in);
  const std::uint64_t info = nn::read_u64_le(in);
  if (info > 1) throw FormatError("Q-table info flag must be 0 or 1");
  loaded.state.info = info == 1 ? InfoMode::kSelfOnly : InfoMode::kFullInformation;
  if (m == 0 || state_space_size(loaded.state, m) != num_states) {
    throw FormatError("Q-table header is inconsistent (|S| != m^slots)");
  }
  loaded.table = std::make_shared<QTable>(num_states, m, 0.0);
  for (std::uint64_t s = 0; s < num_states; ++s) {
    nn::read_f64_le(in, loaded.table->row(s));
  }
  return loaded;
}

}  // namespace bertrand::tql
