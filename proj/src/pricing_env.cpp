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

#include "bertrand/pricing_env.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "bertrand/errors.hpp"

namespace bertrand {

std::size_t PriceGrid::nearest_index(double price) const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (std::abs(values[j] - price) < std::abs(values[best] - price)) best = j;
  }
  return best;
}

PriceGrid build_grid(const MarketSpec& spec, const EquilibriumReport& eq,
                     std::size_t m, double zeta) {
  spec.validate();
  if (m < 2) throw InvalidParameter("price grid needs m >= 2 levels");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
    throw InvalidParameter("grid relaxation zeta must be finite and >= 0");
  }
  PriceGrid grid;
  grid.m = m;
  if (spec.kind == MarketKind::kLogit) {
    const double spread = eq.p_monopoly - eq.p_nash;
    grid.lower = eq.p_nash - zeta * spread;
    grid.upper = eq.p_monopoly + zeta * spread;
  } else {
    grid.lower = 0.0;
    grid.upper = 1.0;
  }
  if (!(grid.upper > grid.lower)) {
    throw InvalidParameter("price grid bounds collapse (upper <= lower)");
  }
  grid.values.resize(m);
  const double step = (grid.upper - grid.lower) / static_cast<double>(m - 1);
  for (std::size_t j = 0; j < m; ++j) {
    grid.values[j] = grid.lower + static_cast<double>(j) * step;
  }
  grid.values.back() = grid.upper;
  return grid;
}

std::string_view to_string(InfoMode mode) {
  return mode == InfoMode::kFullInformation ? "full" : "self";
}

InfoMode parse_info_mode(std::string_view name) {
  if (name == "full") return InfoMode::kFullInformation;
  if (name == "self") return InfoMode::kSelfOnly;
  throw InvalidParameter("unknown information mode '" + std::string(name) +
                         "' (expected full or self)");
}

void StateSpec::validate() const {
  if (memory_len < 1) throw InvalidParameter("memory length must be >= 1");
}

std::uint64_t state_space_size(const StateSpec& spec, std::size_t m) {
  spec.validate();
  if (m < 1) throw InvalidParameter("price grid must have m >= 1");
  std::uint64_t size = 1;
  for (std::size_t s = 0; s < spec.slots(); ++s) {
    if (size > std::numeric_limits<std::uint64_t>::max() / m) {
      throw InvalidParameter("state space does not fit in 64 bits");
    }
    size *= m;
  }
  return size;
}

std::vector<std::size_t> state_slots(const std::vector<JointAction>& history,
                                     const StateSpec& spec, int agent) {
  const auto own = static_cast<std::size_t>(agent);
  const std::size_t rival = 1 - own;
  std::vector<std::size_t> slots;
  slots.reserve(spec.slots());
  for (std::size_t k = 0; k < spec.memory_len; ++k) {
    slots.push_back(history.at(k)[own]);
  }
  if (spec.info == InfoMode::kFullInformation) {
    for (std::size_t k = 0; k < spec.memory_len; ++k) {
      slots.push_back(history.at(k)[rival]);
    }
  }
  return slots;
}

std::uint64_t encode_tabular(const std::vector<std::size_t>& slots,
                             std::size_t m) {
  std::uint64_t index = 0;
  for (std::size_t slot : slots) index = index * m + slot;
  return index;
}

std::vector<std::size_t> decode_tabular(std::uint64_t index,
                                        std::size_t slot_count,
                                        std::size_t m) {
  std::vector<std::size_t> slots(slot_count);
  for (std::size_t s = slot_count; s-- > 0;) {
    slots[s] = static_cast<std::size_t>(index % m);
    index /= m;
  }
  return slots;
}

std::size_t neural_input_dim(const StateSpec& spec, std::size_t m,
                             NeuralEncoding encoding) {
  return encoding == NeuralEncoding::kOneHot ? spec.slots() * m : spec.slots();
}

std::vector<double> encode_neural(const std::vector<std::size_t>& slots,
                                  const PriceGrid& grid,
                                  NeuralEncoding encoding) {
  if (encoding == NeuralEncoding::kOneHot) {
    std::vector<double> features(slots.size() * grid.m, 0.0);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      features[s * grid.m + slots[s]] = 1.0;
    }
    return features;
  }
  std::vector<double> features(slots.size());
  const double width = grid.upper - grid.lower;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    features[s] = (grid.values[slots[s]] - grid.lower) / width;
  }
  return features;
}

Observation encode_state(const std::vector<JointAction>& history,
                         const StateSpec& spec, const PriceGrid& grid,
                         int agent, NeuralEncoding encoding) {
  const std::vector<std::size_t> slots = state_slots(history, spec, agent);
  Observation obs;
  obs.index = encode_tabular(slots, grid.m);
  obs.features = encode_neural(slots, grid, encoding);
  return obs;
}

PricingEnv::PricingEnv(MarketSpec market, PriceGrid grid, StateSpec state,
                       NeuralEncoding encoding)
    : market_(market),
      grid_(std::move(grid)),
      state_(state),
      encoding_(encoding) {
  market_.validate();
  state_.validate();
  if (grid_.m < 2 || grid_.values.size() != grid_.m) {
    throw InvalidParameter("price grid is malformed");
  }
  for (double p : grid_.values) {
    if (!price_admissible(market_, p)) {
      throw DomainError("price grid leaves the model's admissible band");
    }
  }
  // Validates that the tabular encoding fits.
  (void)state_space_size(state_, grid_.m);
  history_.assign(state_.memory_len, JointAction{0, 0});
}

std::array<Observation, 2> PricingEnv::reset(Rng& rng) {
  for (auto& joint : history_) {
    joint[0] = static_cast<std::size_t>(uniform_index(rng, grid_.m));
    joint[1] = static_cast<std::size_t>(uniform_index(rng, grid_.m));
  }
  t_ = 0;
  return {view(0), view(1)};
}

std::array<Observation, 2> PricingEnv::reset_fixed(JointAction start) {
  if (start[0] >= grid_.m || start[1] >= grid_.m) {
    throw InvalidParameter("start action outside the price grid");
  }
  history_.assign(state_.memory_len, start);
  t_ = 0;
  return {view(0), view(1)};
}

StepOutcome PricingEnv::step(JointAction actions) {
  if (actions[0] >= grid_.m || actions[1] >= grid_.m) {
    throw InvalidParameter("action index outside the price grid");
  }
  StepOutcome out;
  out.prices = {grid_.values[actions[0]], grid_.values[actions[1]]};
  out.rewards = {profit(market_, out.prices[0], out.prices[1]),
                 profit(market_, out.prices[1], out.prices[0])};
  for (std::size_t k = history_.size() - 1; k > 0; --k) {
    history_[k] = history_[k - 1];
  }
  history_[0] = actions;
  ++t_;
  out.next_views = {view(0), view(1)};
  return out;
}

Observation PricingEnv::view(int agent) const {
  return encode_state(history_, state_, grid_, agent, encoding_);
}

}  // namespace bertrand
