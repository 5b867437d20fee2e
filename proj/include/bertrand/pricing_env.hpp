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

#ifndef BERTRAND_PRICING_ENV_HPP_
#define BERTRAND_PRICING_ENV_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "bertrand/equilibrium.hpp"
#include "bertrand/market.hpp"
#include "bertrand/rng.hpp"

namespace bertrand {

// Discrete action space: m equidistant prices in [lower, upper].
struct PriceGrid {
  std::size_t m = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> values;

  double price(std::size_t index) const { return values.at(index); }
  double step() const { return (upper - lower) / static_cast<double>(m - 1); }
  // Grid index whose price is closest to `price`.
  std::size_t nearest_index(double price) const;
};

// Standard/Edgeworth: [0, 1]. Logit: [pN - zeta (pM - pN), pM + zeta (pM - pN)].
PriceGrid build_grid(const MarketSpec& spec, const EquilibriumReport& eq,
                     std::size_t m, double zeta);

enum class InfoMode { kFullInformation, kSelfOnly };

std::string_view to_string(InfoMode mode);
InfoMode parse_info_mode(std::string_view name);

struct StateSpec {
  std::size_t memory_len = 1;
  InfoMode info = InfoMode::kFullInformation;

  std::size_t slots() const {
    return info == InfoMode::kFullInformation ? 2 * memory_len : memory_len;
  }
  void validate() const;
};

// m^(2l) under full information, m^l when agents see only their own prices.
// Throws InvalidParameter if the count does not fit in 64 bits.
std::uint64_t state_space_size(const StateSpec& spec, std::size_t m);

enum class Audience { kTabular, kNeural };

enum class NeuralEncoding { kNormalized, kOneHot };

using JointAction = std::array<std::size_t, 2>;

// What one agent sees of the shared history.
struct Observation {
  std::uint64_t index = 0;        // tabular encoding
  std::vector<double> features;   // neural encoding
};

// Slot layout for agent i: own prices (most recent first), then the rival's
// prices (most recent first) under full information.
std::vector<std::size_t> state_slots(const std::vector<JointAction>& history,
                                     const StateSpec& spec, int agent);

// Mixed-radix index with the first slot most significant.
std::uint64_t encode_tabular(const std::vector<std::size_t>& slots,
                             std::size_t m);
std::vector<std::size_t> decode_tabular(std::uint64_t index,
                                        std::size_t slot_count, std::size_t m);

std::vector<double> encode_neural(const std::vector<std::size_t>& slots,
                                  const PriceGrid& grid,
                                  NeuralEncoding encoding);

std::size_t neural_input_dim(const StateSpec& spec, std::size_t m,
                             NeuralEncoding encoding);

// `history` holds the last l joint actions, most recent first.
Observation encode_state(const std::vector<JointAction>& history,
                         const StateSpec& spec, const PriceGrid& grid,
                         int agent,
                         NeuralEncoding encoding = NeuralEncoding::kNormalized);

struct StepOutcome {
  std::array<double, 2> prices{};
  std::array<double, 2> rewards{};
  std::array<Observation, 2> next_views;
};

// The repeated pricing game. One infinite episode; the environment never
// discounts.
class PricingEnv {
 public:
  PricingEnv(MarketSpec market, PriceGrid grid, StateSpec state,
             NeuralEncoding encoding = NeuralEncoding::kNormalized);

  // Fills the history with uniform random joint actions and returns both
  // agents' views.
  std::array<Observation, 2> reset(Rng& rng);
  // Fills the history with a fixed joint action.
  std::array<Observation, 2> reset_fixed(JointAction start);

  StepOutcome step(JointAction actions);

  Observation view(int agent) const;

  const std::vector<JointAction>& history() const { return history_; }
  std::int64_t t() const { return t_; }
  const MarketSpec& market() const { return market_; }
  const PriceGrid& grid() const { return grid_; }
  const StateSpec& state_spec() const { return state_; }
  NeuralEncoding encoding() const { return encoding_; }

 private:
  MarketSpec market_;
  PriceGrid grid_;
  StateSpec state_;
  NeuralEncoding encoding_;
  std::vector<JointAction> history_;  // most recent first, length l
  std::int64_t t_ = 0;
};

}  // namespace bertrand

#endif  // BERTRAND_PRICING_ENV_HPP_
