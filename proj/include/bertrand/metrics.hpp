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

#ifndef BERTRAND_METRICS_HPP_
#define BERTRAND_METRICS_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bertrand/equilibrium.hpp"
#include "bertrand/pricing_env.hpp"
#include "bertrand/record.hpp"

namespace bertrand::metrics {

// Relative price deviation index (p - pN) / (pM - pN). Throws DomainError
// when pM == pN.
double rpdi(double mean_price, const EquilibriumReport& eq);

// Normalized profit (pi - piN) / (piM - piN). Throws DomainError when
// piM == piN.
double delta(double mean_profit, const EquilibriumReport& eq);

// Mean of the last `window_len` entries. Throws InsufficientData if the
// series is shorter than the window, InvalidParameter for a zero window.
double window_mean(std::span<const double> series, std::size_t window_len);

struct RunMetrics {
  std::string group;
  std::uint64_t seed = 0;
  std::array<double, 2> rpdi{};
  std::array<double, 2> delta{};
  std::int64_t window_first = 0;  // first step (1-based) in the window
  std::int64_t window_last = 0;
};

// RPDI and delta per agent over the last `window_len` recorded steps.
RunMetrics summarize_run(const RunRecord& record, const EquilibriumReport& eq,
                         std::size_t window_len);

struct PairDiff {
  double rpdi = 0.0;   // agent0 - agent1
  double delta = 0.0;
};
PairDiff pairwise_diff(const RunMetrics& run);

struct Stat {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;    // sample standard deviation (n - 1)
  double ci95 = 0.0;   // 1.96 * std / sqrt(n)
};
Stat describe(std::span<const double> values);

struct AggregateMetrics {
  std::string group;
  std::array<Stat, 2> rpdi;
  std::array<Stat, 2> delta;
  Stat rpdi_diff;
  Stat delta_diff;
};
// All runs must share one group.
AggregateMetrics aggregate(const std::vector<RunMetrics>& runs);

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};
// Quartiles by linear interpolation between order statistics.
BoxStats box_stats(std::vector<double> values);

// Frequency of each grid price over the last `window_len` steps of every
// record; result[agent][j] for grid index j. Each agent's row sums to 1.
std::array<std::vector<double>, 2> price_heatmap(
    const std::vector<RunRecord>& records, std::size_t window_len,
    const PriceGrid& grid);

// Exports.
// "scenario,market,agent,run_seed,rpdi,delta"
void write_summary_csv(std::ostream& out, const std::string& market,
                       const std::vector<RunMetrics>& runs);
// "group,agent,metric,min,q1,median,q3,max"
void write_boxstats_csv(std::ostream& out,
                        const std::vector<RunMetrics>& runs);
// "agent,price,frequency"
void write_heatmap_csv(std::ostream& out,
                       const std::array<std::vector<double>, 2>& heatmap,
                       const PriceGrid& grid);

}  // namespace bertrand::metrics

#endif  // BERTRAND_METRICS_HPP_
