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

#include "bertrand/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "bertrand/csv.hpp"
#include "bertrand/errors.hpp"

namespace bertrand::metrics {

double rpdi(double mean_price, const EquilibriumReport& eq) {
  const double spread = eq.p_monopoly - eq.p_nash;
  if (spread == 0.0) {
    throw DomainError("RPDI undefined: monopoly and Nash prices coincide");
  }
  return (mean_price - eq.p_nash) / spread;
}

double delta(double mean_profit, const EquilibriumReport& eq) {
  const double spread = eq.pi_monopoly - eq.pi_nash;
  if (spread == 0.0) {
    throw DomainError("delta undefined: monopoly and Nash profits coincide");
  }
  return (mean_profit - eq.pi_nash) / spread;
}

double window_mean(std::span<const double> series, std::size_t window_len) {
  if (window_len == 0) throw InvalidParameter("window length must be >= 1");
  if (series.size() < window_len) {
    throw InsufficientData("series of length " + std::to_string(series.size()) +
                           " is shorter than the window " +
                           std::to_string(window_len));
  }
  const auto tail = series.subspan(series.size() - window_len);
  return std::accumulate(tail.begin(), tail.end(), 0.0) /
         static_cast<double>(window_len);
}

RunMetrics summarize_run(const RunRecord& record, const EquilibriumReport& eq,
                         std::size_t window_len) {
  RunMetrics out;
  out.group = record.group;
  out.seed = record.seed;
  out.rpdi = {rpdi(window_mean(record.tail.price0, window_len), eq),
              rpdi(window_mean(record.tail.price1, window_len), eq)};
  out.delta = {delta(window_mean(record.tail.profit0, window_len), eq),
               delta(window_mean(record.tail.profit1, window_len), eq)};
  out.window_first = record.tail.t[record.tail.size() - window_len];
  out.window_last = record.tail.t.back();
  return out;
}

PairDiff pairwise_diff(const RunMetrics& run) {
  return {run.rpdi[0] - run.rpdi[1], run.delta[0] - run.delta[1]};
}

Stat describe(std::span<const double> values) {
  Stat s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  s.ci95 = 1.96 * s.std / std::sqrt(static_cast<double>(s.n));
  return s;
}

AggregateMetrics aggregate(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw InsufficientData("aggregate needs at least one run");
  AggregateMetrics agg;
  agg.group = runs.front().group;
  std::array<std::vector<double>, 2> rp, de;
  std::vector<double> rp_diff, de_diff;
  for (const auto& run : runs) {
    if (run.group != agg.group) {
      throw InvalidParameter("aggregate mixes groups '" + agg.group +
                             "' and '" + run.group + "'");
    }
    for (int a = 0; a < 2; ++a) {
      rp[a].push_back(run.rpdi[a]);
      de[a].push_back(run.delta[a]);
    }
    const PairDiff d = pairwise_diff(run);
    rp_diff.push_back(d.rpdi);
    de_diff.push_back(d.delta);
  }
  for (int a = 0; a < 2; ++a) {
    agg.rpdi[a] = describe(rp[a]);
    agg.delta[a] = describe(de[a]);
  }
  agg.rpdi_diff = describe(rp_diff);
  agg.delta_diff = describe(de_diff);
  return agg;
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw InsufficientData("box statistics of no values");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75),
          values.back()};
}

std::array<std::vector<double>, 2> price_heatmap(
    const std::vector<RunRecord>& records, std::size_t window_len,
    const PriceGrid& grid) {
  if (window_len == 0) throw InvalidParameter("window length must be >= 1");
  std::array<std::vector<std::uint64_t>, 2> counts;
  counts[0].assign(grid.m, 0);
  counts[1].assign(grid.m, 0);
  std::uint64_t total = 0;
  for (const auto& record : records) {
    const StepSeries& tail = record.tail;
    if (tail.size() < window_len) {
      throw InsufficientData("run tail shorter than the heatmap window");
    }
    for (std::size_t i = tail.size() - window_len; i < tail.size(); ++i) {
      if (tail.action0[i] >= grid.m || tail.action1[i] >= grid.m) {
        throw DomainError("recorded action outside the price grid");
      }
      ++counts[0][tail.action0[i]];
      ++counts[1][tail.action1[i]];
    }
    total += window_len;
  }
  if (total == 0) throw InsufficientData("price heatmap of no records");
  std::array<std::vector<double>, 2> freq;
  for (int a = 0; a < 2; ++a) {
    freq[a].resize(grid.m);
    for (std::size_t j = 0; j < grid.m; ++j) {
      freq[a][j] = static_cast<double>(counts[a][j]) / static_cast<double>(total);
    }
  }
  return freq;
}

void write_summary_csv(std::ostream& out, const std::string& market,
                       const std::vector<RunMetrics>& runs) {
  out << "scenario,market,agent,run_seed,rpdi,delta\n";
  for (const auto& run : runs) {
    for (int a = 0; a < 2; ++a) {
      write_csv_row(out, {run.group, market, std::to_string(a),
                          std::to_string(run.seed), format_number(run.rpdi[a]),
                          format_number(run.delta[a])});
    }
  }
}

void write_boxstats_csv(std::ostream& out,
                        const std::vector<RunMetrics>& runs) {
  out << "group,agent,metric,min,q1,median,q3,max\n";
  std::map<std::string, std::vector<const RunMetrics*>> groups;
  std::vector<std::string> order;
  for (const auto& run : runs) {
    if (!groups.count(run.group)) order.push_back(run.group);
    groups[run.group].push_back(&run);
  }
  auto emit = [&](const std::string& group, const std::string& agent,
                  const std::string& metric, std::vector<double> values) {
    const BoxStats b = box_stats(std::move(values));
    write_csv_row(out, {group, agent, metric, format_number(b.min),
                        format_number(b.q1), format_number(b.median),
                        format_number(b.q3), format_number(b.max)});
  };
  for (const auto& group : order) {
    const auto& members = groups[group];
    for (int a = 0; a < 2; ++a) {
      std::vector<double> rp, de;
      for (const auto* run : members) {
        rp.push_back(run->rpdi[a]);
        de.push_back(run->delta[a]);
      }
      emit(group, std::to_string(a), "rpdi", rp);
      emit(group, std::to_string(a), "delta", de);
    }
    std::vector<double> rp, de;
    for (const auto* run : members) {
      const PairDiff d = pairwise_diff(*run);
      rp.push_back(d.rpdi);
      de.push_back(d.delta);
    }
    emit(group, "diff", "rpdi", rp);
    emit(group, "diff", "delta", de);
  }
}

void write_heatmap_csv(std::ostream& out,
                       const std::array<std::vector<double>, 2>& heatmap,
                       const PriceGrid& grid) {
  out << "agent,price,frequency\n";
  for (int a = 0; a < 2; ++a) {
    for (std::size_t j = 0; j < grid.m; ++j) {
      write_csv_row(out, {std::to_string(a), format_number(grid.values[j]),
                          format_number(heatmap[a][j])});
    }
  }
}

}  // namespace bertrand::metrics
