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

#include "bertrand/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bertrand/errors.hpp"

namespace bertrand {
namespace {

void check_scan(const ScanOptions& scan) {
  if (scan.grid_points < 3) {
    throw InvalidParameter("scan grid needs at least 3 points");
  }
  if (!(scan.tolerance > 0.0)) {
    throw InvalidParameter("scan tolerance must be positive");
  }
  if (scan.max_iterations < 1) {
    throw InvalidParameter("scan iteration cap must be >= 1");
  }
}

PriceBand logit_search_band(const MarketSpec& spec) {
  if (!(spec.g > spec.c)) {
    throw InvalidParameter("Logit equilibrium search needs quality g > cost c");
  }
  return {spec.c, spec.g};
}

// Index of the scan point maximizing f; first maximum wins.
template <typename F>
int scan_argmax(const std::vector<double>& grid, F&& f) {
  int best = 0;
  double best_value = f(grid[0]);
  for (int i = 1; i < static_cast<int>(grid.size()); ++i) {
    const double v = f(grid[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <typename F>
double golden_max(double lo, double hi, double tolerance, int max_iterations,
                  F&& f) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; b - a > tolerance; ++it) {
    if (it >= max_iterations) {
      throw NonConvergence("golden-section refinement exceeded iteration cap");
    }
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// Root of the symmetric first-order condition g(p) = d/dp_own profit at
// (p, p), bracketed by [lo, hi] with g(lo) > 0 > g(hi).
double bisect_symmetric_foc(const MarketSpec& spec, double lo, double hi,
                            const ScanOptions& scan) {
  auto foc = [&](double p) { return logit_profit_slope(spec, p, p); };
  double f_lo = foc(lo);
  double f_hi = foc(hi);
  if (f_lo <= 0.0 || f_hi >= 0.0) {
    throw NonConvergence("first-order condition is not bracketed");
  }
  // Enough halvings to shrink the bracket well below the tolerance.
  for (int it = 0; it < 200 && hi - lo > 1e-3 * scan.tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = foc(mid);
    if (f_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double logit_nash(const MarketSpec& spec, const ScanOptions& scan) {
  const PriceBand band = logit_search_band(spec);
  const std::vector<double> grid =
      deviation_grid(band.lower, band.upper, scan.grid_points);
  const double step = grid[1] - grid[0];

  double p = band.lower;
  bool converged = false;
  for (int it = 0; it < scan.max_iterations; ++it) {
    const double rival = p;
    const double next = grid[scan_argmax(
        grid, [&](double own) { return profit(spec, own, rival); })];
    const double change = std::abs(next - p);
    p = next;
    if (change < scan.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergence("best-response iteration exceeded " +
                         std::to_string(scan.max_iterations) + " iterations");
  }

  // The scan fixed point is within a grid step of the true root; widen the
  // bracket until the first-order condition changes sign.
  double lo = p - step;
  double hi = p + step;
  for (int widen = 0; widen < 60; ++widen) {
    if (logit_profit_slope(spec, lo, lo) > 0.0 &&
        logit_profit_slope(spec, hi, hi) < 0.0) {
      return bisect_symmetric_foc(spec, lo, hi, scan);
    }
    lo -= step;
    hi += step;
  }
  throw NonConvergence("could not bracket the Nash first-order condition");
}

double logit_monopoly(const MarketSpec& spec, const ScanOptions& scan) {
  const PriceBand band = logit_search_band(spec);
  const std::vector<double> grid =
      deviation_grid(band.lower, band.upper, scan.grid_points);
  auto symmetric = [&](double p) { return joint_profit(spec, p, p); };
  const int best = scan_argmax(grid, symmetric);
  const double lo = grid[best > 0 ? best - 1 : 0];
  const double hi = grid[best + 1 < static_cast<int>(grid.size()) ? best + 1
                                                                   : best];
  return golden_max(lo, hi, scan.tolerance * 1e-2, scan.max_iterations,
                    symmetric);
}

}  // namespace

std::vector<double> deviation_grid(double lower, double upper, int points) {
  if (points < 2 || !(upper > lower)) {
    throw InvalidParameter("deviation grid needs >= 2 points and upper > lower");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = (upper - lower) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lower + i * step;
  grid.back() = upper;
  return grid;
}

double nash_price(const MarketSpec& spec, const ScanOptions& scan) {
  spec.validate();
  check_scan(scan);
  if (spec.kind == MarketKind::kLogit) return logit_nash(spec, scan);
  return spec.c;
}

double monopoly_price(const MarketSpec& spec, const ScanOptions& scan) {
  spec.validate();
  check_scan(scan);
  if (spec.kind == MarketKind::kLogit) return logit_monopoly(spec, scan);
  return std::min(1.0, (1.0 + spec.c) / 2.0);
}

double nash_price_numeric(const MarketSpec& spec, const ScanOptions& scan) {
  spec.validate();
  check_scan(scan);
  if (spec.kind == MarketKind::kLogit) return logit_nash(spec, scan);
  // Lowest symmetric grid price that survives the deviation scan.
  const std::vector<double> grid = deviation_grid(0.0, 1.0, scan.grid_points);
  for (double p : grid) {
    if (verify_no_profitable_deviation(spec, p, grid, 1e-12)) return p;
  }
  throw NonConvergence("no symmetric grid price survives the deviation scan");
}

double monopoly_price_numeric(const MarketSpec& spec, const ScanOptions& scan) {
  spec.validate();
  check_scan(scan);
  if (spec.kind == MarketKind::kLogit) return logit_monopoly(spec, scan);
  const std::vector<double> grid = deviation_grid(0.0, 1.0, scan.grid_points);
  auto symmetric = [&](double p) { return joint_profit(spec, p, p); };
  const int best = scan_argmax(grid, symmetric);
  const double lo = grid[best > 0 ? best - 1 : 0];
  const double hi = grid[best + 1 < static_cast<int>(grid.size()) ? best + 1
                                                                   : best];
  return golden_max(lo, hi, scan.tolerance * 1e-2, scan.max_iterations,
                    symmetric);
}

bool verify_no_profitable_deviation(const MarketSpec& spec, double candidate,
                                    std::span<const double> grid,
                                    double tolerance) {
  const double baseline = profit(spec, candidate, candidate);
  for (double deviation : grid) {
    if (!price_admissible(spec, deviation)) continue;
    if (profit(spec, deviation, candidate) > baseline + tolerance) return false;
  }
  return true;
}

EquilibriumReport equilibrium_report(const MarketSpec& spec,
                                     const ScanOptions& scan) {
  EquilibriumReport report;
  report.p_nash = nash_price(spec, scan);
  report.p_monopoly = monopoly_price(spec, scan);
  report.pi_nash = profit(spec, report.p_nash, report.p_nash);
  report.pi_monopoly = profit(spec, report.p_monopoly, report.p_monopoly);
  return report;
}

}  // namespace bertrand
