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

#ifndef BERTRAND_EQUILIBRIUM_HPP_
#define BERTRAND_EQUILIBRIUM_HPP_

#include <span>
#include <vector>

#include "bertrand/market.hpp"

namespace bertrand {

struct ScanOptions {
  int grid_points = 2001;     // scan density across [c, g] (Logit)
  double tolerance = 1e-6;    // fixed-point / refinement tolerance
  int max_iterations = 200;   // best-response iteration cap
};

struct EquilibriumReport {
  double p_nash = 0.0;
  double p_monopoly = 0.0;
  double pi_nash = 0.0;       // per-firm profit at (p_nash, p_nash)
  double pi_monopoly = 0.0;   // per-firm profit at (p_monopoly, p_monopoly)
};

// Symmetric Nash price. Standard/Edgeworth return c; Logit runs a scanned
// best-response iteration followed by bisection on the first-order condition.
// Throws NonConvergence if the iteration cap is hit.
double nash_price(const MarketSpec& spec, const ScanOptions& scan = {});

// Symmetric joint-profit maximizing price. Standard/Edgeworth use the closed
// form (1 + c) / 2; Logit uses a scan plus golden-section refinement.
double monopoly_price(const MarketSpec& spec, const ScanOptions& scan = {});

// Numeric counterparts of the closed forms, scanning [0, 1]. Cross-check only.
double nash_price_numeric(const MarketSpec& spec, const ScanOptions& scan = {});
double monopoly_price_numeric(const MarketSpec& spec,
                              const ScanOptions& scan = {});

// True iff no price on `grid` earns more than tolerance above the candidate's
// own payoff against a rival who charges the candidate.
bool verify_no_profitable_deviation(const MarketSpec& spec, double candidate,
                                    std::span<const double> grid,
                                    double tolerance = 1e-9);

// Evenly spaced deviation grid with `points` entries covering [lower, upper].
std::vector<double> deviation_grid(double lower, double upper, int points);

EquilibriumReport equilibrium_report(const MarketSpec& spec,
                                     const ScanOptions& scan = {});

}  // namespace bertrand

#endif  // BERTRAND_EQUILIBRIUM_HPP_
