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

#ifndef BERTRAND_MARKET_HPP_
#define BERTRAND_MARKET_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bertrand {

enum class MarketKind { kStandard, kEdgeworth, kLogit };

std::string_view to_string(MarketKind kind);
MarketKind parse_market_kind(std::string_view name);

// Economic parameters of a duopoly. Fields that do not apply to `kind` are
// ignored (g and mu for Standard/Edgeworth, k for Standard/Logit).
struct MarketSpec {
  MarketKind kind = MarketKind::kStandard;
  double c = 0.0;     // marginal cost
  double g = 2.0;     // product quality (Logit)
  double mu = 0.25;   // substitutability (Logit)
  double k = 0.6;     // capacity per firm (Edgeworth)
  // Two prices closer than this count as a tie. Grid prices tie exactly.
  double tie_tolerance = 1e-12;

  static MarketSpec standard(double c = 0.0);
  static MarketSpec edgeworth(double k = 0.6, double c = 0.0);
  static MarketSpec logit(double c = 1.0, double g = 2.0, double mu = 0.25);

  // Throws InvalidParameter when an invariant is violated.
  void validate() const;
};

struct PriceBand {
  double lower;
  double upper;
};

// Prices accepted by demand(). Standard/Edgeworth: [0, 1]. Logit: any finite
// price.
bool price_admissible(const MarketSpec& spec, double price);

// Default plotting band: [0, 1] for Standard/Edgeworth, [c, g] for Logit.
PriceBand display_band(const MarketSpec& spec);

// Demand faced by the firm charging `own_price` when its rival charges
// `opp_price`. Throws InvalidParameter / DomainError.
double demand(const MarketSpec& spec, double own_price, double opp_price);

// (own_price - c) * demand. Negative below cost.
double profit(const MarketSpec& spec, double own_price, double opp_price);

double joint_profit(const MarketSpec& spec, double p0, double p1);

// d/dp_own of profit for the Logit model, evaluated analytically.
double logit_profit_slope(const MarketSpec& spec, double own_price,
                          double opp_price);

struct SurfacePoint {
  double p0;
  double p1;
  double profit0;
};

// Row-major resolution x resolution grid over `band` (p0 varies slowest).
std::vector<SurfacePoint> profit_surface(const MarketSpec& spec,
                                         int resolution);
std::vector<SurfacePoint> profit_surface(const MarketSpec& spec,
                                         int resolution, PriceBand band);

// CSV with header "p0,p1,profit0".
void write_surface_csv(std::ostream& out,
                       const std::vector<SurfacePoint>& surface);

}  // namespace bertrand

#endif  // BERTRAND_MARKET_HPP_
