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

#include "bertrand/market.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bertrand/csv.hpp"
#include "bertrand/errors.hpp"

namespace bertrand {

std::string_view to_string(MarketKind kind) {
  switch (kind) {
    case MarketKind::kStandard:
      return "standard";
    case MarketKind::kEdgeworth:
      return "edgeworth";
    case MarketKind::kLogit:
      return "logit";
  }
  return "unknown";
}

MarketKind parse_market_kind(std::string_view name) {
  if (name == "standard") return MarketKind::kStandard;
  if (name == "edgeworth") return MarketKind::kEdgeworth;
  if (name == "logit") return MarketKind::kLogit;
  throw InvalidParameter("unknown market model '" + std::string(name) +
                         "' (expected standard, edgeworth or logit)");
}

MarketSpec MarketSpec::standard(double c) {
  MarketSpec spec;
  spec.kind = MarketKind::kStandard;
  spec.c = c;
  return spec;
}

MarketSpec MarketSpec::edgeworth(double k, double c) {
  MarketSpec spec;
  spec.kind = MarketKind::kEdgeworth;
  spec.k = k;
  spec.c = c;
  return spec;
}

MarketSpec MarketSpec::logit(double c, double g, double mu) {
  MarketSpec spec;
  spec.kind = MarketKind::kLogit;
  spec.c = c;
  spec.g = g;
  spec.mu = mu;
  return spec;
}

void MarketSpec::validate() const {
  if (!std::isfinite(c) || c < 0.0) {
    throw InvalidParameter("marginal cost c must be finite and >= 0");
  }
  if (!(tie_tolerance >= 0.0)) {
    throw InvalidParameter("tie_tolerance must be >= 0");
  }
  switch (kind) {
    case MarketKind::kEdgeworth:
      if (!(k > 0.5) || !std::isfinite(k)) {
        throw InvalidParameter("Edgeworth capacity k must exceed 0.5");
      }
      [[fallthrough]];
    case MarketKind::kStandard:
      if (!(c < 1.0)) {
        throw InvalidParameter(
            "marginal cost must be below 1 for linear demand d(p) = 1 - p");
      }
      break;
    case MarketKind::kLogit:
      if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw InvalidParameter("Logit substitutability mu must be > 0");
      }
      if (!std::isfinite(g)) {
        throw InvalidParameter("Logit quality g must be finite");
      }
      break;
  }
}

bool price_admissible(const MarketSpec& spec, double price) {
  if (!std::isfinite(price)) return false;
  if (spec.kind == MarketKind::kLogit) return true;
  return price >= 0.0 && price <= 1.0;
}

PriceBand display_band(const MarketSpec& spec) {
  if (spec.kind == MarketKind::kLogit) return {spec.c, spec.g};
  return {0.0, 1.0};
}

namespace {

void check_prices(const MarketSpec& spec, double own_price, double opp_price) {
  spec.validate();
  if (!price_admissible(spec, own_price) ||
      !price_admissible(spec, opp_price)) {
    throw DomainError("price outside the admissible band of the " +
                      std::string(to_string(spec.kind)) + " model");
  }
}

// Linear total demand d(p) = 1 - p, clamped to [0, 1].
double linear_demand(double price) { return std::clamp(1.0 - price, 0.0, 1.0); }

double logit_demand(const MarketSpec& spec, double own_price,
                    double opp_price) {
  // Shift exponents by their max so that small mu cannot overflow.
  const double u_own = (spec.g - own_price) / spec.mu;
  const double u_opp = (spec.g - opp_price) / spec.mu;
  const double shift = std::max({u_own, u_opp, 0.0});
  const double e_own = std::exp(u_own - shift);
  const double e_opp = std::exp(u_opp - shift);
  const double e_out = std::exp(-shift);
  return e_own / (e_own + e_opp + e_out);
}

}  // namespace

double demand(const MarketSpec& spec, double own_price, double opp_price) {
  check_prices(spec, own_price, opp_price);
  if (spec.kind == MarketKind::kLogit) {
    return logit_demand(spec, own_price, opp_price);
  }
  const double gap = own_price - opp_price;
  if (std::abs(gap) <= spec.tie_tolerance) {
    // Tie: half the market each. For Edgeworth the cap is inactive here
    // because k > 0.5 >= d(p) / 2.
    return 0.5 * linear_demand(own_price);
  }
  if (gap > 0.0) return 0.0;
  const double full = linear_demand(own_price);
  return spec.kind == MarketKind::kEdgeworth ? std::min(spec.k, full) : full;
}

double profit(const MarketSpec& spec, double own_price, double opp_price) {
  return (own_price - spec.c) * demand(spec, own_price, opp_price);
}

double joint_profit(const MarketSpec& spec, double p0, double p1) {
  return profit(spec, p0, p1) + profit(spec, p1, p0);
}

double logit_profit_slope(const MarketSpec& spec, double own_price,
                          double opp_price) {
  if (spec.kind != MarketKind::kLogit) {
    throw InvalidParameter("logit_profit_slope requires the Logit model");
  }
  const double d = demand(spec, own_price, opp_price);
  // dd/dp = -d (1 - d) / mu.
  return d - (own_price - spec.c) * d * (1.0 - d) / spec.mu;
}

std::vector<SurfacePoint> profit_surface(const MarketSpec& spec,
                                         int resolution) {
  return profit_surface(spec, resolution, display_band(spec));
}

std::vector<SurfacePoint> profit_surface(const MarketSpec& spec,
                                         int resolution, PriceBand band) {
  spec.validate();
  if (resolution < 2) {
    throw InvalidParameter("profit surface resolution must be >= 2");
  }
  if (!(band.upper > band.lower)) {
    throw InvalidParameter("profit surface band must have upper > lower");
  }
  const double step = (band.upper - band.lower) / (resolution - 1);
  auto at = [&](int j) {
    return j == resolution - 1 ? band.upper : band.lower + j * step;
  };
  std::vector<SurfacePoint> rows;
  rows.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double p0 = at(i);
      const double p1 = at(j);
      rows.push_back({p0, p1, profit(spec, p0, p1)});
    }
  }
  return rows;
}

void write_surface_csv(std::ostream& out,
                       const std::vector<SurfacePoint>& surface) {
  out << "p0,p1,profit0\n";
  for (const auto& row : surface) {
    write_csv_row(out, {format_number(row.p0), format_number(row.p1),
                        format_number(row.profit0)});
  }
}

}  // namespace bertrand
