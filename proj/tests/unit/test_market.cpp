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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "bertrand/errors.hpp"
#include "bertrand/market.hpp"
#include "bertrand/rng.hpp"

namespace bertrand {
namespace {

TEST(Demand, StandardBranches) {
  const auto s = MarketSpec::standard();
  EXPECT_DOUBLE_EQ(demand(s, 0.3, 0.5), 0.7);
  EXPECT_DOUBLE_EQ(demand(s, 0.5, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(demand(s, 0.4, 0.4), 0.3);
}

TEST(Demand, EdgeworthCapsTheWinnerOnly) {
  const auto s = MarketSpec::edgeworth(0.6);
  EXPECT_DOUBLE_EQ(demand(s, 0.2, 0.5), 0.6);
  EXPECT_DOUBLE_EQ(demand(s, 0.5, 0.6), 0.5);  // 1 - p below the cap
  EXPECT_DOUBLE_EQ(demand(s, 0.1, 0.1), 0.45); // tie: half of 0.9, uncapped
  EXPECT_DOUBLE_EQ(demand(s, 0.6, 0.2), 0.0);
}

TEST(Demand, LogitReference) {
  const auto s = MarketSpec::logit(1.0, 2.0, 0.25);
  const double e = std::exp((2.0 - 1.473) / 0.25);
  EXPECT_NEAR(demand(s, 1.473, 1.473), e / (2 * e + 1), 1e-15);
  EXPECT_NEAR(demand(s, 1.473, 1.473), 0.4713, 1e-4);
  EXPECT_NEAR(profit(s, 1.473, 1.473), 0.223, 1e-3);
}

TEST(Demand, LogitSharesStayBelowOneAndAreMonotone) {
  const auto s = MarketSpec::logit();
  Rng rng = make_stream(7, 0);
  for (int i = 0; i < 2000; ++i) {
    const double a = 0.5 + 2.0 * uniform01(rng), b = 0.5 + 2.0 * uniform01(rng);
    const double d0 = demand(s, a, b), d1 = demand(s, b, a);
    EXPECT_GT(d0, 0.0);
    EXPECT_LT(d0, 1.0);
    EXPECT_LT(d0 + d1, 1.0);
    EXPECT_LT(demand(s, a + 0.01, b), d0);
    EXPECT_GT(demand(s, a, b + 0.01), d0);
  }
}

TEST(Demand, PiecewiseModelsNeverServeBothUnlessTied) {
  Rng rng = make_stream(8, 0);
  for (const auto& s : {MarketSpec::standard(), MarketSpec::edgeworth(0.7)}) {
    for (int i = 0; i < 2000; ++i) {
      const double a = uniform01(rng), b = uniform01(rng);
      if (a == b) continue;
      EXPECT_FALSE(demand(s, a, b) > 0.0 && demand(s, b, a) > 0.0);
      if (s.kind == MarketKind::kEdgeworth) {
        EXPECT_LE(demand(s, a, b), s.k);
        if (1.0 - a <= s.k) {
          EXPECT_EQ(demand(s, a, b), demand(MarketSpec::standard(), a, b));
        }
      }
    }
  }
}

TEST(Demand, TieToleranceAppliesToContinuousPrices) {
  auto s = MarketSpec::standard();
  s.tie_tolerance = 1e-6;
  EXPECT_DOUBLE_EQ(demand(s, 0.4, 0.4 + 1e-7), 0.3);
  s.tie_tolerance = 0.0;
  EXPECT_DOUBLE_EQ(demand(s, 0.4, 0.4 + 1e-7), 0.6);
}

TEST(Demand, RejectsInvalidInput) {
  EXPECT_THROW(demand(MarketSpec::standard(), 1.2, 0.5), DomainError);
  EXPECT_THROW(demand(MarketSpec::standard(), -0.1, 0.5), DomainError);
  EXPECT_THROW(demand(MarketSpec::edgeworth(0.5), 0.2, 0.3), InvalidParameter);
  EXPECT_THROW(demand(MarketSpec::logit(1.0, 2.0, 0.0), 1.5, 1.5), InvalidParameter);
  EXPECT_THROW(demand(MarketSpec::standard(-0.1), 0.2, 0.3), InvalidParameter);
  EXPECT_THROW(demand(MarketSpec::standard(1.0), 0.2, 0.3), InvalidParameter);
  EXPECT_THROW(demand(MarketSpec::logit(), NAN, 1.5), DomainError);
}

TEST(Profit, ReferenceValues) {
  EXPECT_DOUBLE_EQ(profit(MarketSpec::standard(), 0.5, 0.5), 0.125);
  EXPECT_NEAR(profit(MarketSpec::logit(), 1.925, 1.925), 0.337, 1e-3);
  EXPECT_DOUBLE_EQ(profit(MarketSpec::logit(), 1.0, 1.7), 0.0);
  EXPECT_DOUBLE_EQ(profit(MarketSpec::standard(0.2), 0.2, 0.9), 0.0);
  EXPECT_LT(profit(MarketSpec::logit(), 0.9, 1.5), 0.0);
}

TEST(Profit, JointProfit) {
  EXPECT_DOUBLE_EQ(joint_profit(MarketSpec::standard(), 0.5, 0.5), 0.25);
  EXPECT_NEAR(joint_profit(MarketSpec::logit(), 1.925, 1.925), 0.675, 1e-3);
  EXPECT_DOUBLE_EQ(joint_profit(MarketSpec::standard(0.3), 0.3, 0.3), 0.0);
}

TEST(Profit, LogitSlopeMatchesFiniteDifference) {
  const auto s = MarketSpec::logit();
  for (double p : {1.2, 1.47, 1.8, 2.3}) {
    const double h = 1e-6;
    const double fd = (profit(s, p + h, 1.6) - profit(s, p - h, 1.6)) / (2 * h);
    EXPECT_NEAR(logit_profit_slope(s, p, 1.6), fd, 1e-7);
  }
}

TEST(Surface, CardinalityAndCorners) {
  const auto s = MarketSpec::standard();
  const auto two = profit_surface(s, 2);
  ASSERT_EQ(two.size(), 4u);
  EXPECT_EQ(two[0].p0, 0.0);
  EXPECT_EQ(two[0].p1, 0.0);
  EXPECT_EQ(two[1].p1, 1.0);
  EXPECT_EQ(two[3].p0, 1.0);
  EXPECT_EQ(profit_surface(MarketSpec::logit(), 17).size(), 289u);

  const auto three = profit_surface(s, 3);
  // Row (0.5, 1.0): firm 0 undercuts.
  EXPECT_EQ(three[5].p0, 0.5);
  EXPECT_EQ(three[5].p1, 1.0);
  EXPECT_DOUBLE_EQ(three[5].profit0, 0.25);
  EXPECT_THROW(profit_surface(s, 1), InvalidParameter);
}

TEST(Surface, CsvFormat) {
  std::ostringstream out;
  write_surface_csv(out, profit_surface(MarketSpec::standard(), 2));
  EXPECT_EQ(out.str(), "p0,p1,profit0\n0,0,0\n0,1,0\n1,0,0\n1,1,0\n");
}

TEST(MarketKindNames, RoundTrip) {
  for (auto k : {MarketKind::kStandard, MarketKind::kEdgeworth, MarketKind::kLogit}) {
    EXPECT_EQ(parse_market_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_market_kind("cournot"), InvalidParameter);
}

}  // namespace
}  // namespace bertrand
