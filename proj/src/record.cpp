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

#include "bertrand/record.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "bertrand/csv.hpp"
#include "bertrand/errors.hpp"

namespace bertrand {

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kTql:
      return "tql";
    case AgentKind::kDqn:
      return "dqn";
    case AgentKind::kPpo:
      return "ppo";
    case AgentKind::kFixed:
      return "fixed";
  }
  return "unknown";
}

AgentKind parse_agent_kind(std::string_view name) {
  if (name == "tql") return AgentKind::kTql;
  if (name == "dqn") return AgentKind::kDqn;
  if (name == "ppo") return AgentKind::kPpo;
  if (name == "fixed") return AgentKind::kFixed;
  throw InvalidParameter("unknown agent kind '" + std::string(name) +
                         "' (expected tql, dqn, ppo or fixed)");
}

void StepSeries::push(std::int64_t step, std::uint32_t a0, std::uint32_t a1,
                      double p0, double p1, double r0, double r1) {
  t.push_back(step);
  action0.push_back(a0);
  action1.push_back(a1);
  price0.push_back(p0);
  price1.push_back(p1);
  profit0.push_back(r0);
  profit1.push_back(r1);
}

bool RunRecord::same_trajectory(const RunRecord& other) const {
  return group == other.group && seed == other.seed && steps == other.steps &&
         epochs == other.epochs && tail == other.tail &&
         series == other.series && updates == other.updates &&
         exchanges == other.exchanges;
}

namespace {

double parse_double(const std::string& cell) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw FormatError("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw FormatError("malformed number '" + cell + "' in CSV");
  }
}

std::int64_t parse_int(const std::string& cell) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(cell, &used);
    if (used != cell.size()) throw FormatError("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw FormatError("malformed integer '" + cell + "' in CSV");
  }
}

void expect_header(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError("expected CSV header '" + header + "'");
  }
}

}  // namespace

void write_epochs_csv(std::ostream& out, const std::vector<EpochRow>& epochs) {
  out << "epoch,price0,price1,profit0,profit1\n";
  for (const auto& row : epochs) {
    write_csv_row(out, {std::to_string(row.epoch), format_number(row.price0),
                        format_number(row.price1), format_number(row.profit0),
                        format_number(row.profit1)});
  }
}

std::vector<EpochRow> read_epochs_csv(std::istream& in) {
  expect_header(in, "epoch,price0,price1,profit0,profit1");
  std::vector<EpochRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) throw FormatError("epoch CSV row needs 5 cells");
    rows.push_back({parse_int(cells[0]), parse_double(cells[1]),
                    parse_double(cells[2]), parse_double(cells[3]),
                    parse_double(cells[4])});
  }
  return rows;
}

void write_series_csv(std::ostream& out, const StepSeries& series) {
  out << "t,action0,action1,price0,price1,profit0,profit1\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    write_csv_row(out, {std::to_string(series.t[i]),
                        std::to_string(series.action0[i]),
                        std::to_string(series.action1[i]),
                        format_number(series.price0[i]),
                        format_number(series.price1[i]),
                        format_number(series.profit0[i]),
                        format_number(series.profit1[i])});
  }
}

StepSeries read_series_csv(std::istream& in) {
  expect_header(in, "t,action0,action1,price0,price1,profit0,profit1");
  StepSeries series;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 7) throw FormatError("series CSV row needs 7 cells");
    series.push(parse_int(cells[0]),
                static_cast<std::uint32_t>(parse_int(cells[1])),
                static_cast<std::uint32_t>(parse_int(cells[2])),
                parse_double(cells[3]), parse_double(cells[4]),
                parse_double(cells[5]), parse_double(cells[6]));
  }
  return series;
}

}  // namespace bertrand
