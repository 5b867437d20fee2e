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

#ifndef BERTRAND_CSV_HPP_
#define BERTRAND_CSV_HPP_

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bertrand {

// Numbers in every CSV export: decimal point, 9 significant digits.
inline std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

// Writes one LF-terminated row. Cells are written verbatim.
inline void write_csv_row(std::ostream& out,
                          const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

// Splits a CSV line on commas (no quoting; our files never need it).
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    cells.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

}  // namespace bertrand

#endif  // BERTRAND_CSV_HPP_
