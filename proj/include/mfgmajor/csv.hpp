// Copyright 2026 The mfgmajor Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MFGMAJOR_CSV_HPP_
#define MFGMAJOR_CSV_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace mfgmajor {

// Shortest round-trip decimal form; NaN is written as NA.
std::string FormatNumber(double v);

void WriteCsvRow(std::ostream& out, const std::vector<std::string>& cells);
void WriteCsvRow(std::ostream& out, const std::vector<double>& values);

// Minimal reader for numeric CSV with a header line. NA parses as NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws DomainError if absent.
  int Column(const std::string& name) const;
  std::vector<double> ColumnValues(const std::string& name) const;
};
CsvTable ReadCsv(std::istream& in);

}  // namespace mfgmajor

#endif  // MFGMAJOR_CSV_HPP_
