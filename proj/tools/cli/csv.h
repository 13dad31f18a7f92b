// Copyright 2026 The natbias Authors.
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

// Minimal RFC 4180 reader and writer for the report files.

#ifndef NATBIAS_CLI_CSV_H_
#define NATBIAS_CLI_CSV_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace natbias::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each padded to header size
  std::vector<std::size_t> row_lines;          // 1-based source line per row

  std::optional<std::size_t> FindColumn(std::string_view name) const;
  // Throws Error(kValidation) when the column is absent.
  std::size_t Column(std::string_view name) const;
};

// Quotes fields holding commas, quotes or line breaks. Ends with "\n".
std::string CsvRow(const std::vector<std::string>& fields);

CsvTable ParseCsv(std::string_view text, std::string_view origin = "<csv>");
CsvTable ReadCsv(const std::filesystem::path& path);

}  // namespace natbias::cli

#endif  // NATBIAS_CLI_CSV_H_
