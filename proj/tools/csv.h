// Copyright 2026 The R1SMG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line
// ends, optional UTF-8 byte order mark. The first record is the header.

#ifndef R1SMG_TOOLS_CSV_H_
#define R1SMG_TOOLS_CSV_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace r1smg::tools {

struct CsvRecord {
  std::vector<std::string> fields;
  int64_t line = 0;  // 1-based line where the record starts.
  bool unterminated_quote = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRecord> records;

  // Index of a header column, matched after trimming spaces.
  std::optional<size_t> Column(std::string_view name) const;
};

// Fails only when the header row is missing.
absl::StatusOr<CsvTable> ReadCsv(std::istream& in);

// Quotes a field when it contains a comma, quote or line break.
std::string CsvField(std::string_view s);

// Parses a trimmed decimal or scientific literal. Rejects empty input and
// trailing garbage; accepts inf and nan so callers can decide.
std::optional<double> ParseDouble(std::string_view s);
std::optional<int64_t> ParseInt(std::string_view s);

}  // namespace r1smg::tools

#endif  // R1SMG_TOOLS_CSV_H_
