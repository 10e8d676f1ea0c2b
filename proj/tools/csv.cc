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

#include "csv.h"

#include <iterator>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"

namespace r1smg::tools {
namespace {

absl::string_view Trim(std::string_view s) {
  return absl::StripAsciiWhitespace(absl::string_view(s.data(), s.size()));
}

}  // namespace

std::optional<size_t> CsvTable::Column(std::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (Trim(header[i]) == absl::string_view(name.data(), name.size())) return i;
  }
  return std::nullopt;
}

absl::StatusOr<CsvTable> ReadCsv(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);

  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool record_has_content = false;
  int64_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    // Blank lines carry no record.
    if (record_has_content) records.push_back(std::move(current));
    current = CsvRecord{};
    record_has_content = false;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      record_has_content = true;
    } else if (c == ',') {
      end_field();
      record_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
      ++line;
      current.line = line;
    } else {
      field.push_back(c);
      if (c != ' ' && c != '\t') record_has_content = true;
    }
  }
  if (in_quotes) current.unterminated_quote = true;
  if (record_has_content || in_quotes) {
    record_has_content = true;
    end_record();
  }

  if (records.empty()) return absl::InvalidArgumentError("CSV has no header row");
  CsvTable table;
  table.header = std::move(records.front().fields);
  records.erase(records.begin());
  table.records = std::move(records);
  return table;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::optional<double> ParseDouble(std::string_view s) {
  const absl::string_view t = Trim(s);
  double v;
  if (t.empty() || !absl::SimpleAtod(t, &v)) return std::nullopt;
  return v;
}

std::optional<int64_t> ParseInt(std::string_view s) {
  const absl::string_view t = Trim(s);
  int64_t v;
  if (t.empty() || !absl::SimpleAtoi(t, &v)) return std::nullopt;
  return v;
}

}  // namespace r1smg::tools
