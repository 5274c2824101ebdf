#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sitaware {

struct CsvRecord {
  std::vector<std::string> fields;
  int line = 0;  // 1-based line where the record starts
};

// RFC-4180 reader: quoted fields may contain commas, doubled quotes and
// newlines; CRLF and LF both end records; blank lines are skipped.
std::vector<CsvRecord> parse_csv(std::string_view text);

// Quotes a field only when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);
std::string csv_row(std::span<const std::string> fields);

}  // namespace sitaware
