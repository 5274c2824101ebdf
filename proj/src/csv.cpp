#include "sitaware/csv.hpp"

#include "sitaware/errors.hpp"

namespace sitaware {

std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool record_has_content = false;
  int line = 1;
  int record_start = 1;

  auto flush_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
  };
  auto flush_record = [&] {
    flush_field();
    records.push_back({std::move(fields), record_start});
    fields.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty()) throw ParseError("quote inside an unquoted field", line);
        in_quotes = true;
        record_has_content = true;
        break;
      case ',':
        flush_field();
        record_has_content = true;
        break;
      case '\r':
        break;  // part of CRLF; the '\n' closes the record
      case '\n':
        if (record_has_content || !fields.empty() || !field.empty()) flush_record();
        ++line;
        record_start = line;
        break;
      default:
        field += ch;
        record_has_content = true;
        break;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", record_start);
  if (record_has_content || !fields.empty() || !field.empty()) flush_record();
  return records;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

std::string csv_row(std::span<const std::string> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += '\n';
  return out;
}

}  // namespace sitaware
