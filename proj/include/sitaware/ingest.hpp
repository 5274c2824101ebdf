#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sitaware::ingest {

// One source's report: counts per indicator, in the table's column order.
struct SourceReport {
  std::string source_id;
  int year = 0;
  std::vector<std::pair<std::string, std::int64_t>> values;

  bool operator==(const SourceReport&) const = default;
};

struct ReportTable {
  std::vector<std::string> columns;
  std::vector<SourceReport> rows;

  bool has_column(std::string_view name) const;

  // Counts of one indicator as reals, in row order. Downstream analysis works
  // on doubles; this is the integer-to-real boundary.
  std::vector<double> column_as_reals(std::string_view name) const;

  bool operator==(const ReportTable&) const = default;
};

struct Violation {
  int row = -1;     // -1 = table level
  int column = -1;  // -1 = row level
  std::string message;

  std::string to_string() const;
};

// Expects a header `source,year,<indicator...>`. Throws ParseError on broken
// CSV, SchemaError on a bad header, ValidationError when the parsed table
// breaks an invariant (negative count, k < 2, ...).
ReportTable parse_report_table(std::string_view csv_text);

// Pure check; returns every invariant violation with row/column coordinates.
std::vector<Violation> validate(const ReportTable& table);

std::string to_csv(const ReportTable& table);
nlohmann::ordered_json to_json(const ReportTable& table);
ReportTable table_from_json(const nlohmann::ordered_json& j);

// 5x5 matrix of situation factors with first- and second-level labels.
struct ParameterMatrix {
  std::array<std::array<double, 5>, 5> entries{};
  std::array<std::string, 5> factor_labels{};
  std::array<std::array<std::string, 5>, 5> subfactor_labels{};

  bool operator==(const ParameterMatrix&) const = default;
};

ParameterMatrix parameter_matrix_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const ParameterMatrix& matrix);

}  // namespace sitaware::ingest
