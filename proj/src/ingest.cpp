#include "sitaware/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "sitaware/csv.hpp"
#include "sitaware/errors.hpp"

namespace sitaware::ingest {

namespace {

std::int64_t parse_count(const std::string& text, int line, const std::string& what) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last)
    throw ParseError(what + " is not an integer: '" + text + "'", line);
  return value;
}

std::vector<std::string> render(const std::vector<Violation>& violations) {
  std::vector<std::string> out;
  out.reserve(violations.size());
  for (const auto& v : violations) out.push_back(v.to_string());
  return out;
}

}  // namespace

bool ReportTable::has_column(std::string_view name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> ReportTable::column_as_reals(std::string_view name) const {
  if (!has_column(name)) throw SchemaError("no such indicator column: " + std::string(name));
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const auto it = std::find_if(row.values.begin(), row.values.end(),
                                 [&](const auto& kv) { return kv.first == name; });
    if (it == row.values.end())
      throw SchemaError("row '" + row.source_id + "' has no value for " + std::string(name));
    out.push_back(static_cast<double>(it->second));
  }
  return out;
}

std::string Violation::to_string() const {
  std::string where = "table";
  if (row >= 0) {
    where = "row " + std::to_string(row);
    if (column >= 0) where += ", column " + std::to_string(column);
  } else if (column >= 0) {
    where = "header column " + std::to_string(column);
  }
  return where + ": " + message;
}

ReportTable parse_report_table(std::string_view csv_text) {
  const auto records = parse_csv(csv_text);
  if (records.empty()) throw ParseError("empty input: expected a header row", 1);

  const auto& header = records.front();
  if (header.fields.size() < 3 || header.fields[0] != "source" || header.fields[1] != "year")
    throw SchemaError("header must be 'source,year,<indicator...>'");

  ReportTable table;
  table.columns.assign(header.fields.begin() + 2, header.fields.end());
  {
    std::set<std::string> seen;
    for (const auto& name : table.columns)
      if (!seen.insert(name).second)
        throw SchemaError("duplicate indicator in header: " + name);
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.fields.size())
      throw ParseError("expected " + std::to_string(header.fields.size()) + " fields, got " +
                           std::to_string(rec.fields.size()),
                       rec.line);
    SourceReport report;
    report.source_id = rec.fields[0];
    report.year =
        static_cast<int>(parse_count(rec.fields[1], rec.line, "year"));
    report.values.reserve(table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      report.values.emplace_back(
          table.columns[c],
          parse_count(rec.fields[2 + c], rec.line, "count '" + table.columns[c] + "'"));
    table.rows.push_back(std::move(report));
  }

  if (auto violations = validate(table); !violations.empty())
    throw ValidationError(render(violations));
  return table;
}

std::vector<Violation> validate(const ReportTable& table) {
  std::vector<Violation> out;

  if (table.rows.size() < 2)
    out.push_back({-1, -1,
                   "k < 2: meta-analysis needs at least 2 rows, got " +
                       std::to_string(table.rows.size())});
  {
    std::set<std::string> seen;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (table.columns[c].empty())
        out.push_back({-1, static_cast<int>(c), "indicator name is empty"});
      if (!seen.insert(table.columns[c]).second)
        out.push_back({-1, static_cast<int>(c),
                       "duplicate indicator column '" + table.columns[c] + "'"});
    }
  }

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.year < 1900 || row.year > 2100)
      out.push_back({static_cast<int>(r), -1,
                     "year " + std::to_string(row.year) + " outside [1900, 2100]"});
    if (row.values.size() != table.columns.size())
      out.push_back({static_cast<int>(r), -1,
                     "row carries " + std::to_string(row.values.size()) +
                         " values, table declares " + std::to_string(table.columns.size()) +
                         " columns"});
    std::set<std::string> names;
    for (std::size_t c = 0; c < row.values.size(); ++c) {
      const auto& [name, count] = row.values[c];
      if (c < table.columns.size() && name != table.columns[c])
        out.push_back({static_cast<int>(r), static_cast<int>(c),
                       "indicator '" + name + "' does not match declared column '" +
                           table.columns[c] + "'"});
      if (!names.insert(name).second)
        out.push_back({static_cast<int>(r), static_cast<int>(c),
                       "duplicate indicator '" + name + "' within one report"});
      if (count < 0)
        out.push_back({static_cast<int>(r), static_cast<int>(c),
                       "count for '" + name + "' is negative (" + std::to_string(count) + ")"});
    }
  }
  return out;
}

std::string to_csv(const ReportTable& table) {
  std::vector<std::string> header = {"source", "year"};
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  std::string out = csv_row(header);
  for (const auto& row : table.rows) {
    std::vector<std::string> fields = {row.source_id, std::to_string(row.year)};
    for (const auto& [name, count] : row.values) fields.push_back(std::to_string(count));
    out += csv_row(fields);
  }
  return out;
}

nlohmann::ordered_json to_json(const ReportTable& table) {
  nlohmann::ordered_json j;
  j["columns"] = table.columns;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    r["source"] = row.source_id;
    r["year"] = row.year;
    auto& values = r["values"] = nlohmann::ordered_json::object();
    for (const auto& [name, count] : row.values) values[name] = count;
    rows.push_back(std::move(r));
  }
  return j;
}

ReportTable table_from_json(const nlohmann::ordered_json& j) {
  if (!j.contains("columns") || !j.contains("rows"))
    throw SchemaError("report table JSON needs 'columns' and 'rows'");
  ReportTable table;
  table.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows")) {
    SourceReport report;
    report.source_id = r.at("source").get<std::string>();
    report.year = r.at("year").get<int>();
    const auto& values = r.at("values");
    for (const auto& name : table.columns) {
      if (!values.contains(name))
        throw SchemaError("row '" + report.source_id + "' lacks a value for " + name);
      report.values.emplace_back(name, values.at(name).get<std::int64_t>());
    }
    table.rows.push_back(std::move(report));
  }
  return table;
}

ParameterMatrix parameter_matrix_from_json(const nlohmann::ordered_json& j) {
  for (const char* key : {"factor_labels", "subfactor_labels", "entries"})
    if (!j.contains(key)) throw SchemaError(std::string("parameter matrix JSON lacks '") + key + "'");

  const auto& factors = j.at("factor_labels");
  const auto& subfactors = j.at("subfactor_labels");
  const auto& entries = j.at("entries");
  if (factors.size() != 5 || subfactors.size() != 5 || entries.size() != 5)
    throw SchemaError("parameter matrix must be exactly 5x5 with 5 factor labels");

  ParameterMatrix matrix;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < 5; ++r) {
    matrix.factor_labels[r] = factors.at(r).get<std::string>();
    if (matrix.factor_labels[r].empty())
      problems.push_back("factor label " + std::to_string(r) + " is empty");
    if (!seen.insert(matrix.factor_labels[r]).second)
      problems.push_back("duplicate factor label '" + matrix.factor_labels[r] + "'");
    if (subfactors.at(r).size() != 5 || entries.at(r).size() != 5)
      throw SchemaError("parameter matrix row " + std::to_string(r) + " is not length 5");
    for (std::size_t c = 0; c < 5; ++c) {
      matrix.subfactor_labels[r][c] = subfactors.at(r).at(c).get<std::string>();
      if (matrix.subfactor_labels[r][c].empty())
        problems.push_back("subfactor label (" + std::to_string(r) + "," + std::to_string(c) +
                           ") is empty");
      matrix.entries[r][c] = entries.at(r).at(c).get<double>();
      if (!std::isfinite(matrix.entries[r][c]))
        problems.push_back("entry (" + std::to_string(r) + "," + std::to_string(c) +
                           ") is not finite");
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return matrix;
}

nlohmann::ordered_json to_json(const ParameterMatrix& matrix) {
  nlohmann::ordered_json j;
  j["factor_labels"] = matrix.factor_labels;
  j["subfactor_labels"] = matrix.subfactor_labels;
  j["entries"] = matrix.entries;
  return j;
}

}  // namespace sitaware::ingest
