#include "sitaware/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "sitaware/csv.hpp"
#include "sitaware/errors.hpp"
#include "sitaware/numeric.hpp"
#include "sitaware/rng.hpp"

namespace sitaware::prep {

namespace {

void check_rectangular(const Dataset& data) {
  for (std::size_t i = 0; i < data.rows(); ++i)
    if (data.X[i].size() != data.cols())
      throw ShapeError("row " + std::to_string(i) + " has " + std::to_string(data.X[i].size()) +
                       " values, expected " + std::to_string(data.cols()));
  if (data.y && data.y->size() != data.rows())
    throw ShapeError("target length " + std::to_string(data.y->size()) +
                     " does not match row count " + std::to_string(data.rows()));
}

Scaler::Column fit_column(std::string name, const Dataset& data, std::size_t col, bool target) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double v = target ? (*data.y)[i] : data.X[i][col];
    if (!std::isfinite(v))
      throw DomainError("non-finite value in column '" + name + "', row " + std::to_string(i));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {std::move(name), lo, hi, lo == hi};
}

double apply_one(const Scaler::Column& col, double v) {
  return col.constant ? 0.0 : (v - col.min) / (col.max - col.min);
}

double invert_one(const Scaler::Column& col, double v) {
  return v * (col.max - col.min) + col.min;  // constant columns collapse to min
}

void check_shapes(const Scaler& scaler, const Dataset& data) {
  if (data.cols() != scaler.feature_count())
    throw ShapeError("dataset has " + std::to_string(data.cols()) +
                     " feature columns, scaler was fitted on " +
                     std::to_string(scaler.feature_count()));
  if (data.y && !scaler.has_target)
    throw ShapeError("dataset carries a target but the scaler was fitted without one");
}

double parse_real(const std::string& text, int line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last)
    throw ParseError("'" + text + "' is not a number", line);
  return value;
}

}  // namespace

Scaler minmax_fit(const Dataset& data) {
  if (data.rows() == 0) throw SizeError("cannot fit a scaler on an empty dataset");
  check_rectangular(data);
  Scaler scaler;
  scaler.columns.reserve(data.cols() + (data.y ? 1 : 0));
  for (std::size_t c = 0; c < data.cols(); ++c)
    scaler.columns.push_back(fit_column(data.feature_names[c], data, c, false));
  if (data.y) {
    scaler.columns.push_back(fit_column(data.target_name.value_or("Y"), data, 0, true));
    scaler.has_target = true;
  }
  return scaler;
}

Dataset minmax_apply(const Scaler& scaler, const Dataset& data) {
  check_rectangular(data);
  check_shapes(scaler, data);
  Dataset out = data;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out.X[i][c] = apply_one(scaler.columns[c], out.X[i][c]);
  if (out.y) {
    const auto& col = scaler.columns[scaler.feature_count()];
    for (double& v : *out.y) v = apply_one(col, v);
  }
  return out;
}

Dataset minmax_invert(const Scaler& scaler, const Dataset& data) {
  check_rectangular(data);
  check_shapes(scaler, data);
  Dataset out = data;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out.X[i][c] = invert_one(scaler.columns[c], out.X[i][c]);
  if (out.y) {
    const auto& col = scaler.columns[scaler.feature_count()];
    for (double& v : *out.y) v = invert_one(col, v);
  }
  return out;
}

Dataset synthesize_target(const Dataset& data, std::span<const double> coefficients,
                          double noise_sd, std::uint64_t seed, std::string target_name) {
  check_rectangular(data);
  if (coefficients.size() != data.cols())
    throw ShapeError("got " + std::to_string(coefficients.size()) + " coefficients for " +
                     std::to_string(data.cols()) + " feature columns");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
    throw DomainError("noise_sd must be finite and >= 0");

  Dataset out = data;
  std::vector<double> target(data.rows());
  SeededRng rng(seed);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double value = 0.0;
    for (std::size_t c = 0; c < data.cols(); ++c) value += coefficients[c] * data.X[i][c];
    if (noise_sd > 0.0) value += noise_sd * rng.normal();
    target[i] = std::clamp(value, 0.0, 1.0);
  }
  out.y = std::move(target);
  out.target_name = std::move(target_name);
  return out;
}

Dataset dataset_from_report_table(const ingest::ReportTable& table) {
  Dataset data;
  data.feature_names = table.columns;
  data.X.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::vector<double> x;
    x.reserve(row.values.size());
    for (const auto& [name, count] : row.values) x.push_back(static_cast<double>(count));
    data.X.push_back(std::move(x));
  }
  return data;
}

std::string to_csv(const Dataset& data) {
  check_rectangular(data);
  std::vector<std::string> header = data.feature_names;
  if (data.y) header.push_back(data.target_name.value_or("Y"));
  std::string out = csv_row(header);
  std::vector<std::string> fields;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    fields.clear();
    for (double v : data.X[i]) fields.push_back(format_double(v));
    if (data.y) fields.push_back(format_double((*data.y)[i]));
    out += csv_row(fields);
  }
  return out;
}

Dataset dataset_from_csv(std::string_view text, std::optional<std::string> target_column) {
  const auto records = parse_csv(text);
  if (records.empty()) throw ParseError("empty input: expected a header row", 1);
  const auto& header = records.front().fields;
  {
    std::set<std::string> seen;
    for (const auto& name : header)
      if (!seen.insert(name).second) throw SchemaError("duplicate column in header: " + name);
  }

  std::size_t target_idx = header.size();
  if (target_column) {
    const auto it = std::find(header.begin(), header.end(), *target_column);
    if (it == header.end()) throw SchemaError("no such target column: " + *target_column);
    target_idx = static_cast<std::size_t>(it - header.begin());
  }

  Dataset data;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != target_idx) data.feature_names.push_back(header[c]);
  if (target_column) {
    data.target_name = *target_column;
    data.y.emplace();
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(rec.fields.size()),
                       rec.line);
    std::vector<double> x;
    x.reserve(data.feature_names.size());
    for (std::size_t c = 0; c < rec.fields.size(); ++c) {
      const double v = parse_real(rec.fields[c], rec.line);
      if (c == target_idx) data.y->push_back(v);
      else x.push_back(v);
    }
    data.X.push_back(std::move(x));
  }
  return data;
}

nlohmann::ordered_json to_json(const Dataset& data) {
  nlohmann::ordered_json j;
  j["feature_names"] = data.feature_names;
  j["X"] = data.X;
  if (data.y) j["y"] = *data.y;
  else j["y"] = nullptr;
  if (data.target_name) j["target_name"] = *data.target_name;
  else j["target_name"] = nullptr;
  return j;
}

Dataset dataset_from_json(const nlohmann::ordered_json& j) {
  Dataset data;
  data.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  data.X = j.at("X").get<std::vector<std::vector<double>>>();
  if (j.contains("y") && !j.at("y").is_null()) data.y = j.at("y").get<std::vector<double>>();
  if (j.contains("target_name") && !j.at("target_name").is_null())
    data.target_name = j.at("target_name").get<std::string>();
  check_rectangular(data);
  return data;
}

nlohmann::ordered_json to_json(const Scaler& scaler) {
  nlohmann::ordered_json j;
  auto& columns = j["columns"] = nlohmann::ordered_json::array();
  for (const auto& col : scaler.columns) {
    nlohmann::ordered_json c;
    c["name"] = col.name;
    c["min"] = col.min;
    c["max"] = col.max;
    c["constant"] = col.constant;
    columns.push_back(std::move(c));
  }
  j["has_target"] = scaler.has_target;
  return j;
}

Scaler scaler_from_json(const nlohmann::ordered_json& j) {
  Scaler scaler;
  for (const auto& c : j.at("columns"))
    scaler.columns.push_back({c.at("name").get<std::string>(), c.at("min").get<double>(),
                              c.at("max").get<double>(), c.at("constant").get<bool>()});
  scaler.has_target = j.value("has_target", false);
  return scaler;
}

}  // namespace sitaware::prep
