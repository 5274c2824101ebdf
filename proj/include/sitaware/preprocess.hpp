#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sitaware/ingest.hpp"

namespace sitaware::prep {

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> X;  // n rows by p features
  std::optional<std::vector<double>> y;
  std::optional<std::string> target_name;

  std::size_t rows() const { return X.size(); }
  std::size_t cols() const { return feature_names.size(); }

  bool operator==(const Dataset&) const = default;
};

// Invertible per-column [0,1] transform. Fitted over the features and, when
// present, the target as a trailing extra column.
struct Scaler {
  struct Column {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    bool constant = false;  // min == max; such columns map to 0.0
  };
  std::vector<Column> columns;
  bool has_target = false;

  std::size_t feature_count() const { return columns.size() - (has_target ? 1 : 0); }
};

Scaler minmax_fit(const Dataset& data);

// x' = (x - min) / (max - min); constant columns map to 0.0. Values outside
// the fitted range follow the same affine rule and may leave [0,1] — they are
// not clipped, so the inverse transform stays exact.
Dataset minmax_apply(const Scaler& scaler, const Dataset& data);
Dataset minmax_invert(const Scaler& scaler, const Dataset& data);

// Appends the virtual regression target clamp_[0,1](sum_j c_j x_ij + eps_i)
// with eps ~ N(0, noise_sd^2) from a seeded generator. Expects features
// already normalized to [0,1].
Dataset synthesize_target(const Dataset& data, std::span<const double> coefficients,
                          double noise_sd, std::uint64_t seed, std::string target_name = "Y");

Dataset dataset_from_report_table(const ingest::ReportTable& table);

// Plain CSV with a header of feature names (target last when present).
std::string to_csv(const Dataset& data);
Dataset dataset_from_csv(std::string_view text,
                         std::optional<std::string> target_column = std::nullopt);

nlohmann::ordered_json to_json(const Dataset& data);
Dataset dataset_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const Scaler& scaler);
Scaler scaler_from_json(const nlohmann::ordered_json& j);

inline constexpr double kDefaultNoiseSd = 0.01;
inline constexpr std::array<double, 4> kDefaultTargetCoefficients{0.4, 0.1, 0.4, 0.1};

}  // namespace sitaware::prep
