#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace sitaware::meta {

// Per-study effect and its sampling variance, on a measure-specific scale.
struct EffectEstimate {
  std::string study_id;
  double effect = 0.0;    // theta_i
  double variance = 0.0;  // v_i, strictly positive
};

// Common-effect and random-effects pooling with heterogeneity statistics.
// Weight vectors are normalized to sum 1; Q uses the raw inverse-variance
// weights; tau2 is the DerSimonian-Laird moment estimate.
struct PoolingResult {
  double pooled_common = 0.0;
  double se_common = 0.0;
  double pooled_random = 0.0;
  double se_random = 0.0;
  std::vector<double> weights_common;
  std::vector<double> weights_random;
  double Q = 0.0;
  int df = 0;
  double I2 = 0.0;
  double tau2 = 0.0;
  double z_common = 0.0;
  double p_common = 1.0;
  double z_random = 0.0;
  double p_random = 1.0;
};

struct ForestRow {
  std::string study_id;
  double effect = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double weight_common = 0.0;
  double weight_random = 0.0;
  bool summary = false;
};

struct FunnelPoint {
  std::string study_id;
  double effect = 0.0;
  double standard_error = 0.0;
};

struct PlotData {
  // Per-study rows first, then the "common" and "random" summary rows.
  std::vector<ForestRow> forest_rows;
  std::vector<FunnelPoint> funnel_points;
  // Standardized against the common-effect summary, one per study.
  std::vector<double> residuals;
  double ci_level = 0.95;
};

// Log count ratio with Poisson-approximation variance 1/a + 1/b.
EffectEstimate effect_from_two_arm(std::int64_t arm_a, std::int64_t arm_b,
                                   std::string study_id = {});

// Reliability-scaled variance: se = bias_rate * value / sqrt(n_reports).
EffectEstimate effect_from_single_source(double value, double bias_rate, int n_reports,
                                         std::string study_id = {});

PoolingResult pool(std::span<const EffectEstimate> estimates);

// r_i = (theta_i - pooled_common) / sqrt(v_i)
std::vector<double> standardized_residuals(std::span<const EffectEstimate> estimates,
                                           const PoolingResult& result);

PlotData plot_data(std::span<const EffectEstimate> estimates, const PoolingResult& result,
                   double ci_level = 0.95);

struct FusionResult {
  double fused = 0.0;
  std::vector<double> weights;  // normalized inverse-variance weights
};

// Minimum-variance linear combination of independent unbiased predictions.
FusionResult fuse_predictions(std::span<const double> predictions,
                              std::span<const double> variances);

nlohmann::ordered_json to_json(const PoolingResult& result);
nlohmann::ordered_json to_json(const PlotData& plot);
PlotData plot_data_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json estimates_to_json(std::span<const EffectEstimate> estimates);
std::vector<EffectEstimate> estimates_from_json(const nlohmann::ordered_json& j);

}  // namespace sitaware::meta
