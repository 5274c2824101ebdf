#include "sitaware/meta.hpp"

#include <algorithm>
#include <cmath>

#include "sitaware/errors.hpp"
#include "sitaware/numeric.hpp"

namespace sitaware::meta {

EffectEstimate effect_from_two_arm(std::int64_t arm_a, std::int64_t arm_b, std::string study_id) {
  if (arm_a <= 0 || arm_b <= 0)
    throw DomainError("two-arm effect needs strictly positive counts, got " +
                      std::to_string(arm_a) + " and " + std::to_string(arm_b));
  const double a = static_cast<double>(arm_a);
  const double b = static_cast<double>(arm_b);
  return {std::move(study_id), std::log(a / b), 1.0 / a + 1.0 / b};
}

EffectEstimate effect_from_single_source(double value, double bias_rate, int n_reports,
                                         std::string study_id) {
  if (!(value > 0.0) || !(bias_rate > 0.0) || n_reports < 1)
    throw DomainError("single-source effect needs value > 0, bias_rate > 0, n_reports >= 1");
  const double se = bias_rate * value / std::sqrt(static_cast<double>(n_reports));
  return {std::move(study_id), value, se * se};
}

PoolingResult pool(std::span<const EffectEstimate> estimates) {
  const std::size_t k = estimates.size();
  if (k < 2) throw SizeError("pooling needs k >= 2 studies, got " + std::to_string(k));
  for (const auto& e : estimates) {
    if (!std::isfinite(e.effect))
      throw DomainError("effect for '" + e.study_id + "' is not finite");
    if (!(e.variance > 0.0) || !std::isfinite(e.variance))
      throw DomainError("variance for '" + e.study_id + "' must be positive and finite");
  }

  PoolingResult r;
  r.df = static_cast<int>(k) - 1;

  std::vector<double> w(k);
  double sum_w = 0.0, sum_w2 = 0.0, sum_wt = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = 1.0 / estimates[i].variance;
    sum_w += w[i];
    sum_w2 += w[i] * w[i];
    sum_wt += w[i] * estimates[i].effect;
  }
  r.pooled_common = sum_wt / sum_w;
  r.se_common = 1.0 / std::sqrt(sum_w);

  double q = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = estimates[i].effect - r.pooled_common;
    q += w[i] * d * d;
  }
  r.Q = q;
  r.I2 = q > 0.0 ? std::max(0.0, (q - r.df) / q) : 0.0;

  // DerSimonian-Laird; the denominator is strictly positive for k >= 2.
  const double dl_denom = sum_w - sum_w2 / sum_w;
  r.tau2 = std::max(0.0, (q - r.df) / dl_denom);

  std::vector<double> ws(k);
  double sum_ws = 0.0, sum_wst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    ws[i] = 1.0 / (estimates[i].variance + r.tau2);
    sum_ws += ws[i];
    sum_wst += ws[i] * estimates[i].effect;
  }
  r.pooled_random = sum_wst / sum_ws;
  r.se_random = 1.0 / std::sqrt(sum_ws);

  r.weights_common.resize(k);
  r.weights_random.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    r.weights_common[i] = w[i] / sum_w;
    r.weights_random[i] = ws[i] / sum_ws;
  }

  r.z_common = r.pooled_common / r.se_common;
  r.p_common = two_sided_p(r.z_common);
  r.z_random = r.pooled_random / r.se_random;
  r.p_random = two_sided_p(r.z_random);
  return r;
}

std::vector<double> standardized_residuals(std::span<const EffectEstimate> estimates,
                                           const PoolingResult& result) {
  if (estimates.size() != result.weights_common.size())
    throw InputError("pooling result covers " + std::to_string(result.weights_common.size()) +
                     " studies, got " + std::to_string(estimates.size()) + " estimates");
  std::vector<double> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates)
    out.push_back((e.effect - result.pooled_common) / std::sqrt(e.variance));
  return out;
}

PlotData plot_data(std::span<const EffectEstimate> estimates, const PoolingResult& result,
                   double ci_level) {
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw DomainError("ci_level must lie in (0, 1)");
  if (estimates.size() != result.weights_common.size())
    throw InputError("pooling result does not match the estimate list");
  const double z = normal_quantile(0.5 * (1.0 + ci_level));

  PlotData plot;
  plot.ci_level = ci_level;
  plot.forest_rows.reserve(estimates.size() + 2);
  plot.funnel_points.reserve(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& e = estimates[i];
    const double se = std::sqrt(e.variance);
    plot.forest_rows.push_back({e.study_id, e.effect, e.effect - z * se, e.effect + z * se,
                                result.weights_common[i], result.weights_random[i], false});
    plot.funnel_points.push_back({e.study_id, e.effect, se});
  }
  plot.forest_rows.push_back({"common", result.pooled_common,
                              result.pooled_common - z * result.se_common,
                              result.pooled_common + z * result.se_common, 1.0, 0.0, true});
  plot.forest_rows.push_back({"random", result.pooled_random,
                              result.pooled_random - z * result.se_random,
                              result.pooled_random + z * result.se_random, 0.0, 1.0, true});
  plot.residuals = standardized_residuals(estimates, result);
  return plot;
}

FusionResult fuse_predictions(std::span<const double> predictions,
                              std::span<const double> variances) {
  if (predictions.empty()) throw SizeError("fuse_predictions needs at least one prediction");
  if (predictions.size() != variances.size())
    throw InputError("got " + std::to_string(predictions.size()) + " predictions and " +
                     std::to_string(variances.size()) + " variances");
  double sum_w = 0.0;
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("prediction variances must be positive and finite");
    sum_w += 1.0 / v;
  }
  FusionResult out;
  out.weights.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double wi = (1.0 / variances[i]) / sum_w;
    out.weights.push_back(wi);
    out.fused += wi * predictions[i];
  }
  return out;
}

nlohmann::ordered_json to_json(const PoolingResult& result) {
  nlohmann::ordered_json j;
  j["pooled_common"] = result.pooled_common;
  j["se_common"] = result.se_common;
  j["pooled_random"] = result.pooled_random;
  j["se_random"] = result.se_random;
  j["weights_common"] = result.weights_common;
  j["weights_random"] = result.weights_random;
  j["Q"] = result.Q;
  j["df"] = result.df;
  j["I2"] = result.I2;
  j["tau2"] = result.tau2;
  j["z_common"] = result.z_common;
  j["p_common"] = result.p_common;
  j["z_random"] = result.z_random;
  j["p_random"] = result.p_random;
  return j;
}

nlohmann::ordered_json to_json(const PlotData& plot) {
  nlohmann::ordered_json j;
  j["ci_level"] = plot.ci_level;
  auto& rows = j["forest_rows"] = nlohmann::ordered_json::array();
  for (const auto& row : plot.forest_rows) {
    nlohmann::ordered_json r;
    r["study_id"] = row.study_id;
    r["effect"] = row.effect;
    r["ci_low"] = row.ci_low;
    r["ci_high"] = row.ci_high;
    r["weight_common"] = row.weight_common;
    r["weight_random"] = row.weight_random;
    r["summary"] = row.summary;
    rows.push_back(std::move(r));
  }
  auto& points = j["funnel_points"] = nlohmann::ordered_json::array();
  for (const auto& point : plot.funnel_points) {
    nlohmann::ordered_json p;
    p["study_id"] = point.study_id;
    p["effect"] = point.effect;
    p["standard_error"] = point.standard_error;
    points.push_back(std::move(p));
  }
  j["residuals"] = plot.residuals;
  return j;
}

PlotData plot_data_from_json(const nlohmann::ordered_json& j) {
  PlotData plot;
  plot.ci_level = j.at("ci_level").get<double>();
  for (const auto& r : j.at("forest_rows"))
    plot.forest_rows.push_back({r.at("study_id").get<std::string>(), r.at("effect").get<double>(),
                                r.at("ci_low").get<double>(), r.at("ci_high").get<double>(),
                                r.at("weight_common").get<double>(),
                                r.at("weight_random").get<double>(), r.at("summary").get<bool>()});
  for (const auto& p : j.at("funnel_points"))
    plot.funnel_points.push_back({p.at("study_id").get<std::string>(),
                                  p.at("effect").get<double>(),
                                  p.at("standard_error").get<double>()});
  plot.residuals = j.at("residuals").get<std::vector<double>>();
  return plot;
}

nlohmann::ordered_json estimates_to_json(std::span<const EffectEstimate> estimates) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& e : estimates) {
    nlohmann::ordered_json item;
    item["study_id"] = e.study_id;
    item["effect"] = e.effect;
    item["variance"] = e.variance;
    j.push_back(std::move(item));
  }
  return j;
}

std::vector<EffectEstimate> estimates_from_json(const nlohmann::ordered_json& j) {
  std::vector<EffectEstimate> out;
  for (const auto& item : j)
    out.push_back({item.at("study_id").get<std::string>(), item.at("effect").get<double>(),
                   item.at("variance").get<double>()});
  return out;
}

}  // namespace sitaware::meta
