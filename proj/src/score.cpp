#include "sitaware/score.hpp"

#include <cmath>

#include "sitaware/errors.hpp"

namespace sitaware::score {

namespace {

void check_weights(const SituationWeights& weights) {
  if (weights.omega.size() != 25)
    throw ShapeError("omega must have exactly 25 entries, got " +
                     std::to_string(weights.omega.size()));
  if (!std::isfinite(weights.bias)) throw DomainError("bias is not finite");
  for (std::size_t i = 0; i < weights.omega.size(); ++i)
    if (!std::isfinite(weights.omega[i]))
      throw DomainError("omega[" + std::to_string(i) + "] is not finite");
}

}  // namespace

double situation_score(const ingest::ParameterMatrix& matrix, const SituationWeights& weights) {
  check_weights(weights);
  double score = weights.bias;
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      const double a = matrix.entries[r][c];
      if (!std::isfinite(a))
        throw DomainError("matrix entry (" + std::to_string(r) + "," + std::to_string(c) +
                          ") is not finite");
      score += weights.omega[r * 5 + c] * a;
    }
  return score;
}

SituationWeights feedback_update(const SituationWeights& weights,
                                 const ingest::ParameterMatrix& matrix, double target,
                                 double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("rate must be positive and finite");
  const double residual = situation_score(matrix, weights) - target;
  if (!std::isfinite(residual)) throw DomainError("score residual is not finite");

  SituationWeights updated = weights;
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c)
      updated.omega[r * 5 + c] -= rate * residual * matrix.entries[r][c];
  updated.bias -= rate * residual;
  return updated;
}

nlohmann::ordered_json to_json(const SituationWeights& weights) {
  nlohmann::ordered_json j;
  j["bias"] = weights.bias;
  j["omega"] = weights.omega;
  return j;
}

SituationWeights weights_from_json(const nlohmann::ordered_json& j) {
  SituationWeights weights;
  weights.bias = j.at("bias").get<double>();
  weights.omega = j.at("omega").get<std::vector<double>>();
  check_weights(weights);
  return weights;
}

}  // namespace sitaware::score
