#pragma once

#include <vector>

#include <json.hpp>

#include "sitaware/ingest.hpp"

namespace sitaware::score {

// Linear situation score bias + sum_j omega_j * a_j over the row-major
// flattened 5x5 parameter matrix.
struct SituationWeights {
  std::vector<double> omega;  // exactly 25 entries, row-major
  double bias = 0.0;
};

double situation_score(const ingest::ParameterMatrix& matrix, const SituationWeights& weights);

// One least-mean-squares step on the score residual against `target`;
// returns the corrected weights, the input stays untouched.
SituationWeights feedback_update(const SituationWeights& weights,
                                 const ingest::ParameterMatrix& matrix, double target,
                                 double rate);

nlohmann::ordered_json to_json(const SituationWeights& weights);
SituationWeights weights_from_json(const nlohmann::ordered_json& j);

}  // namespace sitaware::score
