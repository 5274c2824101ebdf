#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "sitaware/preprocess.hpp"

namespace sitaware::nn {

enum class Algorithm {
  rprop,             // resilient propagation (default)
  gradient_descent,  // fixed-rate full-batch fallback for cross-checking
};

struct NetConfig {
  int n_inputs = 1;
  std::vector<int> hidden_sizes;  // logistic units; empty = linear model
  int n_outputs = 1;
  bool output_linear = true;  // affine head for regression, logistic otherwise
  double threshold = 0.01;    // stop once max |dE/dw| drops below this
  long step_max = 100000;
  std::uint64_t seed = 42;
  Algorithm algorithm = Algorithm::rprop;
  double learning_rate = 0.01;  // gradient_descent mode only
};

// Per layer: (fan_in + 1) x fan_out, row 0 holds the intercepts.
using LayerMatrix = std::vector<std::vector<double>>;

struct Network {
  NetConfig config;
  std::vector<LayerMatrix> layers;
};

struct TrainResult {
  Network network;
  double error = 0.0;              // final 1/2 * SSE
  double reached_threshold = 0.0;  // max |dE/dw| at the stopping point
  long steps = 1;
  bool converged = false;
};

// Per-observation input sensitivities d yhat / d x, rows x n_inputs.
using GwMatrix = std::vector<std::vector<double>>;

void validate_config(const NetConfig& config);
long parameter_count(const NetConfig& config);

// Weights and intercepts drawn N(0,1) from a generator seeded with
// config.seed; one seed gives a bit-identical network.
Network init_network(const NetConfig& config);

std::vector<double> forward(const Network& net, std::span<const double> x);

// E = 1/2 * sum_i (yhat_i - y_i)^2 over the dataset's target column.
double loss_sse(const Network& net, const prep::Dataset& data);

// Exact reverse-mode dE/dw, same shapes as net.layers.
std::vector<LayerMatrix> gradients(const Network& net, const prep::Dataset& data);

// Full-batch training from a seeded init. One step = one gradient evaluation;
// the threshold is checked before each update, so the reported
// reached_threshold always describes the returned network.
TrainResult train(const NetConfig& config, const prep::Dataset& data);

// Requires a single linear output unit.
GwMatrix generalized_weights(const Network& net, const prep::Dataset& data);

// [error, reached_threshold, steps, weights...]; weights run layer by layer,
// per destination neuron, intercept first. Length = 3 + parameter_count.
std::vector<double> result_matrix(const TrainResult& result);
std::vector<double> flat_weights(const Network& net);
Network network_from_flat(const NetConfig& config, std::span<const double> weights);

nlohmann::ordered_json model_to_json(const TrainResult& result);
TrainResult model_from_json(const nlohmann::ordered_json& j);

}  // namespace sitaware::nn
