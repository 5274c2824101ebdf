#include "sitaware/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sitaware/errors.hpp"
#include "sitaware/rng.hpp"

namespace sitaware::nn {

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Sums terms in ascending value order. Float addition is commutative but not
// associative, so a canonical order makes mathematically equivalent networks
// (e.g. with permuted hidden neurons) produce identical outputs.
double canonical_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

struct Trace {
  // activations[0] is the input row; activations.back() is the output.
  std::vector<std::vector<double>> activations;
};

void forward_into(const Network& net, std::span<const double> x, Trace& trace,
                  std::vector<double>& terms) {
  const std::size_t n_layers = net.layers.size();
  trace.activations.resize(n_layers + 1);
  trace.activations[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const LayerMatrix& m = net.layers[l];
    const std::size_t fan_in = m.size() - 1;
    const std::size_t fan_out = m[0].size();
    const auto& in = trace.activations[l];
    auto& out = trace.activations[l + 1];
    out.resize(fan_out);
    const bool linear = (l + 1 == n_layers) && net.config.output_linear;
    for (std::size_t j = 0; j < fan_out; ++j) {
      terms.clear();
      terms.push_back(m[0][j]);
      for (std::size_t i = 0; i < fan_in; ++i) terms.push_back(m[i + 1][j] * in[i]);
      const double t = canonical_sum(terms);
      out[j] = linear ? t : logistic(t);
    }
  }
}

std::vector<std::pair<int, int>> layer_shapes(const NetConfig& config) {
  std::vector<std::pair<int, int>> shapes;  // (fan_in, fan_out)
  int fan_in = config.n_inputs;
  for (int h : config.hidden_sizes) {
    shapes.emplace_back(fan_in, h);
    fan_in = h;
  }
  shapes.emplace_back(fan_in, config.n_outputs);
  return shapes;
}

// Shape and target checks shared by loss, gradients and train.
const std::vector<double>& training_target(const NetConfig& config, const prep::Dataset& data) {
  if (!data.y) throw InputError("dataset has no target column");
  if (config.n_outputs != 1)
    throw ShapeError("dataset provides one target column; network has " +
                     std::to_string(config.n_outputs) + " outputs");
  if (static_cast<int>(data.cols()) != config.n_inputs)
    throw ShapeError("dataset has " + std::to_string(data.cols()) +
                     " feature columns, network expects " + std::to_string(config.n_inputs));
  if (data.y->size() != data.rows())
    throw ShapeError("target length does not match row count");
  return *data.y;
}

double max_abs(const std::vector<LayerMatrix>& grad) {
  double out = 0.0;
  for (const auto& layer : grad)
    for (const auto& row : layer)
      for (double g : row) out = std::max(out, std::abs(g));
  return out;
}

}  // namespace

void validate_config(const NetConfig& config) {
  if (config.n_inputs < 1) throw DomainError("n_inputs must be >= 1");
  if (config.n_outputs < 1) throw DomainError("n_outputs must be >= 1");
  for (int h : config.hidden_sizes)
    if (h < 1) throw DomainError("hidden layer sizes must be >= 1");
  if (!(config.threshold > 0.0)) throw DomainError("threshold must be > 0");
  if (config.step_max < 1) throw DomainError("step_max must be >= 1");
  if (config.algorithm == Algorithm::gradient_descent && !(config.learning_rate > 0.0))
    throw DomainError("learning_rate must be > 0");
}

long parameter_count(const NetConfig& config) {
  validate_config(config);
  long count = 0;
  for (const auto& [fan_in, fan_out] : layer_shapes(config))
    count += static_cast<long>(fan_in + 1) * fan_out;
  return count;
}

Network init_network(const NetConfig& config) {
  validate_config(config);
  Network net{config, {}};
  SeededRng rng(config.seed);
  // Drawn in result-matrix order: per layer, per destination, intercept first.
  for (const auto& [fan_in, fan_out] : layer_shapes(config)) {
    LayerMatrix m(static_cast<std::size_t>(fan_in) + 1,
                  std::vector<double>(static_cast<std::size_t>(fan_out)));
    for (int j = 0; j < fan_out; ++j)
      for (int i = 0; i <= fan_in; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.normal();
    net.layers.push_back(std::move(m));
  }
  return net;
}

std::vector<double> forward(const Network& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.config.n_inputs)
    throw ShapeError("input length " + std::to_string(x.size()) + " does not match n_inputs " +
                     std::to_string(net.config.n_inputs));
  Trace trace;
  std::vector<double> terms;
  forward_into(net, x, trace, terms);
  return trace.activations.back();
}

double loss_sse(const Network& net, const prep::Dataset& data) {
  const auto& y = training_target(net.config, data);
  Trace trace;
  std::vector<double> terms;
  double sse = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    forward_into(net, data.X[i], trace, terms);
    const double d = trace.activations.back()[0] - y[i];
    sse += d * d;
  }
  return 0.5 * sse;
}

std::vector<LayerMatrix> gradients(const Network& net, const prep::Dataset& data) {
  const auto& y = training_target(net.config, data);
  std::vector<LayerMatrix> grad;
  grad.reserve(net.layers.size());
  for (const auto& m : net.layers)
    grad.emplace_back(m.size(), std::vector<double>(m[0].size(), 0.0));

  const std::size_t n_layers = net.layers.size();
  Trace trace;
  std::vector<double> terms;
  std::vector<std::vector<double>> delta(n_layers);

  for (std::size_t obs = 0; obs < data.rows(); ++obs) {
    forward_into(net, data.X[obs], trace, terms);

    // dE/dt at the output head
    const double out = trace.activations[n_layers][0];
    double d = out - y[obs];
    if (!net.config.output_linear) d *= out * (1.0 - out);
    delta[n_layers - 1].assign(1, d);

    for (std::size_t l = n_layers - 1;; --l) {
      const auto& a_in = trace.activations[l];
      const auto& dl = delta[l];
      auto& g = grad[l];
      for (std::size_t j = 0; j < dl.size(); ++j) {
        g[0][j] += dl[j];
        for (std::size_t i = 0; i < a_in.size(); ++i) g[i + 1][j] += dl[j] * a_in[i];
      }
      if (l == 0) break;
      const LayerMatrix& m = net.layers[l];
      auto& dprev = delta[l - 1];
      dprev.assign(a_in.size(), 0.0);
      for (std::size_t i = 0; i < a_in.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < dl.size(); ++j) s += m[i + 1][j] * dl[j];
        dprev[i] = s * a_in[i] * (1.0 - a_in[i]);
      }
    }
  }
  return grad;
}

TrainResult train(const NetConfig& config, const prep::Dataset& data) {
  validate_config(config);
  training_target(config, data);

  Network net = init_network(config);

  constexpr double kGrow = 1.2;
  constexpr double kShrink = 0.5;
  constexpr double kStepInit = 0.1;
  constexpr double kStepMin = 1e-6;
  constexpr double kStepMax = 50.0;

  std::vector<LayerMatrix> step_size;
  std::vector<LayerMatrix> prev_grad;
  for (const auto& m : net.layers) {
    step_size.emplace_back(m.size(), std::vector<double>(m[0].size(), kStepInit));
    prev_grad.emplace_back(m.size(), std::vector<double>(m[0].size(), 0.0));
  }

  long steps_taken = 0;
  bool converged = false;
  double reached = std::numeric_limits<double>::infinity();

  for (long s = 1; s <= config.step_max; ++s) {
    steps_taken = s;
    const auto grad = gradients(net, data);
    reached = max_abs(grad);
    if (!std::isfinite(reached)) throw DivergenceError("gradient is not finite", s);
    if (reached < config.threshold) {
      converged = true;
      break;
    }
    if (s == config.step_max) break;  // budget spent; the last check describes these weights

    if (config.algorithm == Algorithm::rprop) {
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& weights = net.layers[l];
        for (std::size_t i = 0; i < weights.size(); ++i) {
          for (std::size_t j = 0; j < weights[i].size(); ++j) {
            double g = grad[l][i][j];
            double& step = step_size[l][i][j];
            double& prev = prev_grad[l][i][j];
            const double turn = prev * g;
            if (turn > 0.0) {
              step = std::min(step * kGrow, kStepMax);
            } else if (turn < 0.0) {
              // Sign flip: shrink the step and sit this update out.
              step = std::max(step * kShrink, kStepMin);
              g = 0.0;
            }
            if (g > 0.0) weights[i][j] -= step;
            else if (g < 0.0) weights[i][j] += step;
            prev = g;
          }
        }
      }
    } else {
      for (std::size_t l = 0; l < net.layers.size(); ++l)
        for (std::size_t i = 0; i < net.layers[l].size(); ++i)
          for (std::size_t j = 0; j < net.layers[l][i].size(); ++j)
            net.layers[l][i][j] -= config.learning_rate * grad[l][i][j];
    }
  }

  TrainResult result;
  result.error = loss_sse(net, data);
  if (!std::isfinite(result.error)) throw DivergenceError("loss is not finite", steps_taken);
  result.network = std::move(net);
  result.reached_threshold = reached;
  result.steps = steps_taken;
  result.converged = converged;
  return result;
}

GwMatrix generalized_weights(const Network& net, const prep::Dataset& data) {
  if (!net.config.output_linear || net.config.n_outputs != 1)
    throw UnsupportedModeError(
        "generalized weights are defined for single-output linear-head networks");
  if (static_cast<int>(data.cols()) != net.config.n_inputs)
    throw ShapeError("dataset has " + std::to_string(data.cols()) +
                     " feature columns, network expects " + std::to_string(net.config.n_inputs));

  const std::size_t n_layers = net.layers.size();
  GwMatrix gw(data.rows());
  Trace trace;
  std::vector<double> terms;
  std::vector<std::vector<double>> delta(n_layers);

  for (std::size_t obs = 0; obs < data.rows(); ++obs) {
    forward_into(net, data.X[obs], trace, terms);
    delta[n_layers - 1].assign(1, 1.0);  // d yhat / d t at the linear head
    for (std::size_t l = n_layers - 1;; --l) {
      const auto& a_in = trace.activations[l];
      const auto& dl = delta[l];
      const LayerMatrix& m = net.layers[l];
      std::vector<double> s(a_in.size(), 0.0);
      for (std::size_t i = 0; i < a_in.size(); ++i)
        for (std::size_t j = 0; j < dl.size(); ++j) s[i] += m[i + 1][j] * dl[j];
      if (l == 0) {
        gw[obs] = std::move(s);
        break;
      }
      auto& dprev = delta[l - 1];
      dprev.resize(a_in.size());
      for (std::size_t i = 0; i < a_in.size(); ++i) dprev[i] = s[i] * a_in[i] * (1.0 - a_in[i]);
    }
  }
  return gw;
}

std::vector<double> flat_weights(const Network& net) {
  std::vector<double> flat;
  for (const auto& m : net.layers) {
    const std::size_t fan_out = m[0].size();
    for (std::size_t j = 0; j < fan_out; ++j)
      for (std::size_t i = 0; i < m.size(); ++i) flat.push_back(m[i][j]);
  }
  return flat;
}

std::vector<double> result_matrix(const TrainResult& result) {
  std::vector<double> out = {result.error, result.reached_threshold,
                             static_cast<double>(result.steps)};
  const auto weights = flat_weights(result.network);
  out.insert(out.end(), weights.begin(), weights.end());
  return out;
}

Network network_from_flat(const NetConfig& config, std::span<const double> weights) {
  if (static_cast<long>(weights.size()) != parameter_count(config))
    throw ShapeError("got " + std::to_string(weights.size()) + " weights, architecture needs " +
                     std::to_string(parameter_count(config)));
  Network net{config, {}};
  std::size_t pos = 0;
  for (const auto& [fan_in, fan_out] : layer_shapes(config)) {
    LayerMatrix m(static_cast<std::size_t>(fan_in) + 1,
                  std::vector<double>(static_cast<std::size_t>(fan_out)));
    for (int j = 0; j < fan_out; ++j)
      for (int i = 0; i <= fan_in; ++i)
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = weights[pos++];
    net.layers.push_back(std::move(m));
  }
  return net;
}

nlohmann::ordered_json model_to_json(const TrainResult& result) {
  const NetConfig& config = result.network.config;
  nlohmann::ordered_json j;
  auto& c = j["config"] = nlohmann::ordered_json::object();
  c["n_inputs"] = config.n_inputs;
  c["hidden_sizes"] = config.hidden_sizes;
  c["n_outputs"] = config.n_outputs;
  c["output_linear"] = config.output_linear;
  c["threshold"] = config.threshold;
  c["step_max"] = config.step_max;
  c["seed"] = config.seed;
  c["algorithm"] = config.algorithm == Algorithm::rprop ? "rprop" : "gradient_descent";
  c["learning_rate"] = config.learning_rate;
  j["layers"] = result.network.layers;
  auto& stats = j["train_stats"] = nlohmann::ordered_json::object();
  stats["error"] = result.error;
  stats["reached_threshold"] = result.reached_threshold;
  stats["steps"] = result.steps;
  stats["converged"] = result.converged;
  stats["seed"] = config.seed;
  return j;
}

TrainResult model_from_json(const nlohmann::ordered_json& j) {
  const auto& c = j.at("config");
  NetConfig config;
  config.n_inputs = c.at("n_inputs").get<int>();
  config.hidden_sizes = c.at("hidden_sizes").get<std::vector<int>>();
  config.n_outputs = c.at("n_outputs").get<int>();
  config.output_linear = c.at("output_linear").get<bool>();
  config.threshold = c.at("threshold").get<double>();
  config.step_max = c.at("step_max").get<long>();
  config.seed = c.at("seed").get<std::uint64_t>();
  if (c.value("algorithm", "rprop") == std::string("gradient_descent"))
    config.algorithm = Algorithm::gradient_descent;
  config.learning_rate = c.value("learning_rate", 0.01);
  validate_config(config);

  TrainResult result;
  result.network.config = config;
  result.network.layers = j.at("layers").get<std::vector<LayerMatrix>>();

  const auto shapes = layer_shapes(config);
  if (result.network.layers.size() != shapes.size())
    throw ShapeError("model has " + std::to_string(result.network.layers.size()) +
                     " layers, config declares " + std::to_string(shapes.size()));
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto& m = result.network.layers[l];
    if (static_cast<int>(m.size()) != shapes[l].first + 1)
      throw ShapeError("layer " + std::to_string(l) + " row count mismatch");
    for (const auto& row : m)
      if (static_cast<int>(row.size()) != shapes[l].second)
        throw ShapeError("layer " + std::to_string(l) + " column count mismatch");
  }

  const auto& stats = j.at("train_stats");
  result.error = stats.at("error").get<double>();
  result.reached_threshold = stats.at("reached_threshold").get<double>();
  result.steps = stats.at("steps").get<long>();
  result.converged = stats.at("converged").get<bool>();
  return result;
}

}  // namespace sitaware::nn
