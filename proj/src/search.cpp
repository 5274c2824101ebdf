#include "sitaware/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "sitaware/errors.hpp"
#include "sitaware/numeric.hpp"
#include "sitaware/rng.hpp"

namespace sitaware::search {

namespace {

nn::NetConfig make_config(const prep::Dataset& data, const std::vector<int>& sizes,
                          const TrainParams& params, std::uint64_t seed) {
  nn::NetConfig config;
  config.n_inputs = static_cast<int>(data.cols());
  config.hidden_sizes = sizes;
  config.n_outputs = 1;
  config.threshold = params.threshold;
  config.step_max = params.step_max;
  config.seed = seed;
  return config;
}

// Best restart by (error, then steps); +inf error when every restart diverged.
ComparisonRow best_of_restarts(const prep::Dataset& data, const std::vector<int>& sizes,
                               int restarts, std::uint64_t candidate_seed,
                               const TrainParams& params) {
  ComparisonRow best{sizes, std::numeric_limits<double>::infinity(), 0, 0, false};
  bool have_run = false;
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t seed = mix_seed(candidate_seed, static_cast<std::uint64_t>(r));
    nn::TrainResult run;
    try {
      run = nn::train(make_config(data, sizes, params, seed), data);
    } catch (const DivergenceError&) {
      continue;
    }
    if (!have_run || run.error < best.error ||
        (run.error == best.error && run.steps < best.steps)) {
      best = {sizes, run.error, run.steps, seed, run.converged};
      have_run = true;
    }
  }
  return best;
}

bool lexicographic_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::string dataset_fingerprint(const prep::Dataset& data) {
  std::string bytes;
  for (const auto& name : data.feature_names) {
    bytes += name;
    bytes += '\x1f';
  }
  bytes += '\x1e';
  for (const auto& row : data.X)
    for (double v : row) {
      bytes += format_double(v);
      bytes += ',';
    }
  if (data.y) {
    bytes += '\x1e';
    bytes += data.target_name.value_or("Y");
    bytes += '\x1f';
    for (double v : *data.y) {
      bytes += format_double(v);
      bytes += ',';
    }
  }
  return fingerprint(bytes);
}

ComparisonTable compare_architectures(const prep::Dataset& data,
                                      std::span<const std::vector<int>> candidates,
                                      int restarts, std::uint64_t base_seed,
                                      const TrainParams& params) {
  if (candidates.empty()) throw SizeError("need at least one candidate architecture");
  if (restarts < 1) throw DomainError("restarts must be >= 1");
  ComparisonTable table;
  table.n_inputs = static_cast<int>(data.cols());
  table.n_outputs = 1;
  table.dataset_fingerprint = dataset_fingerprint(data);
  table.rows.reserve(candidates.size());
  for (std::size_t ci = 0; ci < candidates.size(); ++ci)
    table.rows.push_back(best_of_restarts(data, candidates[ci], restarts,
                                          mix_seed(base_seed, ci), params));
  return table;
}

long row_parameter_count(const ComparisonTable& table, const ComparisonRow& row) {
  nn::NetConfig config;
  config.n_inputs = table.n_inputs;
  config.hidden_sizes = row.hidden_sizes;
  config.n_outputs = table.n_outputs;
  return nn::parameter_count(config);
}

const ComparisonRow& select_best(const ComparisonTable& table) {
  if (table.rows.empty()) throw SizeError("comparison table is empty");
  const ComparisonRow* best = &table.rows.front();
  for (const auto& row : table.rows) {
    if (&row == best) continue;
    if (row.error != best->error) {
      if (row.error < best->error) best = &row;
      continue;
    }
    if (row.steps != best->steps) {
      if (row.steps < best->steps) best = &row;
      continue;
    }
    const long rp = row_parameter_count(table, row);
    const long bp = row_parameter_count(table, *best);
    if (rp != bp) {
      if (rp < bp) best = &row;
      continue;
    }
    // Full tie: smallest size vector, so the choice never depends on row order.
    if (lexicographic_less(row.hidden_sizes, best->hidden_sizes)) best = &row;
  }
  return *best;
}

RefineResult stepwise_refine(const prep::Dataset& data, int depth,
                             std::span<const int> size_grid, std::uint64_t base_seed,
                             const TrainParams& params, int restarts) {
  if (depth < 1) throw DomainError("depth must be >= 1");
  if (size_grid.empty()) throw SizeError("size grid is empty");
  if (restarts < 1) throw DomainError("restarts must be >= 1");
  for (int g : size_grid)
    if (g < 1) throw DomainError("grid sizes must be >= 1");

  // Depth-2 anchor (10, 5), truncated or extended by repeating the last
  // entry, then snapped to the nearest grid value so the incumbent always
  // sits on the grid.
  static constexpr int kAnchor[] = {10, 5};
  std::vector<int> incumbent(static_cast<std::size_t>(depth));
  for (int l = 0; l < depth; ++l) {
    const int want = kAnchor[std::min<std::size_t>(static_cast<std::size_t>(l),
                                                   std::size(kAnchor) - 1)];
    int nearest = size_grid[0];
    for (int g : size_grid) {
      const int dg = std::abs(g - want);
      const int dn = std::abs(nearest - want);
      if (dg < dn || (dg == dn && g < nearest)) nearest = g;
    }
    incumbent[static_cast<std::size_t>(l)] = nearest;
  }

  RefineResult result;
  // Cache scored size vectors across stages; the incumbent re-enters the next
  // stage with its recorded row, which keeps the winning error non-increasing.
  std::map<std::vector<int>, ComparisonRow> scored;
  const std::string fp = dataset_fingerprint(data);

  for (int l = 0; l < depth; ++l) {
    ComparisonTable stage;
    stage.n_inputs = static_cast<int>(data.cols());
    stage.n_outputs = 1;
    stage.dataset_fingerprint = fp;
    const std::uint64_t stage_seed = mix_seed(base_seed, static_cast<std::uint64_t>(l));
    for (std::size_t gi = 0; gi < size_grid.size(); ++gi) {
      std::vector<int> sizes = incumbent;
      sizes[static_cast<std::size_t>(l)] = size_grid[gi];
      auto it = scored.find(sizes);
      if (it == scored.end())
        it = scored.emplace(sizes, best_of_restarts(data, sizes, restarts,
                                                    mix_seed(stage_seed, gi), params))
                 .first;
      stage.rows.push_back(it->second);
    }
    const ComparisonRow& winner = select_best(stage);
    incumbent[static_cast<std::size_t>(l)] = winner.hidden_sizes[static_cast<std::size_t>(l)];
    result.trace.push_back(std::move(stage));
  }
  result.best_sizes = incumbent;
  return result;
}

nlohmann::ordered_json to_json(const ComparisonTable& table) {
  nlohmann::ordered_json j;
  j["n_inputs"] = table.n_inputs;
  j["n_outputs"] = table.n_outputs;
  j["dataset_fingerprint"] = table.dataset_fingerprint;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    r["hidden_sizes"] = row.hidden_sizes;
    if (std::isfinite(row.error)) r["error"] = row.error;
    else r["error"] = nullptr;  // failed candidate
    r["steps"] = row.steps;
    r["seed_used"] = row.seed_used;
    r["converged"] = row.converged;
    rows.push_back(std::move(r));
  }
  return j;
}

ComparisonTable comparison_from_json(const nlohmann::ordered_json& j) {
  ComparisonTable table;
  table.n_inputs = j.at("n_inputs").get<int>();
  table.n_outputs = j.at("n_outputs").get<int>();
  table.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
  for (const auto& r : j.at("rows")) {
    ComparisonRow row;
    row.hidden_sizes = r.at("hidden_sizes").get<std::vector<int>>();
    row.error = r.at("error").is_null() ? std::numeric_limits<double>::infinity()
                                        : r.at("error").get<double>();
    row.steps = r.at("steps").get<long>();
    row.seed_used = r.at("seed_used").get<std::uint64_t>();
    row.converged = r.at("converged").get<bool>();
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string render_text(const ComparisonTable& table) {
  std::vector<std::array<std::string, 5>> cells;
  cells.push_back({"Model", "Hidden layers", "Neurons per layer", "Error", "Steps"});
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    std::string sizes;
    for (std::size_t s = 0; s < row.hidden_sizes.size(); ++s) {
      if (s) sizes += ", ";
      sizes += std::to_string(row.hidden_sizes[s]);
    }
    if (sizes.empty()) sizes = "-";
    std::string error = "failed";
    if (std::isfinite(row.error)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", row.error);
      error = buf;
    }
    cells.push_back({"M" + std::to_string(i + 1), std::to_string(row.hidden_sizes.size()),
                     sizes, error, std::to_string(row.steps)});
  }

  std::array<std::size_t, 5> width{};
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out.append(width[c] - row[c].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace sitaware::search
