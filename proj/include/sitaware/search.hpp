#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sitaware/nn.hpp"

namespace sitaware::search {

struct TrainParams {
  double threshold = 0.01;
  long step_max = 100000;
};

struct ComparisonRow {
  std::vector<int> hidden_sizes;
  double error = 0.0;  // best over restarts; +inf marks a candidate whose every restart diverged
  long steps = 0;      // steps of that same best restart
  std::uint64_t seed_used = 0;
  bool converged = false;
};

struct ComparisonTable {
  int n_inputs = 0;
  int n_outputs = 1;
  std::string dataset_fingerprint;
  std::vector<ComparisonRow> rows;
};

std::string dataset_fingerprint(const prep::Dataset& data);

// Trains every candidate `restarts` times with per-run seed
// mix_seed(base_seed, candidate_index, restart_index) and keeps each
// candidate's best restart by (error, then steps). Rows stay in candidate
// order; the whole table is a pure function of its inputs.
ComparisonTable compare_architectures(const prep::Dataset& data,
                                      std::span<const std::vector<int>> candidates,
                                      int restarts, std::uint64_t base_seed,
                                      const TrainParams& params = {});

long row_parameter_count(const ComparisonTable& table, const ComparisonRow& row);

// Lexicographic minimum by (error, steps, parameter count, sizes); invariant
// under row permutation.
const ComparisonRow& select_best(const ComparisonTable& table);

struct RefineResult {
  std::vector<int> best_sizes;
  std::vector<ComparisonTable> trace;  // one table per refined layer
};

// Coordinate descent over layer sizes starting from the (10, 5) anchor
// (truncated or extended to `depth`, snapped onto the grid). Already-scored
// size vectors are reused across stages, so the winning error per stage is
// non-increasing.
RefineResult stepwise_refine(const prep::Dataset& data, int depth,
                             std::span<const int> size_grid, std::uint64_t base_seed,
                             const TrainParams& params = {}, int restarts = 10);

nlohmann::ordered_json to_json(const ComparisonTable& table);
ComparisonTable comparison_from_json(const nlohmann::ordered_json& j);

// Aligned text table: model, hidden-layer count, sizes, error, steps.
std::string render_text(const ComparisonTable& table);

}  // namespace sitaware::search
