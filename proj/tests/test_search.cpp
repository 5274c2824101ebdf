#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "sitaware/errors.hpp"
#include "sitaware/rng.hpp"
#include "sitaware/search.hpp"

using namespace sitaware;
using search::ComparisonRow;
using search::ComparisonTable;
using search::TrainParams;

namespace {

// Short training budgets keep the suite quick; the fixture nets converge fast.
TrainParams quick() { return {0.01, 3000}; }

ComparisonTable table_one_literal() {
  // Reference depth comparison: errors 0.0043 / 0.0011 / 0.0087 and
  // steps 512 / 225 / 864 over architectures [5], [10,5], [4,5,3].
  ComparisonTable table;
  table.n_inputs = 4;
  table.n_outputs = 1;
  table.dataset_fingerprint = "fnv1a:0000000000000000";
  table.rows = {
      {{5}, 0.0043, 512, 1, true},
      {{10, 5}, 0.0011, 225, 2, true},
      {{4, 5, 3}, 0.0087, 864, 3, true},
  };
  return table;
}

}  // namespace

TEST_CASE("compare_architectures") {
  const auto data = fixtures::modeling_dataset();

  SUBCASE("single candidate, single restart equals one train call") {
    const std::vector<std::vector<int>> candidates{{6}};
    const auto table = search::compare_architectures(data, candidates, 1, 77, quick());
    REQUIRE(table.rows.size() == 1);
    const auto& row = table.rows[0];

    nn::NetConfig config;
    config.n_inputs = 4;
    config.hidden_sizes = {6};
    config.threshold = quick().threshold;
    config.step_max = quick().step_max;
    config.seed = row.seed_used;
    const auto direct = nn::train(config, data);
    CHECK(row.error == direct.error);
    CHECK(row.steps == direct.steps);
    CHECK(row.converged == direct.converged);
  }
  SUBCASE("rows keep candidate order and fingerprints match the data") {
    const std::vector<std::vector<int>> candidates{{5}, {10, 5}, {4, 5, 3}};
    const auto table = search::compare_architectures(data, candidates, 2, 9, quick());
    REQUIRE(table.rows.size() == 3);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      CHECK(table.rows[i].hidden_sizes == candidates[i]);
    CHECK(table.dataset_fingerprint == search::dataset_fingerprint(data));
    CHECK(table.n_inputs == 4);
  }
  SUBCASE("bitwise repeatable") {
    const std::vector<std::vector<int>> candidates{{3}, {5, 2}};
    const auto a = search::compare_architectures(data, candidates, 3, 123, quick());
    const auto b = search::compare_architectures(data, candidates, 3, 123, quick());
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].error == b.rows[i].error);
      CHECK(a.rows[i].steps == b.rows[i].steps);
      CHECK(a.rows[i].seed_used == b.rows[i].seed_used);
    }
  }
  SUBCASE("every row is reproducible from its recorded seed") {
    const std::vector<std::vector<int>> candidates{{4}, {7, 3}};
    const auto table = search::compare_architectures(data, candidates, 3, 2024, quick());
    for (const auto& row : table.rows) {
      nn::NetConfig config;
      config.n_inputs = table.n_inputs;
      config.hidden_sizes = row.hidden_sizes;
      config.threshold = quick().threshold;
      config.step_max = quick().step_max;
      config.seed = row.seed_used;
      const auto replay = nn::train(config, data);
      CHECK(replay.error == row.error);
      CHECK(replay.steps == row.steps);
    }
  }
  SUBCASE("input checks") {
    const std::vector<std::vector<int>> none;
    CHECK_THROWS_AS(search::compare_architectures(data, none, 1, 1, quick()), SizeError);
    const std::vector<std::vector<int>> one{{3}};
    CHECK_THROWS_AS(search::compare_architectures(data, one, 0, 1, quick()), DomainError);
  }
}

TEST_CASE("select_best") {
  SUBCASE("the reference rows pick [10,5]") {
    const auto table = table_one_literal();
    CHECK(search::select_best(table).hidden_sizes == std::vector<int>{10, 5});
  }
  SUBCASE("permuting rows cannot change the winner") {
    auto table = table_one_literal();
    std::sort(table.rows.begin(), table.rows.end(),
              [](const ComparisonRow& a, const ComparisonRow& b) { return a.error > b.error; });
    CHECK(search::select_best(table).hidden_sizes == std::vector<int>{10, 5});
    std::reverse(table.rows.begin(), table.rows.end());
    CHECK(search::select_best(table).hidden_sizes == std::vector<int>{10, 5});
  }
  SUBCASE("error ties break on steps") {
    ComparisonTable table;
    table.n_inputs = 4;
    table.rows = {{{5}, 0.002, 200, 1, true}, {{6}, 0.002, 100, 2, true}};
    CHECK(search::select_best(table).steps == 100);
  }
  SUBCASE("full metric ties break on parameter count") {
    ComparisonTable table;
    table.n_inputs = 4;
    table.rows = {{{10, 5}, 0.002, 100, 1, true}, {{5}, 0.002, 100, 2, true}};
    CHECK(search::select_best(table).hidden_sizes == std::vector<int>{5});
    CHECK(search::row_parameter_count(table, table.rows[0]) == 111);
    CHECK(search::row_parameter_count(table, table.rows[1]) == 31);
    std::swap(table.rows[0], table.rows[1]);
    CHECK(search::select_best(table).hidden_sizes == std::vector<int>{5});
  }
  SUBCASE("empty table") {
    ComparisonTable table;
    CHECK_THROWS_AS(search::select_best(table), SizeError);
  }
}

TEST_CASE("stepwise_refine") {
  const auto data = fixtures::modeling_dataset();

  SUBCASE("singleton grid at depth 1") {
    const std::vector<int> grid{5};
    const auto refined = search::stepwise_refine(data, 1, grid, 42, quick(), 1);
    CHECK(refined.best_sizes == std::vector<int>{5});
    REQUIRE(refined.trace.size() == 1);
    CHECK(refined.trace[0].rows.size() == 1);
  }
  SUBCASE("trace shape, grid membership and monotone winners") {
    const std::vector<int> grid{2, 4, 6, 8, 10};
    const auto refined = search::stepwise_refine(data, 2, grid, 7, quick(), 2);
    REQUIRE(refined.trace.size() == 2);
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& stage : refined.trace) {
      CHECK(stage.rows.size() == grid.size());
      const double winner = search::select_best(stage).error;
      CHECK(winner <= previous);
      previous = winner;
    }
    for (int size : refined.best_sizes)
      CHECK(std::find(grid.begin(), grid.end(), size) != grid.end());
  }
  SUBCASE("repeatable") {
    const std::vector<int> grid{3, 5, 7};
    const auto a = search::stepwise_refine(data, 2, grid, 5, quick(), 2);
    const auto b = search::stepwise_refine(data, 2, grid, 5, quick(), 2);
    CHECK(a.best_sizes == b.best_sizes);
    for (std::size_t s = 0; s < a.trace.size(); ++s)
      for (std::size_t r = 0; r < a.trace[s].rows.size(); ++r)
        CHECK(a.trace[s].rows[r].error == b.trace[s].rows[r].error);
  }
  SUBCASE("input checks") {
    const std::vector<int> grid{3};
    CHECK_THROWS_AS(search::stepwise_refine(data, 0, grid, 1, quick()), DomainError);
    const std::vector<int> empty;
    CHECK_THROWS_AS(search::stepwise_refine(data, 1, empty, 1, quick()), SizeError);
    const std::vector<int> bad{0};
    CHECK_THROWS_AS(search::stepwise_refine(data, 1, bad, 1, quick()), DomainError);
  }
}

TEST_CASE("comparison table serialization") {
  const auto table = table_one_literal();
  SUBCASE("json round trip") {
    const auto back = search::comparison_from_json(search::to_json(table));
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[1].error == 0.0011);
    CHECK(back.rows[1].steps == 225);
    CHECK(back.n_inputs == 4);
    CHECK(back.dataset_fingerprint == table.dataset_fingerprint);
  }
  SUBCASE("failed rows survive as null errors") {
    auto failed = table;
    failed.rows[0].error = std::numeric_limits<double>::infinity();
    const auto back = search::comparison_from_json(search::to_json(failed));
    CHECK(std::isinf(back.rows[0].error));
  }
  SUBCASE("text rendering lines up the depth comparison") {
    const auto text = search::render_text(table);
    CHECK(text.find("Hidden layers") != std::string::npos);
    CHECK(text.find("10, 5") != std::string::npos);
    CHECK(text.find("225") != std::string::npos);
    CHECK(text.find("0.0011") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + three rows
  }
}

TEST_CASE("dataset fingerprint tracks content") {
  const auto data = fixtures::modeling_dataset();
  auto tweaked = data;
  tweaked.X[0][0] += 1e-9;
  CHECK(search::dataset_fingerprint(data) == search::dataset_fingerprint(data));
  CHECK(search::dataset_fingerprint(data) != search::dataset_fingerprint(tweaked));
}
