#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "sitaware/errors.hpp"
#include "sitaware/meta.hpp"
#include "sitaware/numeric.hpp"
#include "sitaware/rng.hpp"

using namespace sitaware;
using meta::EffectEstimate;

namespace {

std::vector<EffectEstimate> make_estimates(const std::vector<double>& effects,
                                           const std::vector<double>& variances) {
  std::vector<EffectEstimate> out;
  for (std::size_t i = 0; i < effects.size(); ++i)
    out.push_back({"s" + std::to_string(i), effects[i], variances[i]});
  return out;
}

// Independent check: pooled_common minimizes sum w_i (theta_i - mu)^2 over a
// fine grid of mu (step 1e-4 of the effect range).
double grid_argmin_pooled(const std::vector<EffectEstimate>& estimates) {
  double lo = estimates.front().effect, hi = lo;
  for (const auto& e : estimates) {
    lo = std::min(lo, e.effect);
    hi = std::max(hi, e.effect);
  }
  if (hi == lo) return lo;
  const double step = 1e-4 * (hi - lo);
  double best_mu = lo, best_value = std::numeric_limits<double>::infinity();
  for (double mu = lo; mu <= hi + step / 2; mu += step) {
    double value = 0.0;
    for (const auto& e : estimates) {
      const double d = e.effect - mu;
      value += d * d / e.variance;
    }
    if (value < best_value) {
      best_value = value;
      best_mu = mu;
    }
  }
  return best_mu;
}

}  // namespace

TEST_CASE("two-arm effect: log count ratio with 1/a + 1/b variance") {
  const auto wsj = meta::effect_from_two_arm(480000, 80000);
  CHECK(wsj.effect == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(wsj.variance == doctest::Approx(1.0 / 480000 + 1.0 / 80000).epsilon(1e-12));
  CHECK(wsj.variance == doctest::Approx(1.45833e-5).epsilon(1e-4));

  const auto official = meta::effect_from_two_arm(320000, 31000);
  CHECK(official.effect == doctest::Approx(std::log(320.0 / 31.0)).epsilon(1e-12));
  CHECK(official.effect == doctest::Approx(2.334335).epsilon(1e-6));
  CHECK(official.variance == doctest::Approx(3.5383e-5).epsilon(1e-4));

  for (std::int64_t n : {1, 7, 100000}) {
    const auto equal = meta::effect_from_two_arm(n, n);
    CHECK(equal.effect == 0.0);
    CHECK(equal.variance == doctest::Approx(2.0 / static_cast<double>(n)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(meta::effect_from_two_arm(0, 5), DomainError);
  CHECK_THROWS_AS(meta::effect_from_two_arm(5, -1), DomainError);
}

TEST_CASE("single-source effect: reliability-scaled variance") {
  const auto e = meta::effect_from_single_source(80000, 0.10, 4);
  CHECK(e.effect == 80000.0);
  CHECK(std::sqrt(e.variance) == doctest::Approx(4000.0).epsilon(1e-12));
  CHECK(e.variance == doctest::Approx(1.6e7).epsilon(1e-12));

  const auto single = meta::effect_from_single_source(123.0, 0.3, 1);
  CHECK(std::sqrt(single.variance) == doctest::Approx(0.3 * 123.0).epsilon(1e-12));

  const auto many = meta::effect_from_single_source(50000, 0.05, 25);
  CHECK(std::sqrt(many.variance) == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(many.variance == doctest::Approx(250000.0).epsilon(1e-12));

  CHECK_THROWS_AS(meta::effect_from_single_source(0.0, 0.1, 4), DomainError);
  CHECK_THROWS_AS(meta::effect_from_single_source(10.0, 0.1, 0), DomainError);
}

TEST_CASE("pool: hand-worked inverse-variance examples") {
  SUBCASE("three unit-variance studies") {
    const auto r = meta::pool(make_estimates({1, 2, 3}, {1, 1, 1}));
    CHECK(r.pooled_common == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.se_common == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(r.Q == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.df == 2);
    CHECK(r.I2 == 0.0);
    CHECK(r.tau2 == 0.0);
    CHECK(r.pooled_random == doctest::Approx(2.0).epsilon(1e-12));
    for (double w : r.weights_common) CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  SUBCASE("two heterogeneous studies (moment estimator by hand)") {
    const auto r = meta::pool(make_estimates({0, 2}, {1, 1}));
    CHECK(r.pooled_common == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.Q == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.df == 1);
    CHECK(r.I2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.tau2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.weights_random[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.weights_random[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.pooled_random == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.se_random == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("homogeneous studies collapse") {
    const auto r = meta::pool(make_estimates({0.7, 0.7, 0.7, 0.7}, {0.5, 1, 2, 4}));
    CHECK(r.pooled_common == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.pooled_random == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.Q == doctest::Approx(0.0));
    CHECK(r.I2 == 0.0);
    CHECK(r.tau2 == 0.0);
  }
  SUBCASE("rejects bad input") {
    CHECK_THROWS_AS(meta::pool(make_estimates({1}, {1})), SizeError);
    CHECK_THROWS_AS(meta::pool(make_estimates({1, 2}, {1, 0})), DomainError);
    CHECK_THROWS_AS(meta::pool(make_estimates({1, 2}, {1, -3})), DomainError);
  }
}

TEST_CASE("pool: invariants on random study sets") {
  SeededRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform() * 10);
    std::vector<double> effects(k), variances(k);
    for (int i = 0; i < k; ++i) {
      effects[i] = 4.0 * rng.uniform() - 2.0;
      variances[i] = 0.01 + 5.0 * rng.uniform();
    }
    auto estimates = make_estimates(effects, variances);
    const auto r = meta::pool(estimates);
    CAPTURE(trial);

    CHECK(r.Q >= 0.0);
    CHECK(r.I2 >= 0.0);
    CHECK(r.I2 < 1.0);
    CHECK(r.tau2 >= 0.0);
    CHECK(r.df == k - 1);

    const double min_effect = *std::min_element(effects.begin(), effects.end());
    const double max_effect = *std::max_element(effects.begin(), effects.end());
    CHECK(r.pooled_common >= min_effect - 1e-12);
    CHECK(r.pooled_common <= max_effect + 1e-12);

    double sum_c = std::accumulate(r.weights_common.begin(), r.weights_common.end(), 0.0);
    double sum_r = std::accumulate(r.weights_random.begin(), r.weights_random.end(), 0.0);
    CHECK(std::abs(sum_c - 1.0) < 1e-12);
    CHECK(std::abs(sum_r - 1.0) < 1e-12);
    for (double w : r.weights_common) CHECK(w > 0.0);

    if (r.tau2 == 0.0) {
      CHECK(r.pooled_random == doctest::Approx(r.pooled_common).epsilon(1e-12));
      for (int i = 0; i < k; ++i)
        CHECK(r.weights_random[i] == doctest::Approx(r.weights_common[i]).epsilon(1e-12));
    }

    // Scale invariance: v -> c*v keeps the pooled mean, scales se by sqrt(c).
    const double c = 0.25 + 8.0 * rng.uniform();
    auto scaled = estimates;
    for (auto& e : scaled) e.variance *= c;
    const auto rs = meta::pool(scaled);
    CHECK(rs.pooled_common == doctest::Approx(r.pooled_common).epsilon(1e-12));
    CHECK(rs.se_common == doctest::Approx(r.se_common * std::sqrt(c)).epsilon(1e-12));

    // Permutation invariance of the pooled scalars.
    auto shuffled = estimates;
    std::reverse(shuffled.begin(), shuffled.end());
    const auto rp = meta::pool(shuffled);
    CHECK(rp.pooled_common == doctest::Approx(r.pooled_common).epsilon(1e-12));
    CHECK(rp.Q == doctest::Approx(r.Q).epsilon(1e-9));
    CHECK(rp.tau2 == doctest::Approx(r.tau2).epsilon(1e-9));
  }
}

TEST_CASE("pool: grid-argmin oracle agrees with the closed form") {
  SeededRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform() * 3);
    std::vector<double> effects(k), variances(k);
    for (int i = 0; i < k; ++i) {
      effects[i] = 1.5 * rng.uniform();
      variances[i] = 0.05 + 2.0 * rng.uniform();
    }
    const auto estimates = make_estimates(effects, variances);
    CAPTURE(trial);
    CHECK(std::abs(meta::pool(estimates).pooled_common - grid_argmin_pooled(estimates)) <= 1e-4);
  }
}

TEST_CASE("standardized residuals") {
  SUBCASE("hand examples") {
    auto estimates = make_estimates({0, 2}, {1, 1});
    auto r = meta::pool(estimates);
    const auto res = meta::standardized_residuals(estimates, r);
    CHECK(res[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(res[1] == doctest::Approx(1.0).epsilon(1e-12));

    estimates = make_estimates({1, 2, 3}, {1, 1, 1});
    r = meta::pool(estimates);
    const auto res3 = meta::standardized_residuals(estimates, r);
    CHECK(res3[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(res3[1] == doctest::Approx(0.0));
    CHECK(res3[2] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("homogeneous studies have zero residuals") {
    const auto estimates = make_estimates({5, 5, 5}, {1, 2, 3});
    for (double res : meta::standardized_residuals(estimates, meta::pool(estimates)))
      CHECK(res == doctest::Approx(0.0));
  }
  SUBCASE("length mismatch is rejected") {
    const auto estimates = make_estimates({0, 2}, {1, 1});
    const auto r = meta::pool(estimates);
    const auto extra = make_estimates({0, 2, 4}, {1, 1, 1});
    CHECK_THROWS_AS(meta::standardized_residuals(extra, r), InputError);
  }
}

TEST_CASE("plot_data") {
  SUBCASE("95% interval uses the normal quantile") {
    const auto estimates = make_estimates({0, 0}, {1, 1});
    const auto plot = meta::plot_data(estimates, meta::pool(estimates), 0.95);
    CHECK(plot.forest_rows[0].ci_low == doctest::Approx(-1.959964).epsilon(1e-6));
    CHECK(plot.forest_rows[0].ci_high == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845400545).epsilon(1e-12));
  }
  SUBCASE("fixture table gives 10 studies + 2 summaries") {
    const auto table = fixtures::report_table();
    std::vector<EffectEstimate> estimates;
    const auto a34 = table.column_as_reals("a34");
    const auto a35 = table.column_as_reals("a35");
    for (std::size_t i = 0; i < a34.size(); ++i)
      estimates.push_back(meta::effect_from_two_arm(static_cast<std::int64_t>(a34[i]),
                                                    static_cast<std::int64_t>(a35[i]),
                                                    table.rows[i].source_id));
    const auto plot = meta::plot_data(estimates, meta::pool(estimates));
    CHECK(plot.forest_rows.size() == 12);
    CHECK(plot.funnel_points.size() == 10);
    CHECK(plot.residuals.size() == 10);
    CHECK(plot.forest_rows[10].study_id == "common");
    CHECK(plot.forest_rows[10].summary);
    CHECK(plot.forest_rows[11].study_id == "random");
    for (const auto& row : plot.forest_rows) {
      CHECK(row.ci_low <= row.effect);
      CHECK(row.effect <= row.ci_high);
    }
  }
  SUBCASE("homogeneous studies line up") {
    const auto estimates = make_estimates({1.5, 1.5, 1.5}, {2, 2, 2});
    const auto plot = meta::plot_data(estimates, meta::pool(estimates));
    for (const auto& row : plot.forest_rows) CHECK(row.effect == doctest::Approx(1.5));
    for (const auto& p : plot.funnel_points) CHECK(p.effect == doctest::Approx(1.5));
  }
  SUBCASE("ci level must sit inside (0,1)") {
    const auto estimates = make_estimates({0, 1}, {1, 1});
    const auto r = meta::pool(estimates);
    CHECK_THROWS_AS(meta::plot_data(estimates, r, 0.0), DomainError);
    CHECK_THROWS_AS(meta::plot_data(estimates, r, 1.0), DomainError);
    CHECK_THROWS_AS(meta::plot_data(estimates, r, -2.0), DomainError);
  }
  SUBCASE("JSON round trip") {
    const auto estimates = make_estimates({0, 2}, {1, 4});
    const auto plot = meta::plot_data(estimates, meta::pool(estimates));
    const auto back = meta::plot_data_from_json(meta::to_json(plot));
    CHECK(back.forest_rows.size() == plot.forest_rows.size());
    CHECK(back.forest_rows[0].ci_low == plot.forest_rows[0].ci_low);
    CHECK(back.residuals == plot.residuals);
  }
}

TEST_CASE("fuse_predictions") {
  SUBCASE("equal variances reduce to the mean") {
    const auto r = meta::fuse_predictions(std::vector<double>{10, 20}, std::vector<double>{1, 1});
    CHECK(r.fused == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("inverse-variance weighting") {
    const auto r = meta::fuse_predictions(std::vector<double>{10, 20}, std::vector<double>{1, 4});
    CHECK(r.weights[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.weights[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.fused == doctest::Approx(12.0).epsilon(1e-12));
  }
  SUBCASE("fixture a35 column with equal variances is the arithmetic mean") {
    const auto values = fixtures::report_table().column_as_reals("a35");
    const std::vector<double> variances(values.size(), 2.5);
    CHECK(meta::fuse_predictions(values, variances).fused ==
          doctest::Approx(46800.0).epsilon(1e-12));
  }
  SUBCASE("bad input") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(meta::fuse_predictions(empty, empty), SizeError);
    CHECK_THROWS_AS(
        meta::fuse_predictions(std::vector<double>{1, 2}, std::vector<double>{1}), InputError);
    CHECK_THROWS_AS(
        meta::fuse_predictions(std::vector<double>{1}, std::vector<double>{0}), DomainError);
  }
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {0.001, 0.01, 0.1, 0.25, 0.5, 0.841344746, 0.975, 0.999}) {
    CAPTURE(p);
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK(two_sided_p(0.0) == doctest::Approx(1.0));
  CHECK(two_sided_p(1.9599639845400545) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}
