#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "survtree/baseline.hpp"
#include "survtree/dataset.hpp"
#include "survtree/error.hpp"
#include "survtree/tree.hpp"

using namespace survtree;

namespace {

Dataset small_example() {
  return Dataset({{1.0, true, FeatureVector{0}}, {2.0, false, FeatureVector{1}},
                  {3.0, true, FeatureVector{1}}},
                 1);
}

}  // namespace

TEST_CASE("Nelson-Aalen and Kaplan-Meier on a three-point sample") {
  const auto b = fit_baseline(small_example());
  CHECK(b.cumulative_hazard(1.0) == doctest::Approx(1.0 / 3));
  CHECK(b.cumulative_hazard(2.0) == doctest::Approx(1.0 / 3));
  CHECK(b.cumulative_hazard(3.0) == doctest::Approx(4.0 / 3));
  CHECK(b.survival(1.0) == doctest::Approx(2.0 / 3));
  CHECK(b.survival(3.0) == doctest::Approx(0.0));
  CHECK(b.cumulative_hazard(0.5) == 0.0);
  CHECK(b.survival(0.5) == 1.0);
  // held beyond the last time
  CHECK(b.cumulative_hazard(100.0) == doctest::Approx(4.0 / 3));
  CHECK(b.survival_before(3.0) == doctest::Approx(2.0 / 3));
}

TEST_CASE("estimators agree with the definition on tied data") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const auto data = oracle::random_dataset(rng, 40, 2, 8);
    const auto times = data.times();
    const auto events = data.events();
    const auto b = fit_baseline(data);
    for (double t = 0.5; t < 10; t += 0.5) {
      CHECK(b.cumulative_hazard(t) == doctest::Approx(oracle::nelson_aalen(times, events, t)));
      CHECK(b.survival(t) == doctest::Approx(oracle::kaplan_meier(times, events, t)).epsilon(1e-12));
    }
    // estimators are monotone
    for (std::size_t i = 1; i < b.times().size(); ++i) {
      CHECK(b.cumulative_hazards()[i] >= b.cumulative_hazards()[i - 1]);
      CHECK(b.survivals()[i] <= b.survivals()[i - 1]);
    }
  }
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset({{0.0, true, FeatureVector{0}}}, 1), DomainError);
  CHECK_THROWS_AS(Dataset({{1.0, true, FeatureVector{0, 1}}}, 1), StructuralError);
  CHECK_THROWS_AS(Dataset({{NAN, true, FeatureVector{0}}}, 1), DomainError);
  CHECK_THROWS_AS(fit_baseline(Dataset(1)), DomainError);
}

TEST_CASE("split partitions the data") {
  const auto data = small_example();
  const auto [off, on] = split_dataset(data, 0);
  CHECK(off.size() == 1);
  CHECK(on.size() == 2);
  CHECK(on[0].time == 2.0);
  CHECK_THROWS_AS(split_dataset(data, 1), StructuralError);
}

TEST_CASE("hazards attach from the baseline") {
  const auto data = small_example();
  const auto with = data.with_baseline(fit_baseline(data));
  REQUIRE(with.has_hazard());
  CHECK(with.hazard(2) == doctest::Approx(4.0 / 3));
  CHECK(with.neg_log_hazard(0) == doctest::Approx(std::log(3.0)));
  CHECK(with.neg_log_hazard(1) == 0.0);  // censored
}

TEST_CASE("tree structure, prediction and json round trip") {
  auto tree = SurvivalTree::split(0, SurvivalTree::leaf(0.5),
                                  SurvivalTree::split(1, SurvivalTree::leaf(1.0), SurvivalTree::leaf(2.0)));
  CHECK(tree.depth() == 2);
  CHECK(tree.branch_count() == 2);
  CHECK(tree.leaf_count() == 3);
  CHECK(predict_theta(tree, FeatureVector{0, 1}) == 0.5);
  CHECK(predict_theta(tree, FeatureVector{1, 0}) == 1.0);
  CHECK(predict_theta(tree, FeatureVector{1, 1}) == 2.0);
  CHECK_THROWS_AS(predict_theta(tree, FeatureVector{1}), StructuralError);

  const auto back = tree_from_json(to_json(tree));
  CHECK(to_json(back) == to_json(tree));
  CHECK(SurvivalTree::leaf(3.0).depth() == 0);

  const auto b = fit_baseline(small_example());
  const auto b2 = baseline_from_json(to_json(b));
  CHECK(b2.times() == b.times());
  CHECK(b2.cumulative_hazards() == b.cumulative_hazards());
  CHECK(predict_survival(tree, b, FeatureVector{1, 1}, 3.0) ==
        doctest::Approx(std::exp(-2.0 * 4.0 / 3)));
}
