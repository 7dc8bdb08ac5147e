#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "survtree/baseline.hpp"
#include "survtree/error.hpp"
#include "survtree/loss.hpp"

using namespace survtree;

TEST_CASE("three-point sample tuple and loss") {
  Dataset data({{1.0, true, FeatureVector{0}}, {2.0, false, FeatureVector{0}},
                {3.0, true, FeatureVector{0}}},
               1);
  data = data.with_baseline(fit_baseline(data));
  const auto t = tuple_of(data);
  CHECK(t.es == 2.0);
  CHECK(t.hs == doctest::Approx(2.0));
  CHECK(t.nlhs == doctest::Approx(std::log(9.0 / 4)));
  CHECK(leaf_loss(t) == doctest::Approx(0.8109302162163288));
  CHECK(theta_hat(t) == doctest::Approx(1.0));
}

TEST_CASE("theta conventions") {
  CHECK(theta_hat({0.0, 4.0, 0.0}) == 0.125);
  CHECK(theta_hat({3.0, 1.5, 0.0}) == 2.0);
  CHECK_THROWS_AS(theta_hat({1.0, 0.0, 0.0}), DegenerateLeafError);
  CHECK(leaf_theta({0.0, 0.0, 0.0}) == 1.0);
  CHECK(leaf_loss({0.0, 0.0, 0.0}) == 0.0);
  CHECK(leaf_loss({0.0, 5.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(leaf_loss({1.0, 0.0, 0.0}), DegenerateLeafError);
}

TEST_CASE("tuple loss matches the per-instance loss at the fitted theta") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    auto data = oracle::random_dataset(rng, 30, 1);
    data = data.with_baseline(fit_baseline(data));
    const auto t = tuple_of(data);
    const double direct = leaf_loss_direct(data, theta_hat(t));
    CHECK(leaf_loss(t) == doctest::Approx(direct).epsilon(1e-9));
    // fitted theta minimises the direct loss
    CHECK(leaf_loss_direct(data, theta_hat(t) * 1.1) >= direct);
    CHECK(leaf_loss_direct(data, theta_hat(t) * 0.9) >= direct);
    // loss is nonnegative and splitting never hurts
    std::vector<std::uint32_t> a, b;
    for (std::uint32_t i = 0; i < data.size(); ++i) (data[i].features[0] ? a : b).push_back(i);
    CHECK(leaf_loss(tuple_of(data, a)) + leaf_loss(tuple_of(data, b)) <= leaf_loss(t) + 1e-9);
  }
}

TEST_CASE("self-fit baseline gives a unit root theta") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    auto data = oracle::random_dataset(rng, 100, 1);
    data = data.with_baseline(fit_baseline(data));
    CHECK(theta_hat(tuple_of(data)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tree loss and normalization") {
  std::mt19937_64 rng(13);
  auto data = oracle::random_dataset(rng, 60, 2);
  data = data.with_baseline(fit_baseline(data));
  const double root = leaf_loss(tuple_of(data));
  CHECK(tree_loss(SurvivalTree::leaf(1.0), data) == doctest::Approx(root));
  const auto stump = SurvivalTree::split(0, SurvivalTree::leaf(1), SurvivalTree::leaf(1));
  CHECK(tree_loss(stump, data) <= root);
  CHECK(normalized_loss(root, root) == 0.0);
  CHECK_THROWS_AS(normalized_loss(0.0, 0.0), DomainError);
  std::vector<std::uint32_t> all(data.size());
  std::iota(all.begin(), all.end(), 0u);
  const auto fitted = fit_leaf_thetas(stump, data, all);
  double direct = 0;
  for (std::size_t leaf : {1u, 2u}) {
    std::vector<std::uint32_t> members;
    for (auto i : all) {
      if (fitted.leaf_index(data[i].features) == leaf) members.push_back(i);
    }
    direct += leaf_loss_direct(data, members, fitted.node(leaf).theta);
  }
  CHECK(direct == doctest::Approx(tree_loss(stump, data)));
}
