#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "survtree/error.hpp"
#include "survtree/synthgen.hpp"

using namespace survtree;

TEST_CASE("feature schema") {
  CHECK(synthetic_schema(false).size() == 6);
  CHECK(synthetic_schema(true).size() == 12);
  const auto table = generate_features(500, 3);
  for (const auto& row : table.rows) {
    for (std::size_t f = 0; f < row.size(); ++f) {
      const auto& s = table.schema[f];
      if (s.kind == RawKind::continuous) CHECK((row[f] >= 0 && row[f] <= 1));
      if (s.kind == RawKind::binary) CHECK((row[f] == 0 || row[f] == 1));
      if (s.kind == RawKind::categorical) CHECK((row[f] >= 0 && row[f] < s.levels));
    }
  }
}

TEST_CASE("ground-truth tree is complete with depth five") {
  const auto tree = generate_tree(9, synthetic_schema());
  CHECK(tree.depth() == 5);
  std::size_t leaves = 0;
  for (const auto& n : tree.nodes) leaves += n.feature < 0;
  CHECK(leaves == 32);
  const auto table = generate_features(100, 4);
  for (const auto& row : table.rows) CHECK(tree.nodes[tree.leaf_of(row)].feature < 0);
}

TEST_CASE("distribution menu samples are positive with plausible means") {
  std::mt19937_64 rng(5);
  CHECK(distribution_menu().size() == 32);
  for (const auto& d : distribution_menu()) {
    double sum = 0;
    for (int i = 0; i < 4000; ++i) {
      const double x = d.sample(rng);
      CHECK(x > 0);
      sum += x;
    }
    double mean = 0;
    switch (d.family) {
      case Family::exponential: mean = 1 / d.a; break;
      case Family::weibull: mean = d.b * std::tgamma(1 + 1 / d.a); break;
      case Family::lognormal: mean = std::exp(d.a + d.b / 2); break;
      case Family::gamma: mean = d.a * d.b; break;
    }
    CHECK(sum / 4000 == doctest::Approx(mean).epsilon(0.15));
  }
}

TEST_CASE("censoring rule against the linear scan") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.001, 0.999), time(0.1, 5.0);
  for (double c : {0.0, 0.1, 0.5, 0.8}) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> t(50), u(50);
      for (auto& x : t) x = time(rng);
      for (auto& x : u) x = unit(rng);
      const auto out = apply_censoring(t, u, c);
      CHECK(out.censored <= static_cast<std::size_t>(std::floor(c * 50 + 1e-9)));
      CHECK(out.k == oracle::censoring_k(t, u, c));
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!out.events[i]) CHECK(out.times[i] <= t[i]);
        else CHECK(out.times[i] == t[i]);
      }
    }
  }
  std::vector<double> t{1.0}, u{0.5};
  CHECK_THROWS_AS(apply_censoring(t, u, 1.0), DomainError);
}

TEST_CASE("samples are reproducible and streams differ") {
  const GenConfig config{200, 0.5, 17, false};
  const auto tree = ground_truth_for(config);
  const auto a = generate_sample(tree, 200, 0.5, 17, 0);
  const auto b = generate_sample(tree, 200, 0.5, 17, 0);
  const auto test = generate_sample(tree, 200, 0.5, 17, 1);
  CHECK(a.outcome.times == b.outcome.times);
  CHECK(a.features.rows == b.features.rows);
  CHECK(a.outcome.times != test.outcome.times);
  CHECK(to_json(ground_truth_for(config)) == to_json(tree));
  const auto csv = to_csv(a);
  CHECK(csv.header[0] == "time");
  CHECK(csv.header[1] == "event");
  CHECK(csv.rows.size() == 200);
}
