#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "survtree/baseline.hpp"
#include "survtree/error.hpp"
#include "survtree/metrics.hpp"

using namespace survtree;

TEST_CASE("concordance on a worked example") {
  // pairs with an event first: (0,1) concordant, (0,2) concordant, (1,2) discordant
  const std::vector<double> t{1, 2, 3};
  const std::vector<int> e{1, 1, 0};
  const std::vector<double> r{3, 1, 2};
  CHECK(harrell_c(t, e, r) == doctest::Approx(2.0 / 3));
}

TEST_CASE("concordance matches pair enumeration") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep * 3;
    std::vector<double> t(n), r(n);
    std::vector<int> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<double>(rng() % 10 + 1);
      e[i] = static_cast<int>(rng() % 3 != 0);
      r[i] = static_cast<double>(rng() % 4);
    }
    const auto p = oracle::concordance(t, e, r);
    const auto c = concordance_counts(t, e, r);
    CHECK(static_cast<double>(c.concordant) == p.concordant);
    CHECK(static_cast<double>(c.discordant) == p.discordant);
    CHECK(static_cast<double>(c.tied_risk) == p.tied);
  }
}

TEST_CASE("constant predictor and undefined concordance") {
  const std::vector<double> t{1, 2, 3, 4};
  const std::vector<int> e{1, 0, 1, 1};
  const std::vector<double> r(4, 1.7);
  CHECK(harrell_c(t, e, r) == 0.5);
  const std::vector<int> none(4, 0);
  CHECK_THROWS_AS(harrell_c(t, none, r), MetricError);
}

TEST_CASE("quantile and evaluation window") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  CHECK(quantile(v, 0.1) == doctest::Approx(10.9));
  CHECK(quantile(v, 0.9) == doctest::Approx(90.1));
  const auto w = eval_window(v);
  CHECK(w.lower == doctest::Approx(10.9));
  CHECK(w.upper == doctest::Approx(90.1));
}

TEST_CASE("censoring distribution flips the indicator") {
  const std::vector<double> t{1, 2, 3};
  const std::vector<int> e{1, 0, 1};
  const auto g = censoring_km(t, e);
  CHECK(g.survival(1.5) == 1.0);
  CHECK(g.survival(2.0) == doctest::Approx(0.5));
}

TEST_CASE("integrated Brier score matches quadrature") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 30;
    std::vector<double> t(n);
    std::vector<int> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<double>(rng() % 12 + 1);
      e[i] = static_cast<int>(rng() % 3 != 0);
    }
    const auto base = fit_baseline(t, e);
    const auto g = censoring_km(t, e);
    std::vector<SurvivalCurve> curves;
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) {
      theta[i] = 0.5 + static_cast<double>(rng() % 4) * 0.5;
      curves.push_back(proportional_hazard_curve(base, theta[i]));
    }
    const EvalWindow w{2.0, 9.0};
    bool defined = true;
    for (std::size_t i = 0; i < n; ++i) defined &= g.survival_before(t[i]) > 0 || t[i] > w.upper;
    if (g.survival(w.upper) <= 0 || !defined) continue;
    const double ib = integrated_brier(t, e, curves, w, g);
    const double q = oracle::brier_quadrature(
        t, e, [&](std::size_t i, double s) { return curves[i].at(s); },
        [&](double s) { return g.survival(s); }, [&](double s) { return g.survival_before(s); },
        w.lower, w.upper, 7000);
    CHECK(ib == doctest::Approx(q).epsilon(1e-6));
  }
}

TEST_CASE("Kaplan-Meier predictor has zero normalized score") {
  const std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<int> e{1, 0, 1, 1, 0, 1, 1, 0};
  const auto base = fit_baseline(t, e);
  const std::vector<SurvivalCurve> km{kaplan_meier_curve(base)};
  const std::vector<std::size_t> ids(t.size(), 0);
  const auto w = eval_window(t);
  const auto g = censoring_km(t, e);
  const double ib = integrated_brier(t, e, km, ids, w, g);
  CHECK(normalized_ib(ib, ib) == 0.0);
  CHECK_THROWS_AS(normalized_ib(1.0, 0.0), MetricError);
}
