#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "survtree/baseline.hpp"

namespace survtree {

struct ConcordanceCounts {
  std::uint64_t concordant = 0;
  std::uint64_t discordant = 0;
  std::uint64_t tied_risk = 0;

  std::uint64_t comparable() const { return concordant + discordant + tied_risk; }
};

// Pair counts over (i, j) with t_i < t_j and event_i, classified by the
// sign of theta_i - theta_j. O(n log n).
ConcordanceCounts concordance_counts(std::span<const double> times, std::span<const int> events,
                                     std::span<const double> thetas);

// (CC + TR/2) / (CC + TR + DC). Throws MetricError without comparable pairs.
double harrell_c(std::span<const double> times, std::span<const int> events,
                 std::span<const double> thetas);

// Kaplan-Meier fit of the censoring distribution G (indicators flipped).
BaselineHazard censoring_km(std::span<const double> times, std::span<const int> events);

struct EvalWindow {
  double lower = 0.0;
  double upper = 0.0;
};

// Quantile with linear interpolation between order statistics.
double quantile(std::span<const double> values, double p);

// 10% and 90% quantiles of the times.
EvalWindow eval_window(std::span<const double> times);

// Right-continuous survival step function; 1 before the first time.
struct SurvivalCurve {
  std::vector<double> times;
  std::vector<double> values;

  double at(double t) const;
};

// exp(-theta * Lambda(t)) on the baseline's grid.
SurvivalCurve proportional_hazard_curve(const BaselineHazard& baseline, double theta);
// The baseline's own Kaplan-Meier curve.
SurvivalCurve kaplan_meier_curve(const BaselineHazard& baseline);

// Integrated Brier score with inverse probability of censoring weights.
// Instance i is predicted by curves[curve_of[i]]. Integrals are exact sums
// over the breakpoints of the curves and of G inside the window. G is taken
// left-continuously at the instance's own time.
double integrated_brier(std::span<const double> times, std::span<const int> events,
                        std::span<const SurvivalCurve> curves,
                        std::span<const std::size_t> curve_of, const EvalWindow& window,
                        const BaselineHazard& censoring);

// One curve per instance.
double integrated_brier(std::span<const double> times, std::span<const int> events,
                        std::span<const SurvivalCurve> curves, const EvalWindow& window,
                        const BaselineHazard& censoring);

// 1 - ib / ib0.
double normalized_ib(double ib, double ib0);

}  // namespace survtree
