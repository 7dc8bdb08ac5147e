#pragma once

#include <span>
#include <vector>

#include "survtree/dataset.hpp"

namespace survtree {

// Right-continuous step functions tabulated at the distinct observed times:
// the Nelson-Aalen cumulative hazard and the Kaplan-Meier survival curve.
// Before the first tabulated time the hazard is 0 and survival 1; beyond the
// last one the final values are held.
class BaselineHazard {
 public:
  BaselineHazard() = default;
  BaselineHazard(std::vector<double> times, std::vector<double> cumulative_hazard,
                 std::vector<double> survival);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& cumulative_hazards() const { return cumulative_hazard_; }
  const std::vector<double>& survivals() const { return survival_; }
  bool empty() const { return times_.empty(); }

  double cumulative_hazard(double t) const;
  double survival(double t) const;
  // Left limit S(t-).
  double survival_before(double t) const;

 private:
  std::vector<double> times_;
  std::vector<double> cumulative_hazard_;
  std::vector<double> survival_;
};

BaselineHazard fit_baseline(const Dataset& data);
BaselineHazard fit_baseline(std::span<const double> times, std::span<const int> events);

double eval_cumulative_hazard(const BaselineHazard& baseline, double t);

}  // namespace survtree
