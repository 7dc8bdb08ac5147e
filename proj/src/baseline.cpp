#include "survtree/baseline.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "survtree/error.hpp"

namespace survtree {

BaselineHazard::BaselineHazard(std::vector<double> times, std::vector<double> cumulative_hazard,
                               std::vector<double> survival)
    : times_(std::move(times)),
      cumulative_hazard_(std::move(cumulative_hazard)),
      survival_(std::move(survival)) {
  if (times_.size() != cumulative_hazard_.size() || times_.size() != survival_.size()) {
    throw StructuralError("baseline hazard columns differ in length");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw DomainError("baseline times must be strictly increasing");
    }
    if (cumulative_hazard_[i] < 0.0 || (i > 0 && cumulative_hazard_[i] < cumulative_hazard_[i - 1])) {
      throw DomainError("cumulative hazard must be nonnegative and nondecreasing");
    }
    if (survival_[i] < 0.0 || survival_[i] > 1.0 || (i > 0 && survival_[i] > survival_[i - 1])) {
      throw DomainError("survival must lie in [0,1] and be nonincreasing");
    }
  }
}

double BaselineHazard::cumulative_hazard(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0.0;
  return cumulative_hazard_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double BaselineHazard::survival(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return survival_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double BaselineHazard::survival_before(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return survival_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

BaselineHazard fit_baseline(std::span<const double> times, std::span<const int> events) {
  if (times.empty()) throw DomainError("cannot fit a baseline hazard on an empty dataset");
  if (times.size() != events.size()) throw StructuralError("times and events differ in length");

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<double> grid;
  std::vector<double> hazard;
  std::vector<double> survival;
  double cumulative = 0.0;
  double surv = 1.0;
  std::size_t at_risk = times.size();
  for (std::size_t k = 0; k < order.size();) {
    const double t = times[order[k]];
    std::size_t deaths = 0;
    std::size_t group = 0;
    while (k < order.size() && times[order[k]] == t) {
      deaths += events[order[k]] != 0 ? 1 : 0;
      ++group;
      ++k;
    }
    const double ratio = static_cast<double>(deaths) / static_cast<double>(at_risk);
    cumulative += ratio;
    surv *= 1.0 - ratio;
    grid.push_back(t);
    hazard.push_back(cumulative);
    survival.push_back(surv);
    at_risk -= group;
  }
  return BaselineHazard(std::move(grid), std::move(hazard), std::move(survival));
}

BaselineHazard fit_baseline(const Dataset& data) {
  const auto t = data.times();
  const auto e = data.events();
  return fit_baseline(t, e);
}

double eval_cumulative_hazard(const BaselineHazard& baseline, double t) {
  return baseline.cumulative_hazard(t);
}

}  // namespace survtree
