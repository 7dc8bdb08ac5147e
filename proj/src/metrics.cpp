#include "survtree/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "survtree/error.hpp"

namespace survtree {

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw StructuralError("metric inputs differ in length");
}

// Fenwick tree of counts over ranks.
class RankCounter {
 public:
  explicit RankCounter(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t rank) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Count of inserted ranks < rank.
  std::uint64_t below(std::size_t rank) const {
    std::uint64_t s = 0;
    for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

}  // namespace

ConcordanceCounts concordance_counts(std::span<const double> times, std::span<const int> events,
                                     std::span<const double> thetas) {
  check_lengths(times.size(), events.size(), thetas.size());
  const std::size_t n = times.size();

  std::vector<double> levels(thetas.begin(), thetas.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), thetas[i]) - levels.begin());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return times[a] > times[b] || (times[a] == times[b] && a < b);
  });

  // Walk times from latest to earliest; the counter holds every instance
  // with a strictly later time than the current group.
  ConcordanceCounts out;
  RankCounter later(levels.size());
  std::uint64_t inserted = 0;
  for (std::size_t k = 0; k < n;) {
    std::size_t end = k;
    while (end < n && times[order[end]] == times[order[k]]) ++end;
    for (std::size_t g = k; g < end; ++g) {
      const std::size_t i = order[g];
      if (events[i] == 0) continue;
      const std::uint64_t lower = later.below(rank[i]);
      const std::uint64_t lower_or_equal = later.below(rank[i] + 1);
      out.concordant += lower;
      out.tied_risk += lower_or_equal - lower;
      out.discordant += inserted - lower_or_equal;
    }
    for (std::size_t g = k; g < end; ++g) later.add(rank[order[g]]);
    inserted += end - k;
    k = end;
  }
  return out;
}

double harrell_c(std::span<const double> times, std::span<const int> events,
                 std::span<const double> thetas) {
  const auto c = concordance_counts(times, events, thetas);
  if (c.comparable() == 0) throw MetricError("Harrell's C is undefined without comparable pairs");
  return (static_cast<double>(c.concordant) + 0.5 * static_cast<double>(c.tied_risk)) /
         static_cast<double>(c.comparable());
}

BaselineHazard censoring_km(std::span<const double> times, std::span<const int> events) {
  std::vector<int> flipped(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) flipped[i] = events[i] != 0 ? 0 : 1;
  return fit_baseline(times, flipped);
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

EvalWindow eval_window(std::span<const double> times) {
  EvalWindow w{quantile(times, 0.1), quantile(times, 0.9)};
  if (!(w.lower < w.upper)) throw MetricError("evaluation window is empty");
  return w;
}

double SurvivalCurve::at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 1.0;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

SurvivalCurve proportional_hazard_curve(const BaselineHazard& baseline, double theta) {
  SurvivalCurve c{baseline.times(), {}};
  c.values.reserve(c.times.size());
  for (double h : baseline.cumulative_hazards()) c.values.push_back(std::exp(-theta * h));
  return c;
}

SurvivalCurve kaplan_meier_curve(const BaselineHazard& baseline) {
  return {baseline.times(), baseline.survivals()};
}

namespace {

// Prefix integrals of one curve over a shared breakpoint grid.
struct CurveIntegrals {
  std::vector<double> miss;      // int (1 - S)^2 / G from the window start
  std::vector<double> survive;   // int S^2 from the window start
  std::vector<double> miss_rate;
  std::vector<double> survive_rate;
};

std::string time_text(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

}  // namespace

double integrated_brier(std::span<const double> times, std::span<const int> events,
                        std::span<const SurvivalCurve> curves,
                        std::span<const std::size_t> curve_of, const EvalWindow& window,
                        const BaselineHazard& censoring) {
  check_lengths(times.size(), events.size(), curve_of.size());
  if (times.empty()) throw MetricError("integrated Brier score of an empty test set");
  if (!(window.lower < window.upper)) throw MetricError("evaluation window is empty");
  const double lo = window.lower;
  const double hi = window.upper;

  // Grid: window ends plus every breakpoint of G and of the curves inside.
  std::vector<double> grid{lo, hi};
  auto add_inside = [&](const std::vector<double>& ts) {
    for (double t : ts) {
      if (t > lo && t < hi) grid.push_back(t);
    }
  };
  add_inside(censoring.times());
  for (const auto& c : curves) add_inside(c.times);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const std::size_t cells = grid.size() - 1;

  // G on each cell (constant on the open interval), and the first cell
  // where it vanishes.
  std::vector<double> g(cells);
  std::size_t first_zero = cells;
  for (std::size_t k = 0; k < cells; ++k) {
    g[k] = censoring.survival(grid[k]);
    if (!(g[k] > 0.0) && first_zero == cells) first_zero = k;
  }

  std::vector<CurveIntegrals> integrals(curves.size());
  std::vector<bool> used(curves.size(), false);
  for (auto c : curve_of) {
    if (c >= curves.size()) throw StructuralError("curve index out of range");
    used[c] = true;
  }
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (!used[c]) continue;
    auto& ci = integrals[c];
    ci.miss.assign(cells + 1, 0.0);
    ci.survive.assign(cells + 1, 0.0);
    ci.miss_rate.assign(cells, 0.0);
    ci.survive_rate.assign(cells, 0.0);
    for (std::size_t k = 0; k < cells; ++k) {
      const double s = curves[c].at(grid[k]);
      const double width = grid[k + 1] - grid[k];
      ci.miss_rate[k] = k < first_zero ? (1.0 - s) * (1.0 - s) / g[k] : 0.0;
      ci.survive_rate[k] = s * s;
      ci.miss[k + 1] = ci.miss[k] + ci.miss_rate[k] * width;
      ci.survive[k + 1] = ci.survive[k] + ci.survive_rate[k] * width;
    }
  }

  // Integral of a prefix array from the window start up to x in [lo, hi].
  auto prefix = [&](const std::vector<double>& acc, const std::vector<double>& rate, double x) {
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    auto k = static_cast<std::size_t>(it - grid.begin()) - 1;
    if (k >= cells) return acc[cells];
    return acc[k] + rate[k] * (x - grid[k]);
  };

  double total = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& ci = integrals[curve_of[i]];
    const double clipped = std::clamp(times[i], lo, hi);
    if (first_zero < cells && clipped > grid[first_zero]) {
      throw MetricError("censoring survival G is zero at t = " + time_text(grid[first_zero]));
    }
    total += prefix(ci.miss, ci.miss_rate, clipped);
    if (events[i] != 0 && clipped < hi) {
      const double weight = censoring.survival_before(times[i]);
      if (!(weight > 0.0)) {
        throw MetricError("censoring survival G is zero at t = " + time_text(times[i]));
      }
      total += (ci.survive[cells] - prefix(ci.survive, ci.survive_rate, clipped)) / weight;
    }
  }
  return total / (static_cast<double>(times.size()) * (hi - lo));
}

double integrated_brier(std::span<const double> times, std::span<const int> events,
                        std::span<const SurvivalCurve> curves, const EvalWindow& window,
                        const BaselineHazard& censoring) {
  std::vector<std::size_t> identity(curves.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  return integrated_brier(times, events, curves, identity, window, censoring);
}

double normalized_ib(double ib, double ib0) {
  if (!(ib0 > 0.0)) throw MetricError("normalized IB is undefined when the baseline score is zero");
  return 1.0 - ib / ib0;
}

}  // namespace survtree
