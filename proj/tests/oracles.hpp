// Independent reference implementations used by the tests. Everything here
// is written for clarity over speed and shares no code with the library
// beyond the data containers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "survtree/dataset.hpp"
#include "survtree/feature_vector.hpp"

namespace oracle {

// Nelson-Aalen cumulative hazard at t, straight from the definition.
inline double nelson_aalen(const std::vector<double>& times, const std::vector<int>& events,
                           double t) {
  std::vector<double> event_times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i] && times[i] <= t) event_times.push_back(times[i]);
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  double sum = 0.0;
  for (double s : event_times) {
    double d = 0, n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= s) ++n;
      if (times[i] == s && events[i]) ++d;
    }
    sum += d / n;
  }
  return sum;
}

inline double kaplan_meier(const std::vector<double>& times, const std::vector<int>& events,
                           double t) {
  std::vector<double> event_times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i] && times[i] <= t) event_times.push_back(times[i]);
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  double s = 1.0;
  for (double e : event_times) {
    double d = 0, n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= e) ++n;
      if (times[i] == e && events[i]) ++d;
    }
    s *= 1.0 - d / n;
  }
  return s;
}

// Optimal proportional-hazard loss of one leaf, from per-instance terms.
// hazards[i] is the baseline cumulative hazard at instance i's time.
inline double leaf_loss(const std::vector<double>& hazards, const std::vector<int>& events,
                        const std::vector<std::size_t>& members) {
  double es = 0, hs = 0;
  for (auto i : members) {
    es += events[i];
    hs += hazards[i];
  }
  if (es == 0) return 0.0;  // infimum as theta -> 0
  const double theta = es / hs;
  double loss = 0.0;
  for (auto i : members) {
    loss += theta * hazards[i];
    if (events[i]) loss -= std::log(theta * hazards[i]) + 1.0;
  }
  return std::max(loss, 0.0);
}

// Exhaustive search over every tree shape with depth <= 2 and at most
// `nodes` (<= 3) branching nodes, and every feature assignment.
inline double brute_force(const survtree::Dataset& data, int depth, int nodes) {
  const std::size_t n = data.size();
  const std::size_t f_count = data.feature_count();
  std::vector<double> hazards(n);
  std::vector<int> events(n);
  for (std::size_t i = 0; i < n; ++i) {
    hazards[i] = data.hazard(i);
    events[i] = data[i].event;
  }
  auto filter = [&](const std::vector<std::size_t>& in, std::size_t f, bool value) {
    std::vector<std::size_t> out;
    for (auto i : in) {
      if (data[i].features[f] == value) out.push_back(i);
    }
    return out;
  };
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  double best = leaf_loss(hazards, events, all);
  if (depth < 1 || nodes < 1) return best;
  for (std::size_t r = 0; r < f_count; ++r) {
    const auto left = filter(all, r, false);
    const auto right = filter(all, r, true);
    if (left.empty() || right.empty()) continue;
    const double ll = leaf_loss(hazards, events, left);
    const double rl = leaf_loss(hazards, events, right);
    best = std::min(best, ll + rl);
    if (depth < 2 || nodes < 2) continue;
    for (std::size_t a = 0; a < f_count; ++a) {
      const auto l0 = filter(left, a, false), l1 = filter(left, a, true);
      const bool left_ok = !l0.empty() && !l1.empty();
      const auto r0 = filter(right, a, false), r1 = filter(right, a, true);
      const bool right_ok = !r0.empty() && !r1.empty();
      const double left_split =
          left_ok ? leaf_loss(hazards, events, l0) + leaf_loss(hazards, events, l1) : INFINITY;
      const double right_split =
          right_ok ? leaf_loss(hazards, events, r0) + leaf_loss(hazards, events, r1) : INFINITY;
      best = std::min(best, left_split + rl);
      best = std::min(best, ll + right_split);
      if (nodes < 3) continue;
      for (std::size_t b = 0; b < f_count; ++b) {
        const auto s0 = filter(right, b, false), s1 = filter(right, b, true);
        if (!left_ok || s0.empty() || s1.empty()) continue;
        best = std::min(best, left_split + leaf_loss(hazards, events, s0) +
                                  leaf_loss(hazards, events, s1));
      }
    }
  }
  return best;
}

// Pairwise concordance: counts of (concordant, discordant, tied) pairs.
struct Pairs {
  double concordant = 0, discordant = 0, tied = 0;
};

inline Pairs concordance(const std::vector<double>& times, const std::vector<int>& events,
                         const std::vector<double>& risk) {
  Pairs p;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!events[i]) continue;
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (!(times[i] < times[j])) continue;
      if (risk[i] > risk[j]) ++p.concordant;
      else if (risk[i] < risk[j]) ++p.discordant;
      else ++p.tied;
    }
  }
  return p;
}

// Integrated Brier score by the midpoint rule. `survival(i, t)` gives the
// prediction for instance i, `g(t)` and `g_before(t)` the censoring survival
// and its left limit.
template <typename S, typename G, typename GB>
double brier_quadrature(const std::vector<double>& times, const std::vector<int>& events, S survival,
                        G g, GB g_before, double lower, double upper, int points) {
  const double h = (upper - lower) / points;
  double integral = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = lower + (k + 0.5) * h;
    double bs = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double s = survival(i, t);
      if (times[i] <= t && events[i]) bs += s * s / g_before(times[i]);
      else if (times[i] > t) bs += (1 - s) * (1 - s) / g(t);
    }
    integral += bs / times.size() * h;
  }
  return integral / (upper - lower);
}

// Smallest candidate k_j = t_j / (1 - u_j^2) (scanning all of them) with at
// most floor(c n) candidates strictly above it.
inline double censoring_k(const std::vector<double>& t, const std::vector<double>& u, double c) {
  const std::size_t n = t.size();
  const std::size_t budget = static_cast<std::size_t>(std::floor(c * n + 1e-9));
  std::vector<double> candidates;
  for (std::size_t i = 0; i < n; ++i) candidates.push_back(t[i] / (1 - u[i] * u[i]));
  double best = std::numeric_limits<double>::infinity();
  for (double k : candidates) {
    std::size_t censored = 0;
    for (double other : candidates) censored += k < other;
    if (censored <= budget) best = std::min(best, k);
  }
  return best;
}

// Random survival dataset with binary features; times drawn from a small
// lattice so ties occur.
inline survtree::Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t features,
                                        int time_levels = 20) {
  std::uniform_int_distribution<int> time_dist(1, time_levels);
  std::bernoulli_distribution event(0.6);
  std::uniform_real_distribution<double> density(0.1, 0.9);
  std::vector<double> p(features);
  for (auto& x : p) x = density(rng);
  std::vector<survtree::Instance> rows;
  for (std::size_t i = 0; i < n; ++i) {
    survtree::FeatureVector fv(features);
    for (std::size_t f = 0; f < features; ++f) fv.set(f, std::bernoulli_distribution(p[f])(rng));
    rows.push_back({static_cast<double>(time_dist(rng)), event(rng), fv});
  }
  rows[0].event = true;  // at least one event
  return survtree::Dataset(std::move(rows), features);
}

}  // namespace oracle

#include "survtree/solver.hpp"

namespace oracle {

inline survtree::SolverConfig budget(int depth, int nodes) {
  survtree::SolverConfig c;
  c.max_depth = depth;
  c.max_nodes = nodes;
  return c;
}

}  // namespace oracle
