#pragma once

#include <string>
#include <vector>

#include "tct/core.hpp"
#include "tct/instance_io.hpp"
#include "tct/moea.hpp"
#include "tct/quality.hpp"
#include "tct/rng.hpp"

namespace tct::test {

inline Money usd(const char* text) { return Money::parse(text); }

/// Single activity with the given modes.
inline ProjectNetwork single_activity(std::vector<ExecutionMode> modes,
                                      Money indirect = Money(),
                                      std::optional<int> t_max = std::nullopt,
                                      std::optional<Money> c_max = std::nullopt) {
  Activity a;
  a.id = 1;
  a.modes = std::move(modes);
  return ProjectNetwork({a}, indirect, t_max, c_max);
}

/// 1 -> {2,3} -> 4 diamond with two modes per activity.
inline ProjectNetwork diamond_network() {
  auto mk = [](int id, std::vector<int> succ) {
    Activity a;
    a.id = id;
    a.successors = std::move(succ);
    return a;
  };
  Activity a1 = mk(1, {2, 3}), a2 = mk(2, {4}), a3 = mk(3, {4}), a4 = mk(4, {});
  a1.modes = {{3, usd("300")}, {5, usd("180")}};
  a2.modes = {{4, usd("220")}, {7, usd("120")}};
  a3.modes = {{2, usd("150")}, {6, usd("90")}};
  a4.modes = {{1, usd("80")}, {2, usd("60")}};
  return ProjectNetwork({a1, a2, a3, a4}, usd("10"), std::nullopt, std::nullopt);
}

/// Small random instance, enumerable by construction.
inline ProjectNetwork small_random_instance(std::uint64_t seed, int n = 6) {
  GeneratorParams p;
  p.n_activities = n;
  p.min_modes = 2;
  p.max_modes = 3;
  p.density = 0.35;
  p.seed = seed;
  return generate_instance(p);
}

inline ObjectivePoint point(int duration, const char* cost, bool feas_time = true,
                            bool feas_cost = true, double violation = 0.0) {
  ObjectivePoint z;
  z.duration = duration;
  z.total_cost = usd(cost);
  z.feasible_time = feas_time;
  z.feasible_cost = feas_cost;
  z.violation = violation;
  return z;
}

inline moea::Individual individual(int duration, const char* cost) {
  moea::Individual ind;
  ind.point = point(duration, cost);
  return ind;
}

/// Independent O(MN^3) front partition: the first front is found by comparing
/// every member against every other; previous fronts are set aside and the
/// scan repeats.
inline std::vector<std::vector<std::size_t>> naive_nondominated_sort(
    std::span<const moea::Individual> pop) {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<bool> assigned(pop.size(), false);
  std::size_t remaining = pop.size();
  while (remaining > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (assigned[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pop.size(); ++j) {
        if (j == i || assigned[j]) continue;
        if (moea::dominates(pop[j].point, pop[i].point)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) front.push_back(i);
    }
    for (std::size_t i : front) assigned[i] = true;
    remaining -= front.size();
    fronts.push_back(std::move(front));
  }
  return fronts;
}

/// Plain-double reimplementation of the AQ pipeline, structured as the naive
/// double loop over (weight vector, archive point).
inline double naive_average_quality(const ParetoArchive& archive,
                                    const quality::ReferenceFrame& frame,
                                    const quality::WeightVectorSet& weights) {
  const double pi_dur = 1.0 / static_cast<double>(frame.duration_den());
  const double pi_cost = 100.0 / static_cast<double>(frame.cost_den_cents());
  const double rho =
      static_cast<double>(frame.rho_num) / static_cast<double>(frame.rho_den);
  double total = 0.0;
  for (std::size_t w = 0; w < weights.size(); ++w) {
    const auto lambda = weights.as_doubles(w);
    double best = std::numeric_limits<double>::infinity();
    for (const ParetoEntry& e : archive.entries()) {
      const double d_dur =
          lambda[0] * pi_dur * (e.point.duration - static_cast<double>(frame.ref_duration));
      const double d_cost =
          lambda[1] * pi_cost * (e.point.total_cost.value() - frame.ref_cost.value());
      const double value = std::max(d_dur, d_cost) + rho * (d_dur + d_cost);
      best = std::min(best, value);
    }
    total += best;
  }
  return total / static_cast<double>(weights.size());
}

/// Exhaustive list of every assignment of an enumerable instance.
inline std::vector<Assignment> all_assignments(const ProjectNetwork& network) {
  std::vector<Assignment> out;
  Assignment a;
  a.modes.assign(network.size(), 0);
  for (;;) {
    out.push_back(a);
    int i = 0;
    for (; i < network.size(); ++i) {
      if (++a.modes[i] < static_cast<int>(network.activity(i).modes.size())) break;
      a.modes[i] = 0;
    }
    if (i == network.size()) break;
  }
  return out;
}

}  // namespace tct::test
