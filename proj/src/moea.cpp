#include "tct/moea.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "tct/errors.hpp"

namespace tct::moea {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool canonical_less(const Individual& a, const Individual& b) {
  if (a.point.duration != b.point.duration) return a.point.duration < b.point.duration;
  if (a.point.total_cost != b.point.total_cost) return a.point.total_cost < b.point.total_cost;
  return a.assignment < b.assignment;
}

double objective_distance2(const ObjectivePoint& a, const ObjectivePoint& b) {
  const double dd = static_cast<double>(a.duration) - static_cast<double>(b.duration);
  const double dc = a.total_cost.value() - b.total_cost.value();
  return dd * dd + dc * dc;
}

Assignment random_assignment(const ProjectNetwork& network, Rng& rng) {
  Assignment a;
  a.modes.resize(network.size());
  for (int i = 0; i < network.size(); ++i)
    a.modes[i] = static_cast<int>(rng.below(
        static_cast<std::uint32_t>(network.activity(i).modes.size())));
  return a;
}

Individual make_individual(const ProjectNetwork& network, Assignment a) {
  Individual ind;
  ind.point = evaluate(network, a);
  ind.assignment = std::move(a);
  return ind;
}

}  // namespace

std::string_view to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::Nsga2: return "nsga2";
    case AlgorithmId::Spea2: return "spea2";
    case AlgorithmId::Npga2: return "npga2";
    case AlgorithmId::Paes: return "paes";
  }
  return "?";
}

std::optional<AlgorithmId> parse_algorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (AlgorithmId id : kAllAlgorithms)
    if (lower == to_string(id)) return id;
  if (lower == "nsga-ii" || lower == "nsgaii") return AlgorithmId::Nsga2;
  if (lower == "spea-ii" || lower == "speaii") return AlgorithmId::Spea2;
  if (lower == "npga-ii" || lower == "npgaii") return AlgorithmId::Npga2;
  return std::nullopt;
}

void AlgorithmParams::validate() const {
  if (population_size < 2) throw ValidationError("population size must be at least 2");
  if (archive_size < 1) throw ValidationError("archive size must be positive");
  if (crossover_rate < 0.0 || crossover_rate > 1.0)
    throw ValidationError("crossover rate must be in [0, 1]");
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw ValidationError("mutation rate must be in [0, 1]");
  if (max_generations < 1) throw ValidationError("max generations must be positive");
  if (paes_grid_depth < 1 || paes_grid_depth > 15)
    throw ValidationError("grid depth must be in [1, 15]");
  if (npga2_comparison_set < 1) throw ValidationError("comparison set size must be positive");
  if (!(npga2_sigma_share > 0.0)) throw ValidationError("sigma share must be positive");
}

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  const bool af = a.feasible(), bf = b.feasible();
  if (af != bf) return af;
  if (af) {
    return a.duration <= b.duration && a.total_cost <= b.total_cost &&
           (a.duration < b.duration || a.total_cost < b.total_cost);
  }
  return a.violation < b.violation;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Individual> pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<int> domination_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(pop[i].point, pop[j].point)) {
        dominated_by[i].push_back(j);
        ++domination_count[j];
      } else if (dominates(pop[j].point, pop[i].point)) {
        dominated_by[j].push_back(i);
        ++domination_count[i];
      }
    }
  }
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (domination_count[i] == 0) current.push_back(i);
  while (!current.empty()) {
    fronts.push_back(current);
    std::vector<std::size_t> next;
    for (std::size_t i : current)
      for (std::size_t j : dominated_by[i])
        if (--domination_count[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Individual> front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  std::vector<std::size_t> order(n);
  for (int obj = 0; obj < 2; ++obj) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    // Total order so the result cannot depend on the input permutation.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (obj == 0 && front[a].point.duration != front[b].point.duration)
        return front[a].point.duration < front[b].point.duration;
      if (obj == 1 && front[a].point.total_cost != front[b].point.total_cost)
        return front[a].point.total_cost < front[b].point.total_cost;
      return canonical_less(front[a], front[b]);
    });
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    const double lo = obj == 0 ? front[order.front()].point.duration
                               : front[order.front()].point.total_cost.value();
    const double hi = obj == 0 ? front[order.back()].point.duration
                               : front[order.back()].point.total_cost.value();
    if (hi <= lo) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (dist[order[k]] == kInf) continue;
      const double prev = obj == 0 ? front[order[k - 1]].point.duration
                                   : front[order[k - 1]].point.total_cost.value();
      const double next = obj == 0 ? front[order[k + 1]].point.duration
                                   : front[order[k + 1]].point.total_cost.value();
      dist[order[k]] += (next - prev) / (hi - lo);
    }
  }
  return dist;
}

Spea2Fitness spea2_fitness(std::span<const Individual> population,
                           std::span<const Individual> archive) {
  std::vector<const Individual*> all;
  all.reserve(population.size() + archive.size());
  for (const Individual& i : population) all.push_back(&i);
  for (const Individual& i : archive) all.push_back(&i);
  const std::size_t n = all.size();
  if (n == 0) throw ValidationError("fitness of an empty set is undefined");

  Spea2Fitness out;
  out.strength.assign(n, 0);
  out.raw.assign(n, 0);
  out.density.assign(n, 0.0);
  out.fitness.assign(n, 0.0);

  std::vector<std::vector<std::size_t>> dominators(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(all[i]->point, all[j]->point)) {
        ++out.strength[i];
        dominators[j].push_back(i);
      }
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d : dominators[i]) out.raw[i] += out.strength[d];

  const std::size_t k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
  std::vector<double> dists(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      dists[j] = objective_distance2(all[i]->point, all[j]->point);
    std::sort(dists.begin(), dists.end());
    const double sigma_k = std::sqrt(dists[std::min(k, n - 1)]);
    out.density[i] = 1.0 / (sigma_k + 2.0);
    out.fitness[i] = out.raw[i] + out.density[i];
  }
  return out;
}

ObjectiveRanges ObjectiveRanges::of(std::span<const Individual> members) {
  ObjectiveRanges r;
  if (members.empty()) return r;
  int dur_min = members[0].point.duration, dur_max = dur_min;
  Money cost_min = members[0].point.total_cost, cost_max = cost_min;
  for (const Individual& m : members) {
    dur_min = std::min(dur_min, m.point.duration);
    dur_max = std::max(dur_max, m.point.duration);
    cost_min = std::min(cost_min, m.point.total_cost);
    cost_max = std::max(cost_max, m.point.total_cost);
  }
  r.duration = static_cast<double>(dur_max - dur_min);
  r.cost = (cost_max - cost_min).value();
  return r;
}

namespace {

double normalized_distance(const ObjectivePoint& a, const ObjectivePoint& b,
                           const ObjectiveRanges& ranges) {
  double d2 = 0.0;
  if (ranges.duration > 0.0) {
    const double dd = (a.duration - b.duration) / ranges.duration;
    d2 += dd * dd;
  }
  if (ranges.cost > 0.0) {
    const double dc = (a.total_cost - b.total_cost).value() / ranges.cost;
    d2 += dc * dc;
  }
  return std::sqrt(d2);
}

}  // namespace

double niche_count(const ObjectivePoint& z, std::span<const Individual> comparison,
                   double sigma_share, const ObjectiveRanges& ranges) {
  if (!(sigma_share > 0.0)) throw ValidationError("sigma share must be positive");
  double count = 0.0;
  for (const Individual& m : comparison) {
    const double d = normalized_distance(z, m.point, ranges);
    if (d < sigma_share) count += 1.0 - d / sigma_share;
  }
  return count;
}

std::vector<Individual> spea2_truncate(std::vector<Individual> archive, std::size_t capacity) {
  if (archive.size() <= capacity) return archive;

  const ObjectiveRanges ranges = ObjectiveRanges::of(archive);
  auto norm = [&](const Individual& m) -> std::array<double, 2> {
    return {ranges.duration > 0.0 ? m.point.duration / ranges.duration : 0.0,
            ranges.cost > 0.0 ? m.point.total_cost.value() / ranges.cost : 0.0};
  };

  // Best member per objective is pinned before clustering.
  std::size_t best_dur = 0, best_cost = 0;
  for (std::size_t i = 1; i < archive.size(); ++i) {
    if (archive[i].point.duration < archive[best_dur].point.duration ||
        (archive[i].point.duration == archive[best_dur].point.duration &&
         canonical_less(archive[i], archive[best_dur])))
      best_dur = i;
    if (archive[i].point.total_cost < archive[best_cost].point.total_cost ||
        (archive[i].point.total_cost == archive[best_cost].point.total_cost &&
         canonical_less(archive[i], archive[best_cost])))
      best_cost = i;
  }
  std::vector<std::size_t> pinned{best_dur};
  if (best_cost != best_dur) pinned.push_back(best_cost);
  while (pinned.size() > capacity) pinned.pop_back();

  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < archive.size(); ++i)
    if (std::find(pinned.begin(), pinned.end(), i) == pinned.end()) clusters.push_back({i});

  const std::size_t target = capacity - pinned.size();
  auto centroid = [&](const std::vector<std::size_t>& c) -> std::array<double, 2> {
    std::array<double, 2> s{0.0, 0.0};
    for (std::size_t i : c) {
      const auto p = norm(archive[i]);
      s[0] += p[0];
      s[1] += p[1];
    }
    s[0] /= static_cast<double>(c.size());
    s[1] /= static_cast<double>(c.size());
    return s;
  };

  if (target == 0) clusters.clear();
  while (clusters.size() > target) {
    std::size_t merge_a = 0, merge_b = 1;
    double best = kInf;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      const auto ca = centroid(clusters[a]);
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const auto cb = centroid(clusters[b]);
        const double d2 = (ca[0] - cb[0]) * (ca[0] - cb[0]) + (ca[1] - cb[1]) * (ca[1] - cb[1]);
        if (d2 < best) {
          best = d2;
          merge_a = a;
          merge_b = b;
        }
      }
    }
    auto& into = clusters[merge_a];
    into.insert(into.end(), clusters[merge_b].begin(), clusters[merge_b].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(merge_b));
  }

  std::vector<Individual> kept;
  kept.reserve(capacity);
  for (std::size_t i : pinned) kept.push_back(archive[i]);
  for (const auto& cluster : clusters) {
    const auto c = centroid(cluster);
    std::size_t rep = cluster.front();
    double best = kInf;
    for (std::size_t i : cluster) {
      const auto p = norm(archive[i]);
      const double d2 = (p[0] - c[0]) * (p[0] - c[0]) + (p[1] - c[1]) * (p[1] - c[1]);
      if (d2 < best || (d2 == best && canonical_less(archive[i], archive[rep]))) {
        best = d2;
        rep = i;
      }
    }
    kept.push_back(archive[rep]);
  }
  std::sort(kept.begin(), kept.end(), canonical_less);
  return kept;
}

GridBounds GridBounds::of(std::span<const Individual> members) {
  GridBounds b;
  if (members.empty()) return b;
  b.dur_min = b.dur_max = members[0].point.duration;
  b.cost_min = b.cost_max = members[0].point.total_cost.value();
  for (const Individual& m : members) {
    b.dur_min = std::min(b.dur_min, static_cast<double>(m.point.duration));
    b.dur_max = std::max(b.dur_max, static_cast<double>(m.point.duration));
    b.cost_min = std::min(b.cost_min, m.point.total_cost.value());
    b.cost_max = std::max(b.cost_max, m.point.total_cost.value());
  }
  return b;
}

std::uint32_t paes_grid_locate(const ObjectivePoint& z, const GridBounds& bounds, int depth) {
  if (depth < 1 || depth > 15) throw ValidationError("grid depth must be in [1, 15]");
  auto locate = [&](double v, double lo, double hi) -> std::uint32_t {
    std::uint32_t cell = 0;
    for (int level = 0; level < depth; ++level) {
      cell <<= 1;
      if (hi <= lo) continue;  // degenerate range: bit 0 at every level
      const double mid = (lo + hi) / 2.0;
      if (v >= mid) {
        cell |= 1;
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return cell;
  };
  const std::uint32_t dur_cell = locate(z.duration, bounds.dur_min, bounds.dur_max);
  const std::uint32_t cost_cell = locate(z.total_cost.value(), bounds.cost_min, bounds.cost_max);
  return (dur_cell << depth) | cost_cell;
}

std::pair<Assignment, Assignment> crossover_at(const Assignment& a, const Assignment& b,
                                               std::size_t i, std::size_t j) {
  Assignment c1 = a, c2 = b;
  for (std::size_t k = i; k < j; ++k) std::swap(c1.modes[k], c2.modes[k]);
  return {std::move(c1), std::move(c2)};
}

std::pair<Assignment, Assignment> crossover_two_point(const Assignment& a, const Assignment& b,
                                                      Rng& rng) {
  if (a.modes.size() != b.modes.size())
    throw ValidationError("crossover parents must have equal length");
  const auto n = static_cast<std::uint32_t>(a.modes.size());
  std::size_t i = rng.below(n + 1);
  std::size_t j = rng.below(n + 1);
  if (i > j) std::swap(i, j);
  return crossover_at(a, b, i, j);
}

Assignment mutate_mode_flip(const ProjectNetwork& network, const Assignment& a, double rate,
                            Rng& rng) {
  Assignment out = a;
  for (int i = 0; i < network.size(); ++i) {
    if (rng.unit() >= rate) continue;
    const auto n_modes = static_cast<std::uint32_t>(network.activity(i).modes.size());
    if (n_modes <= 1) continue;
    const std::uint32_t offset = 1 + rng.below(n_modes - 1);
    out.modes[i] = static_cast<int>((static_cast<std::uint32_t>(out.modes[i]) + offset) % n_modes);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Algorithm runs
// ---------------------------------------------------------------------------

namespace {

class Nsga2Run final : public AlgorithmRun {
 public:
  Nsga2Run(const ProjectNetwork& network, const AlgorithmParams& params)
      : network_(network), params_(params), rng_(params.seed) {
    pop_.reserve(params_.population_size);
    for (int i = 0; i < params_.population_size; ++i)
      pop_.push_back(make_individual(network_, random_assignment(network_, rng_)));
    annotate(pop_);
    refresh_front();
  }

  void step() override {
    std::vector<Individual> combined = pop_;
    combined.reserve(2 * pop_.size());
    while (combined.size() < 2 * pop_.size()) {
      const Individual& pa = tournament();
      const Individual& pb = tournament();
      auto [c1, c2] = variate(pa.assignment, pb.assignment);
      combined.push_back(make_individual(network_, std::move(c1)));
      if (combined.size() < 2 * pop_.size())
        combined.push_back(make_individual(network_, std::move(c2)));
    }
    pop_ = environmental_selection(std::move(combined));
    ++generation_;
    refresh_front();
  }

  std::span<const Individual> front() const override { return front_; }

 private:
  const Individual& tournament() {
    const auto n = static_cast<std::uint32_t>(pop_.size());
    const Individual& a = pop_[rng_.below(n)];
    const Individual& b = pop_[rng_.below(n)];
    if (a.rank != b.rank) return a.rank < b.rank ? a : b;
    return b.crowding > a.crowding ? b : a;
  }

  std::pair<Assignment, Assignment> variate(const Assignment& a, const Assignment& b) {
    auto [c1, c2] = rng_.unit() < params_.crossover_rate
                        ? crossover_two_point(a, b, rng_)
                        : std::pair<Assignment, Assignment>(a, b);
    return {mutate_mode_flip(network_, c1, params_.mutation_rate, rng_),
            mutate_mode_flip(network_, c2, params_.mutation_rate, rng_)};
  }

  std::vector<std::vector<std::size_t>> annotate(std::vector<Individual>& members) {
    auto fronts = fast_nondominated_sort(members);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
      std::vector<Individual> view;
      view.reserve(fronts[f].size());
      for (std::size_t i : fronts[f]) view.push_back(members[i]);
      const auto dist = crowding_distance(view);
      for (std::size_t k = 0; k < fronts[f].size(); ++k) {
        members[fronts[f][k]].rank = static_cast<int>(f);
        members[fronts[f][k]].crowding = dist[k];
      }
    }
    return fronts;
  }

  std::vector<Individual> environmental_selection(std::vector<Individual> combined) {
    const auto fronts = annotate(combined);
    std::vector<Individual> next;
    next.reserve(params_.population_size);
    for (const auto& front : fronts) {
      if (next.size() == static_cast<std::size_t>(params_.population_size)) break;
      if (next.size() + front.size() <= static_cast<std::size_t>(params_.population_size)) {
        for (std::size_t i : front) next.push_back(combined[i]);
        continue;
      }
      std::vector<std::size_t> order(front.begin(), front.end());
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return combined[a].crowding > combined[b].crowding;
      });
      for (std::size_t i : order) {
        if (next.size() == static_cast<std::size_t>(params_.population_size)) break;
        next.push_back(combined[i]);
      }
    }
    return next;
  }

  void refresh_front() {
    front_.clear();
    for (const Individual& m : pop_)
      if (m.rank == 0) front_.push_back(m);
  }

  const ProjectNetwork& network_;
  AlgorithmParams params_;
  Rng rng_;
  std::vector<Individual> pop_;
  std::vector<Individual> front_;
};

class Spea2Run final : public AlgorithmRun {
 public:
  Spea2Run(const ProjectNetwork& network, const AlgorithmParams& params)
      : network_(network), params_(params), rng_(params.seed) {
    pop_.reserve(params_.population_size);
    for (int i = 0; i < params_.population_size; ++i)
      pop_.push_back(make_individual(network_, random_assignment(network_, rng_)));
    refresh_front();
  }

  void step() override {
    const Spea2Fitness fit = spea2_fitness(pop_, archive_);
    std::vector<Individual> combined = pop_;
    combined.insert(combined.end(), archive_.begin(), archive_.end());
    for (std::size_t i = 0; i < combined.size(); ++i) combined[i].fitness = fit.fitness[i];

    std::vector<Individual> next;
    for (std::size_t i = 0; i < combined.size(); ++i)
      if (fit.raw[i] == 0) next.push_back(combined[i]);
    const auto capacity = static_cast<std::size_t>(params_.archive_size);
    if (next.size() > capacity) {
      next = spea2_truncate(std::move(next), capacity);
    } else if (next.size() < capacity) {
      std::vector<std::size_t> dominated;
      for (std::size_t i = 0; i < combined.size(); ++i)
        if (fit.raw[i] != 0) dominated.push_back(i);
      std::stable_sort(dominated.begin(), dominated.end(), [&](std::size_t a, std::size_t b) {
        return combined[a].fitness < combined[b].fitness;
      });
      for (std::size_t i : dominated) {
        if (next.size() == capacity) break;
        next.push_back(combined[i]);
      }
    }
    archive_ = std::move(next);

    std::vector<Individual> offspring;
    offspring.reserve(params_.population_size);
    while (offspring.size() < static_cast<std::size_t>(params_.population_size)) {
      const Individual& pa = tournament();
      const Individual& pb = tournament();
      auto [c1, c2] = rng_.unit() < params_.crossover_rate
                          ? crossover_two_point(pa.assignment, pb.assignment, rng_)
                          : std::pair<Assignment, Assignment>(pa.assignment, pb.assignment);
      offspring.push_back(make_individual(
          network_, mutate_mode_flip(network_, c1, params_.mutation_rate, rng_)));
      if (offspring.size() < static_cast<std::size_t>(params_.population_size))
        offspring.push_back(make_individual(
            network_, mutate_mode_flip(network_, c2, params_.mutation_rate, rng_)));
    }
    pop_ = std::move(offspring);
    ++generation_;
    refresh_front();
  }

  std::span<const Individual> front() const override { return front_; }

 private:
  const Individual& tournament() {
    const auto n = static_cast<std::uint32_t>(archive_.size());
    const Individual& a = archive_[rng_.below(n)];
    const Individual& b = archive_[rng_.below(n)];
    return b.fitness < a.fitness ? b : a;
  }

  void refresh_front() {
    const std::span<const Individual> base = archive_.empty() ? std::span<const Individual>(pop_)
                                                              : std::span<const Individual>(archive_);
    front_.clear();
    for (const Individual& m : base) {
      bool dominated = false;
      for (const Individual& o : base)
        if (dominates(o.point, m.point)) {
          dominated = true;
          break;
        }
      if (!dominated) front_.push_back(m);
    }
  }

  const ProjectNetwork& network_;
  AlgorithmParams params_;
  Rng rng_;
  std::vector<Individual> pop_;
  std::vector<Individual> archive_;
  std::vector<Individual> front_;
};

class Npga2Run final : public AlgorithmRun {
 public:
  Npga2Run(const ProjectNetwork& network, const AlgorithmParams& params)
      : network_(network), params_(params), rng_(params.seed) {
    pop_.reserve(params_.population_size);
    for (int i = 0; i < params_.population_size; ++i)
      pop_.push_back(make_individual(network_, random_assignment(network_, rng_)));
    refresh_front();
  }

  void step() override {
    const auto n = static_cast<std::size_t>(params_.population_size);
    const ObjectiveRanges pop_ranges = ObjectiveRanges::of(pop_);

    // Tournament selection with domination checks against a sampled
    // comparison set; ties resolve by the sharing niche count against the
    // partially filled pool (continuously updated).
    std::vector<Individual> pool;
    pool.reserve(n);
    while (pool.size() < n) {
      const Individual& a = pop_[rng_.below(static_cast<std::uint32_t>(pop_.size()))];
      const Individual& b = pop_[rng_.below(static_cast<std::uint32_t>(pop_.size()))];
      bool a_dominated = false, b_dominated = false;
      for (int s = 0; s < params_.npga2_comparison_set; ++s) {
        const Individual& c = pop_[rng_.below(static_cast<std::uint32_t>(pop_.size()))];
        a_dominated = a_dominated || dominates(c.point, a.point);
        b_dominated = b_dominated || dominates(c.point, b.point);
      }
      const Individual* winner;
      if (a_dominated != b_dominated) {
        winner = a_dominated ? &b : &a;
      } else {
        const double na = niche_count(a.point, pool, params_.npga2_sigma_share, pop_ranges);
        const double nb = niche_count(b.point, pool, params_.npga2_sigma_share, pop_ranges);
        if (na != nb)
          winner = na < nb ? &a : &b;
        else
          winner = rng_.below(2) == 0 ? &a : &b;
      }
      pool.push_back(*winner);
    }

    std::vector<Individual> offspring;
    offspring.reserve(n);
    for (std::size_t i = 0; i + 1 < pool.size(); i += 2) {
      auto [c1, c2] = rng_.unit() < params_.crossover_rate
                          ? crossover_two_point(pool[i].assignment, pool[i + 1].assignment, rng_)
                          : std::pair<Assignment, Assignment>(pool[i].assignment,
                                                              pool[i + 1].assignment);
      offspring.push_back(make_individual(
          network_, mutate_mode_flip(network_, c1, params_.mutation_rate, rng_)));
      if (offspring.size() < n)
        offspring.push_back(make_individual(
            network_, mutate_mode_flip(network_, c2, params_.mutation_rate, rng_)));
    }
    while (offspring.size() < n)
      offspring.push_back(make_individual(
          network_,
          mutate_mode_flip(network_, pool.back().assignment, params_.mutation_rate, rng_)));

    // Elitist reduction of parents plus offspring: whole fronts first, the
    // splitting front thinned by repeatedly taking the least-niched member
    // against the partially filled next generation.
    std::vector<Individual> combined = std::move(pop_);
    combined.insert(combined.end(), offspring.begin(), offspring.end());
    const ObjectiveRanges all_ranges = ObjectiveRanges::of(combined);
    const auto fronts = fast_nondominated_sort(combined);
    std::vector<Individual> next;
    next.reserve(n);
    for (std::size_t f = 0; f < fronts.size() && next.size() < n; ++f) {
      if (next.size() + fronts[f].size() <= n) {
        for (std::size_t i : fronts[f]) {
          combined[i].rank = static_cast<int>(f);
          next.push_back(combined[i]);
        }
        continue;
      }
      std::vector<std::size_t> remaining(fronts[f].begin(), fronts[f].end());
      std::vector<double> counts(remaining.size());
      for (std::size_t k = 0; k < remaining.size(); ++k)
        counts[k] = niche_count(combined[remaining[k]].point, next, params_.npga2_sigma_share,
                                all_ranges);
      while (next.size() < n) {
        std::size_t pick = 0;
        for (std::size_t k = 1; k < remaining.size(); ++k) {
          if (counts[k] < counts[pick] ||
              (counts[k] == counts[pick] &&
               canonical_less(combined[remaining[k]], combined[remaining[pick]])))
            pick = k;
        }
        Individual chosen = combined[remaining[pick]];
        chosen.rank = static_cast<int>(f);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        counts.erase(counts.begin() + static_cast<std::ptrdiff_t>(pick));
        for (std::size_t k = 0; k < remaining.size(); ++k) {
          const double d = normalized_distance(combined[remaining[k]].point, chosen.point,
                                               all_ranges);
          if (d < params_.npga2_sigma_share) counts[k] += 1.0 - d / params_.npga2_sigma_share;
        }
        next.push_back(std::move(chosen));
      }
    }
    pop_ = std::move(next);
    ++generation_;
    refresh_front();
  }

  std::span<const Individual> front() const override { return front_; }

 private:
  void refresh_front() {
    front_.clear();
    for (const Individual& m : pop_) {
      bool dominated = false;
      for (const Individual& o : pop_)
        if (dominates(o.point, m.point)) {
          dominated = true;
          break;
        }
      if (!dominated) front_.push_back(m);
    }
  }

  const ProjectNetwork& network_;
  AlgorithmParams params_;
  Rng rng_;
  std::vector<Individual> pop_;
  std::vector<Individual> front_;
};

class PaesRun final : public AlgorithmRun {
 public:
  PaesRun(const ProjectNetwork& network, const AlgorithmParams& params)
      : network_(network), params_(params), rng_(params.seed) {
    current_ = make_individual(network_, random_assignment(network_, rng_));
    archive_.push_back(current_);
  }

  void step() override {
    for (int trial = 0; trial < params_.population_size; ++trial) {
      Individual mutant = make_individual(
          network_, mutate_mode_flip(network_, current_.assignment, params_.mutation_rate, rng_));
      if (dominates(current_.point, mutant.point)) continue;
      if (dominates(mutant.point, current_.point)) {
        try_archive(mutant);
        current_ = std::move(mutant);
        continue;
      }
      bool dominated = false;
      for (const Individual& a : archive_)
        if (dominates(a.point, mutant.point)) {
          dominated = true;
          break;
        }
      if (dominated) continue;
      try_archive(mutant);
      if (no_more_crowded_than(mutant.point, current_.point)) current_ = std::move(mutant);
    }
    ++generation_;
  }

  std::span<const Individual> front() const override { return archive_; }

 private:
  void try_archive(const Individual& mutant) {
    for (const Individual& a : archive_)
      if (dominates(a.point, mutant.point)) return;
    std::erase_if(archive_, [&](const Individual& a) {
      return dominates(mutant.point, a.point);
    });
    for (const Individual& a : archive_)
      if (a.point.same_objectives(mutant.point) && a.assignment == mutant.assignment) return;
    if (archive_.size() < static_cast<std::size_t>(params_.archive_size)) {
      archive_.push_back(mutant);
      return;
    }
    // Full archive: the mutant replaces a member of a most crowded cell if
    // its own cell is less crowded.
    const GridBounds bounds = bounds_with(mutant.point);
    std::vector<std::uint32_t> cells(archive_.size());
    std::size_t max_count = 0;
    for (std::size_t i = 0; i < archive_.size(); ++i)
      cells[i] = paes_grid_locate(archive_[i].point, bounds, params_.paes_grid_depth);
    const std::uint32_t mutant_cell =
        paes_grid_locate(mutant.point, bounds, params_.paes_grid_depth);
    std::size_t mutant_count = 0;
    for (std::uint32_t c : cells) {
      std::size_t cnt = 0;
      for (std::uint32_t o : cells)
        if (o == c) ++cnt;
      max_count = std::max(max_count, cnt);
    }
    for (std::uint32_t c : cells)
      if (c == mutant_cell) ++mutant_count;
    if (mutant_count < max_count) {
      for (std::size_t i = 0; i < archive_.size(); ++i) {
        std::size_t cnt = 0;
        for (std::uint32_t o : cells)
          if (o == cells[i]) ++cnt;
        if (cnt == max_count) {
          archive_[i] = mutant;
          break;
        }
      }
    }
  }

  GridBounds bounds_with(const ObjectivePoint& extra) const {
    GridBounds b = GridBounds::of(archive_);
    b.dur_min = std::min(b.dur_min, static_cast<double>(extra.duration));
    b.dur_max = std::max(b.dur_max, static_cast<double>(extra.duration));
    b.cost_min = std::min(b.cost_min, extra.total_cost.value());
    b.cost_max = std::max(b.cost_max, extra.total_cost.value());
    return b;
  }

  // Both points located under one shared grid so the comparison is fair. The
  // comparison is non-strict: an equally crowded mutant replaces the current
  // solution, which keeps the (1+1) walk drifting along the front instead of
  // pinning it at the first corner it reaches.
  bool no_more_crowded_than(const ObjectivePoint& a, const ObjectivePoint& b) const {
    GridBounds bounds = bounds_with(a);
    bounds.dur_min = std::min(bounds.dur_min, static_cast<double>(b.duration));
    bounds.dur_max = std::max(bounds.dur_max, static_cast<double>(b.duration));
    bounds.cost_min = std::min(bounds.cost_min, b.total_cost.value());
    bounds.cost_max = std::max(bounds.cost_max, b.total_cost.value());
    const std::uint32_t cell_a = paes_grid_locate(a, bounds, params_.paes_grid_depth);
    const std::uint32_t cell_b = paes_grid_locate(b, bounds, params_.paes_grid_depth);
    std::size_t count_a = 0, count_b = 0;
    for (const Individual& m : archive_) {
      const std::uint32_t c = paes_grid_locate(m.point, bounds, params_.paes_grid_depth);
      if (c == cell_a) ++count_a;
      if (c == cell_b) ++count_b;
    }
    return count_a <= count_b;
  }

  const ProjectNetwork& network_;
  AlgorithmParams params_;
  Rng rng_;
  Individual current_;
  std::vector<Individual> archive_;
};

}  // namespace

std::unique_ptr<AlgorithmRun> AlgorithmRun::create(AlgorithmId id, const ProjectNetwork& network,
                                                   const AlgorithmParams& params) {
  params.validate();
  switch (id) {
    case AlgorithmId::Nsga2: return std::make_unique<Nsga2Run>(network, params);
    case AlgorithmId::Spea2: return std::make_unique<Spea2Run>(network, params);
    case AlgorithmId::Npga2: return std::make_unique<Npga2Run>(network, params);
    case AlgorithmId::Paes: return std::make_unique<PaesRun>(network, params);
  }
  throw ValidationError("unknown algorithm id");
}

RunResult run_algorithm(AlgorithmId id, const ProjectNetwork& network,
                        const AlgorithmParams& params, const StopHook& stop_hook) {
  auto run = AlgorithmRun::create(id, network, params);
  while (run->generation() < params.max_generations) {
    run->step();
    if (stop_hook && stop_hook(run->front(), run->generation())) break;
  }
  return {to_archive(run->front()), run->generation()};
}

ParetoArchive to_archive(std::span<const Individual> front) {
  std::vector<ParetoEntry> entries;
  entries.reserve(front.size());
  for (const Individual& m : front) entries.push_back({m.assignment, m.point});
  return ParetoArchive::from_filtered(std::move(entries));
}

ParetoArchive merge_fronts(std::span<const std::span<const Individual>> fronts) {
  std::vector<Individual> all;
  for (const auto& f : fronts) all.insert(all.end(), f.begin(), f.end());
  std::vector<ParetoEntry> kept;
  for (const Individual& m : all) {
    bool dominated = false;
    for (const Individual& o : all)
      if (dominates(o.point, m.point)) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back({m.assignment, m.point});
  }
  return ParetoArchive::from_filtered(std::move(kept));
}

}  // namespace tct::moea
