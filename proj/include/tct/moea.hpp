#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tct/core.hpp"
#include "tct/rng.hpp"

namespace tct::moea {

enum class AlgorithmId { Nsga2, Spea2, Npga2, Paes };

inline constexpr std::array<AlgorithmId, 4> kAllAlgorithms = {
    AlgorithmId::Nsga2, AlgorithmId::Spea2, AlgorithmId::Npga2, AlgorithmId::Paes};

std::string_view to_string(AlgorithmId id);
std::optional<AlgorithmId> parse_algorithm(std::string_view name);

/// Shared parameter block. Every constituent of a portfolio runs with the
/// same values so that per-iteration budgets are comparable: one iteration
/// is one generation for the population algorithms and population_size
/// mutation trials for the (1+1) strategy.
struct AlgorithmParams {
  int population_size = 100;
  int archive_size = 100;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;
  int max_generations = 500;
  int paes_grid_depth = 5;
  int npga2_comparison_set = 10;
  double npga2_sigma_share = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// A candidate solution with its objective image and the per-algorithm
/// scratch the loops annotate (rank, crowding, strength fitness, niche
/// count, grid cell). Objectives are re-evaluated whenever the assignment
/// changes.
struct Individual {
  Assignment assignment;
  ObjectivePoint point;

  int rank = 0;
  double crowding = 0.0;
  double fitness = 0.0;
  double niche = 0.0;
  std::uint32_t grid_cell = 0;
};

/// Constrained dominance under minimization: a feasible point dominates any
/// infeasible one; two feasible points compare component-wise with at least
/// one strict inequality; two infeasible points compare by total constraint
/// violation.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

/// Partition into non-dominated fronts F1, F2, ... (index lists into the
/// input). O(N^2) dominance comparisons.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Individual> pop);

/// Crowding distances for one mutually non-dominated front. Boundary members
/// per objective get +inf; fronts of size 1 or 2 are all +inf. Independent of
/// input permutation.
std::vector<double> crowding_distance(std::span<const Individual> front);

struct Spea2Fitness {
  std::vector<int> strength;      // count of members each one dominates
  std::vector<int> raw;           // sum of dominators' strengths
  std::vector<double> density;    // 1 / (kth nearest distance + 2)
  std::vector<double> fitness;    // raw + density; non-dominated iff < 1
};

/// Strength/raw/density fitness over the combined population and archive
/// (combined order: population first). k = floor(sqrt(total)).
Spea2Fitness spea2_fitness(std::span<const Individual> population,
                           std::span<const Individual> archive);

/// Prunes a mutually non-dominated archive to `capacity` members by merging
/// the closest clusters (centroid distance in range-normalized objective
/// space) and keeping each final cluster's member nearest its centroid. The
/// best member per objective is always retained.
std::vector<Individual> spea2_truncate(std::vector<Individual> archive, std::size_t capacity);

/// Objective ranges used to normalize distances; zero ranges drop that
/// objective from the distance.
struct ObjectiveRanges {
  double duration = 1.0;
  double cost = 1.0;

  static ObjectiveRanges of(std::span<const Individual> members);
};

/// Sharing-kernel niche count of `z` against a comparison set: the sum of
/// 1 - d/sigma over members closer than sigma in normalized objective space.
double niche_count(const ObjectivePoint& z, std::span<const Individual> comparison,
                   double sigma_share, const ObjectiveRanges& ranges);

struct GridBounds {
  double dur_min = 0.0, dur_max = 0.0;
  double cost_min = 0.0, cost_max = 0.0;

  static GridBounds of(std::span<const Individual> members);
};

/// Adaptive-grid cell of a point: each objective range is bisected `depth`
/// times, giving a 2*depth-bit cell id. A degenerate objective contributes
/// cell 0 at every level.
std::uint32_t paes_grid_locate(const ObjectivePoint& z, const GridBounds& bounds, int depth);

/// Segment swap between the cut points (exposed for tests).
std::pair<Assignment, Assignment> crossover_at(const Assignment& a, const Assignment& b,
                                               std::size_t i, std::size_t j);

/// Two-point crossover with uniformly drawn cut points i <= j.
std::pair<Assignment, Assignment> crossover_two_point(const Assignment& a, const Assignment& b,
                                                      Rng& rng);

/// Per-locus mode resampling: with probability `rate` a locus is redrawn
/// uniformly among the activity's other modes (no-op for single-mode
/// activities).
Assignment mutate_mode_flip(const ProjectNetwork& network, const Assignment& a, double rate,
                            Rng& rng);

/// One stepwise algorithm execution. step() advances one iteration; front()
/// is the current non-dominated set, refreshed at every iteration boundary.
/// Runs are deterministic functions of (algorithm, network, params).
class AlgorithmRun {
 public:
  static std::unique_ptr<AlgorithmRun> create(AlgorithmId id, const ProjectNetwork& network,
                                              const AlgorithmParams& params);
  virtual ~AlgorithmRun() = default;

  virtual void step() = 0;
  virtual std::span<const Individual> front() const = 0;
  int generation() const { return generation_; }

 protected:
  int generation_ = 0;
};

/// Consulted once per iteration with the current non-dominated set; a true
/// return stops the run. Must not mutate shared state.
using StopHook = std::function<bool(std::span<const Individual>, int generation)>;

struct RunResult {
  ParetoArchive archive;
  int generations = 0;
};

/// Runs an algorithm until the hook stops it or max_generations is reached.
RunResult run_algorithm(AlgorithmId id, const ProjectNetwork& network,
                        const AlgorithmParams& params, const StopHook& stop_hook = {});

/// Canonical archive from a non-dominated member set.
ParetoArchive to_archive(std::span<const Individual> front);

/// Constrained-dominance merge of several fronts into one canonical archive.
ParetoArchive merge_fronts(std::span<const std::span<const Individual>> fronts);

}  // namespace tct::moea
