#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tct/core.hpp"

namespace tct::quality {

/// Lattice sample of normalized weight vectors: every vector has entries
/// k_j / l with k_j >= 0 summing to l. Numerators are stored exactly so each
/// vector sums to 1 by construction.
class WeightVectorSet {
 public:
  WeightVectorSet(int objectives, int l, std::vector<std::vector<int>> numerators)
      : objectives_(objectives), l_(l), numerators_(std::move(numerators)) {}

  int objectives() const { return objectives_; }
  int sampling_parameter() const { return l_; }
  std::size_t size() const { return numerators_.size(); }
  std::span<const int> numerators(std::size_t i) const { return numerators_[i]; }
  std::vector<double> as_doubles(std::size_t i) const;

 private:
  int objectives_;
  int l_;
  std::vector<std::vector<int>> numerators_;  // each sums to l_
};

/// Full lattice for the smallest l whose vector count C(l+J-1, J-1) reaches
/// min_count. Vectors are ordered lexicographically by their numerators.
WeightVectorSet weight_vectors(int objectives, int min_count);

/// Number of lattice vectors for a given l and objective count.
std::uint64_t weight_vector_count(int objectives, int l);

/// Scalarizing reference frame for one instance: the ideal-point estimate,
/// the objective ranges observed while estimating it (range equalization),
/// and the augmentation coefficient rho held as an exact fraction. Computed
/// once per instance and shared by every algorithm and portfolio run on it.
struct ReferenceFrame {
  std::int64_t ref_duration = 0;
  Money ref_cost;
  std::int64_t range_duration = 0;  // observed duration range (days)
  Money range_cost;                 // observed cost range
  std::int64_t rho_num = 1;
  std::int64_t rho_den = 100;

  /// Normalization denominators; a degenerate range means an equalization
  /// factor of 1 over the raw objective unit (days / currency units).
  std::int64_t duration_den() const { return range_duration > 0 ? range_duration : 1; }
  std::int64_t cost_den_cents() const {
    return range_cost.cents() > 0 ? range_cost.cents() : 100;
  }

  std::array<double, 2> equalization_factors() const {
    return {1.0 / static_cast<double>(duration_den()),
            100.0 / static_cast<double>(cost_den_cents())};
  }

  std::string to_json(int weight_l) const;
  static ReferenceFrame from_json(const std::string& text);
};

/// Reciprocal ranges (the range equalization factors); a zero range yields a
/// factor of 1 with a warning on stderr.
std::array<double, 2> equalization_factors(const std::array<double, 2>& ranges);

/// Ideal-point estimate by local optimization of each objective. The
/// duration component is exact (per-activity minimum durations); the cost
/// component descends single-mode swaps from the all-cheapest start until no
/// swap improves total cost. Objective ranges are taken over the accepted
/// states of both searches.
ReferenceFrame ideal_point_estimate(const ProjectNetwork& network);

/// Weighted Tchebycheff value of a point against the frame; objectives are
/// range-equalized inside, so callers pass raw values. lambda_num/lambda_den
/// is the exact weight vector.
double scalarize_tchebycheff(const ObjectivePoint& z, const ReferenceFrame& frame,
                             std::span<const int> lambda_num, int lambda_den);

/// Achievement scalarizing value: the Tchebycheff term plus
/// rho * sum_j lambda_j * equalized delta_j.
double scalarize_achievement(const ObjectivePoint& z, const ReferenceFrame& frame,
                             std::span<const int> lambda_num, int lambda_den);

/// Average Quality of an archive: the mean over all weight vectors of the
/// best achievement value any archive point attains. Lower is better. The
/// accumulation is exact; only the final average is floating point. Throws
/// ValidationError on an empty archive.
double average_quality(const ParetoArchive& archive, const ReferenceFrame& frame,
                       const WeightVectorSet& weights);

/// Same metric over bare objective points (used on merged portfolio fronts).
double average_quality(std::span<const ObjectivePoint> points, const ReferenceFrame& frame,
                       const WeightVectorSet& weights);

}  // namespace tct::quality
