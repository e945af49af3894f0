#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tct/moea.hpp"
#include "tct/quality.hpp"

namespace tct::portfolio {

/// Worker counts per roster algorithm, e.g. counts {3,1,0,0} on four
/// processors. The roster order is fixed as declared.
struct PortfolioAssignment {
  std::vector<int> counts;

  int processors() const;
  std::string label() const;         // "3/1/0/0"
  std::string directory_name() const;  // "3-1-0-0"

  static PortfolioAssignment parse(std::string_view text);
};

/// All compositions of `processors` into `roster_size` non-negative counts,
/// ordered lexicographically with the first algorithm loaded first
/// (e.g. 2/0, 1/1, 0/2). Count is C(P + r - 1, r - 1).
std::vector<PortfolioAssignment> enumerate_assignments(int roster_size, int processors);

/// Validates an explicit restricted list against the processor count and
/// returns it unchanged (in the given order).
std::vector<PortfolioAssignment> restrict_assignments(
    const std::vector<PortfolioAssignment>& restricted, int roster_size, int processors);

/// Per-instance termination threshold: a trial stops once the merged-archive
/// AQ is within `slack` of the calibrated best value.
struct TerminationRule {
  double best_aq = 0.0;
  double slack = 0.10;
  int max_generations = 1000;

  bool satisfied(double aq) const { return aq <= (1.0 + slack) * best_aq; }
};

/// Iterations-to-termination for a batch of trials. A censored trial hit
/// max_generations without satisfying the rule; its recorded iteration count
/// is the cap.
struct RunRecord {
  std::vector<int> trial_iterations;
  std::vector<bool> censored;
  std::uint64_t seed_base = 0;

  std::string to_csv() const;  // trial,iterations,censored
  std::string to_json() const;
};

/// Best attainable AQ for the rule. Enumerable instances use the exhaustive
/// front; otherwise the minimum AQ over `budget_trials` full-length runs of
/// each roster algorithm, seeded from params.seed.
double calibrate_best_aq(const ProjectNetwork& network,
                         const std::vector<moea::AlgorithmId>& roster,
                         const moea::AlgorithmParams& params, int budget_trials,
                         const quality::ReferenceFrame& frame,
                         const quality::WeightVectorSet& weights,
                         std::uint64_t enumerable_cap = 2000000);

/// Per-generation probe for analysis: merged-front AQ and each worker's own
/// front AQ, in roster slot order.
struct GenerationProbe {
  int trial = 0;
  int generation = 0;
  double merged_aq = 0.0;
  std::vector<double> worker_aqs;
};

struct PortfolioOptions {
  /// Worker threads per trial; 1 steps all workers round-robin on the
  /// calling thread. Results are identical either way.
  int threads = 1;
  /// When set, called after every generation of every trial.
  std::function<void(const GenerationProbe&)> probe;
};

/// Runs `trials` independent portfolio executions. Each trial steps all
/// allocated workers in generation lockstep; after every global generation
/// the workers' fronts merge into one non-dominated set whose AQ decides
/// termination. Worker w of trial t draws its seed as
/// derive_seed(seed_base, t, w), so records depend only on
/// (assignment, roster, params, rule, seed_base).
RunRecord run_portfolio(const PortfolioAssignment& assignment,
                        const std::vector<moea::AlgorithmId>& roster,
                        const ProjectNetwork& network, const moea::AlgorithmParams& params,
                        const TerminationRule& rule, int trials, std::uint64_t seed_base,
                        const quality::ReferenceFrame& frame,
                        const quality::WeightVectorSet& weights,
                        const PortfolioOptions& options = {});

/// Step-CDF point: fraction of trials finishing within x iterations.
struct CdfPoint {
  int x = 0;
  double p = 0.0;
};

struct TrialStats {
  double mean = 0.0;
  double variance = 0.0;
  bool variance_defined = false;  // needs at least two uncensored trials
  bool mean_defined = false;      // needs at least one uncensored trial
  int censored_count = 0;
  int total_trials = 0;
  std::vector<CdfPoint> cdf;              // denominator: all trials
  std::vector<CdfPoint> cdf_uncensored;   // denominator: uncensored trials only

  std::string cdf_csv() const;    // x,p
  std::string stats_csv() const;  // one summary row
  std::string to_json() const;
};

/// Sample mean and unbiased variance over uncensored trials plus the
/// empirical CDF. All-censored records yield undefined statistics with the
/// flags cleared.
TrialStats trial_statistics(const RunRecord& record);

}  // namespace tct::portfolio
