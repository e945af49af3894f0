#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "tct/errors.hpp"
#include "tct/portfolio.hpp"

using namespace tct;
using namespace tct::test;
using namespace tct::portfolio;

namespace {

struct Bench {
  ProjectNetwork network;
  quality::ReferenceFrame frame;
  quality::WeightVectorSet weights;
  TerminationRule rule;

  explicit Bench(std::uint64_t seed, double slack = 0.10, int max_generations = 200)
      : network(small_random_instance(seed)),
        frame(quality::ideal_point_estimate(network)),
        weights(quality::weight_vectors(2, 50)) {
    rule.slack = slack;
    rule.max_generations = max_generations;
    rule.best_aq = quality::average_quality(brute_force_pareto(network), frame, weights);
  }
};

moea::AlgorithmParams small_params() {
  moea::AlgorithmParams p;
  p.population_size = 20;
  p.archive_size = 20;
  p.max_generations = 200;
  return p;
}

bool same_record(const RunRecord& a, const RunRecord& b) {
  return a.trial_iterations == b.trial_iterations && a.censored == b.censored;
}

}  // namespace

TEST_CASE("assignment labels and parsing") {
  PortfolioAssignment a{{3, 1, 0, 0}};
  CHECK(a.processors() == 4);
  CHECK(a.label() == "3/1/0/0");
  CHECK(a.directory_name() == "3-1-0-0");
  CHECK(PortfolioAssignment::parse("3/1/0/0").counts == std::vector<int>{3, 1, 0, 0});
  CHECK_THROWS_AS(PortfolioAssignment::parse("3//1"), ValidationError);
  CHECK_THROWS_AS(PortfolioAssignment::parse("a/b"), ValidationError);
}

TEST_CASE("enumerate_assignments: counts and order") {
  SUBCASE("two algorithms on two processors give exactly three cases") {
    const auto list = enumerate_assignments(2, 2);
    REQUIRE(list.size() == 3);
    CHECK(list[0].label() == "2/0");
    CHECK(list[1].label() == "1/1");
    CHECK(list[2].label() == "0/2");
  }
  SUBCASE("two algorithms on four processors give five cases") {
    const auto list = enumerate_assignments(2, 4);
    REQUIRE(list.size() == 5);
    CHECK(list[0].label() == "4/0");
    CHECK(list[4].label() == "0/4");
  }
  SUBCASE("four algorithms on four processors give the full composition count") {
    CHECK(enumerate_assignments(4, 4).size() == 35);
    // stars and bars: C(P + r - 1, r - 1)
    for (int r : {1, 2, 3, 4})
      for (int p : {1, 2, 3, 5}) {
        std::uint64_t expected = 1;
        for (int i = 1; i <= r - 1; ++i)
          expected = expected * static_cast<std::uint64_t>(p + i) / static_cast<std::uint64_t>(i);
        CHECK(enumerate_assignments(r, p).size() == expected);
      }
  }
  SUBCASE("every enumerated assignment sums to the processor count") {
    for (const auto& a : enumerate_assignments(4, 4)) CHECK(a.processors() == 4);
  }
}

TEST_CASE("restrict_assignments validates the explicit list") {
  const std::vector<PortfolioAssignment> good{PortfolioAssignment::parse("4/0/0/0"),
                                              PortfolioAssignment::parse("3/1/0/0")};
  const auto kept = restrict_assignments(good, 4, 4);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].label() == "4/0/0/0");

  CHECK_THROWS_AS(restrict_assignments({PortfolioAssignment::parse("3/0")}, 2, 4),
                  ValidationError);
  CHECK_THROWS_AS(restrict_assignments({PortfolioAssignment::parse("2/1")}, 3, 3),
                  ValidationError);
}

TEST_CASE("calibrate_best_aq") {
  const Bench bench(42);
  const auto params = small_params();
  SUBCASE("enumerable instances use the exhaustive front") {
    const double calibrated = calibrate_best_aq(bench.network, {moea::AlgorithmId::Nsga2}, params,
                                                3, bench.frame, bench.weights);
    CHECK(calibrated == bench.rule.best_aq);
  }
  SUBCASE("beyond the cap it falls back to seeded long runs, deterministically") {
    const std::vector<moea::AlgorithmId> roster{moea::AlgorithmId::Nsga2,
                                                moea::AlgorithmId::Paes};
    moea::AlgorithmParams p = params;
    p.max_generations = 10;
    const double a =
        calibrate_best_aq(bench.network, roster, p, 2, bench.frame, bench.weights, 1);
    const double b =
        calibrate_best_aq(bench.network, roster, p, 2, bench.frame, bench.weights, 1);
    CHECK(a == b);
    CHECK(a >= bench.rule.best_aq);  // heuristic runs cannot beat the exact front
  }
}

TEST_CASE("run_portfolio: a one-worker portfolio equals the standalone run") {
  const Bench bench(7);
  const auto params = small_params();
  const std::uint64_t seed_base = 1234;
  const int trials = 5;

  const RunRecord record =
      run_portfolio(PortfolioAssignment{{1}}, {moea::AlgorithmId::Nsga2}, bench.network, params,
                    bench.rule, trials, seed_base, bench.frame, bench.weights);
  REQUIRE(record.trial_iterations.size() == static_cast<std::size_t>(trials));

  const double threshold = (1.0 + bench.rule.slack) * bench.rule.best_aq;
  for (int t = 0; t < trials; ++t) {
    moea::AlgorithmParams p = params;
    p.seed = derive_seed(seed_base, static_cast<std::uint64_t>(t), 0);
    p.max_generations = bench.rule.max_generations;
    const auto result = moea::run_algorithm(
        moea::AlgorithmId::Nsga2, bench.network, p,
        [&](std::span<const moea::Individual> front, int) {
          return quality::average_quality(moea::to_archive(front), bench.frame, bench.weights) <=
                 threshold;
        });
    CHECK(result.generations == record.trial_iterations[t]);
  }
}

TEST_CASE("run_portfolio: swapping the roster mirrors the assignment") {
  const Bench bench(19);
  const auto params = small_params();
  const std::vector<moea::AlgorithmId> roster{moea::AlgorithmId::Nsga2, moea::AlgorithmId::Paes};
  const std::vector<moea::AlgorithmId> swapped{moea::AlgorithmId::Paes, moea::AlgorithmId::Nsga2};

  const RunRecord forward = run_portfolio(PortfolioAssignment{{2, 0}}, roster, bench.network,
                                          params, bench.rule, 4, 99, bench.frame, bench.weights);
  const RunRecord mirrored = run_portfolio(PortfolioAssignment{{0, 2}}, swapped, bench.network,
                                           params, bench.rule, 4, 99, bench.frame, bench.weights);
  CHECK(same_record(forward, mirrored));
}

TEST_CASE("run_portfolio: merged archive never trails any worker") {
  const Bench bench(55);
  const auto params = small_params();
  const std::vector<moea::AlgorithmId> roster{moea::AlgorithmId::Nsga2, moea::AlgorithmId::Paes,
                                              moea::AlgorithmId::Spea2};
  PortfolioOptions options;
  int probes = 0;
  options.probe = [&](const GenerationProbe& probe) {
    ++probes;
    for (double worker_aq : probe.worker_aqs) {
      CHECK(probe.merged_aq <= worker_aq + 1e-12);
    }
  };
  run_portfolio(PortfolioAssignment{{1, 1, 1}}, roster, bench.network, params, bench.rule, 4, 5,
                bench.frame, bench.weights, options);
  CHECK(probes > 0);
}

TEST_CASE("run_portfolio: per-trial iterations never exceed the worst lone constituent") {
  const Bench bench(77);
  const auto params = small_params();
  const std::vector<moea::AlgorithmId> roster{moea::AlgorithmId::Nsga2, moea::AlgorithmId::Paes};
  const std::uint64_t seed_base = 41;
  const int trials = 4;
  const RunRecord merged =
      run_portfolio(PortfolioAssignment{{1, 1}}, roster, bench.network, params, bench.rule,
                    trials, seed_base, bench.frame, bench.weights);

  const double threshold = (1.0 + bench.rule.slack) * bench.rule.best_aq;
  for (int t = 0; t < trials; ++t) {
    int worst = 0;
    for (std::size_t w = 0; w < roster.size(); ++w) {
      moea::AlgorithmParams p = params;
      p.seed = derive_seed(seed_base, static_cast<std::uint64_t>(t), w);
      p.max_generations = bench.rule.max_generations;
      const auto result = moea::run_algorithm(
          roster[w], bench.network, p,
          [&](std::span<const moea::Individual> front, int) {
            return quality::average_quality(moea::to_archive(front), bench.frame,
                                            bench.weights) <= threshold;
          });
      worst = std::max(worst, result.generations);
    }
    CHECK(merged.trial_iterations[t] <= worst);
  }
}

TEST_CASE("run_portfolio: looser slack never takes longer on matched seeds") {
  const ProjectNetwork network = small_random_instance(91);
  const auto frame = quality::ideal_point_estimate(network);
  const auto weights = quality::weight_vectors(2, 50);
  const double best = quality::average_quality(brute_force_pareto(network), frame, weights);
  const auto params = small_params();
  const std::vector<moea::AlgorithmId> roster{moea::AlgorithmId::Nsga2};

  TerminationRule tight{best, 0.10, 200};
  TerminationRule loose{best, 0.20, 200};
  const RunRecord r_tight = run_portfolio(PortfolioAssignment{{2}}, roster, network, params,
                                          tight, 6, 3, frame, weights);
  const RunRecord r_loose = run_portfolio(PortfolioAssignment{{2}}, roster, network, params,
                                          loose, 6, 3, frame, weights);
  for (std::size_t t = 0; t < r_tight.trial_iterations.size(); ++t)
    CHECK(r_loose.trial_iterations[t] <= r_tight.trial_iterations[t]);
}

TEST_CASE("run_portfolio: multi-threaded lockstep reproduces the single-threaded record") {
  const Bench bench(101);
  const auto params = small_params();
  const std::vector<moea::AlgorithmId> roster{moea::AlgorithmId::Nsga2, moea::AlgorithmId::Paes,
                                              moea::AlgorithmId::Npga2,
                                              moea::AlgorithmId::Spea2};
  const PortfolioAssignment assignment{{1, 1, 1, 1}};

  PortfolioOptions serial;
  serial.threads = 1;
  PortfolioOptions threaded;
  threaded.threads = 4;
  const RunRecord a = run_portfolio(assignment, roster, bench.network, params, bench.rule, 3, 7,
                                    bench.frame, bench.weights, serial);
  const RunRecord b = run_portfolio(assignment, roster, bench.network, params, bench.rule, 3, 7,
                                    bench.frame, bench.weights, threaded);
  CHECK(same_record(a, b));

  PortfolioOptions two_threads;  // workers shared across fewer threads
  two_threads.threads = 2;
  const RunRecord c = run_portfolio(assignment, roster, bench.network, params, bench.rule, 3, 7,
                                    bench.frame, bench.weights, two_threads);
  CHECK(same_record(a, c));
}

TEST_CASE("run_portfolio: input validation") {
  const Bench bench(1);
  const auto params = small_params();
  CHECK_THROWS_AS(run_portfolio(PortfolioAssignment{{0, 0}},
                                {moea::AlgorithmId::Nsga2, moea::AlgorithmId::Paes},
                                bench.network, params, bench.rule, 2, 1, bench.frame,
                                bench.weights),
                  ValidationError);
  TerminationRule uncalibrated;
  uncalibrated.best_aq = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(run_portfolio(PortfolioAssignment{{1}}, {moea::AlgorithmId::Nsga2},
                                bench.network, params, uncalibrated, 2, 1, bench.frame,
                                bench.weights),
                  ValidationError);
}

TEST_CASE("trial_statistics") {
  SUBCASE("single trial: mean defined, variance flagged undefined") {
    RunRecord record;
    record.trial_iterations = {13};
    record.censored = {false};
    const TrialStats stats = trial_statistics(record);
    CHECK(stats.mean == 13.0);
    CHECK(stats.mean_defined);
    CHECK_FALSE(stats.variance_defined);
    CHECK(stats.variance == 0.0);
  }
  SUBCASE("two trials: unbiased variance") {
    RunRecord record;
    record.trial_iterations = {10, 20};
    record.censored = {false, false};
    const TrialStats stats = trial_statistics(record);
    CHECK(stats.mean == 15.0);
    CHECK(stats.variance == 50.0);
    CHECK(stats.variance_defined);
  }
  SUBCASE("censored trials are excluded and counted") {
    RunRecord record;
    record.trial_iterations = {10, 200, 20};
    record.censored = {false, true, false};
    const TrialStats stats = trial_statistics(record);
    CHECK(stats.mean == 15.0);
    CHECK(stats.censored_count == 1);
    CHECK(stats.cdf.back().p == doctest::Approx(2.0 / 3.0));
    CHECK(stats.cdf_uncensored.back().p == doctest::Approx(1.0));
  }
  SUBCASE("all censored: undefined with explicit markers") {
    RunRecord record;
    record.trial_iterations = {200, 200};
    record.censored = {true, true};
    const TrialStats stats = trial_statistics(record);
    CHECK_FALSE(stats.mean_defined);
    CHECK_FALSE(stats.variance_defined);
    CHECK(stats.censored_count == 2);
    CHECK(stats.cdf.empty());
  }
  SUBCASE("CDF is monotone and bounded on random records") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      RunRecord record;
      const int n = 1 + static_cast<int>(rng.below(50));
      for (int i = 0; i < n; ++i) {
        record.trial_iterations.push_back(1 + static_cast<int>(rng.below(100)));
        record.censored.push_back(rng.below(5) == 0);
      }
      const TrialStats stats = trial_statistics(record);
      double prev = 0.0;
      for (const auto& p : stats.cdf) {
        CHECK(p.p >= prev);
        prev = p.p;
      }
      CHECK(prev <= 1.0 + 1e-12);
      if (!stats.cdf.empty()) {
        const double uncensored_fraction =
            static_cast<double>(stats.total_trials - stats.censored_count) /
            static_cast<double>(stats.total_trials);
        CHECK(stats.cdf.back().p == doctest::Approx(uncensored_fraction));
      }
    }
  }
  SUBCASE("record CSV and stats CSV are as declared") {
    RunRecord record;
    record.trial_iterations = {10, 20};
    record.censored = {false, true};
    CHECK(record.to_csv() == "trial,iterations,censored\n0,10,0\n1,20,1\n");
    const TrialStats stats = trial_statistics(record);
    CHECK(stats.stats_csv() ==
          "mean,variance,variance_defined,censored_trials,total_trials\n10,0,0,1,2\n");
    CHECK(stats.cdf_csv() == "x,p\n10,0.5\n");
  }
}
