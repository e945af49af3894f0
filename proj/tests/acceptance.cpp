// Acceptance suite: every criterion prints one PASS/FAIL line; the binary
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "tct/ahp.hpp"
#include "tct/experiment.hpp"
#include "tct/instance_io.hpp"
#include "tct/moea.hpp"
#include "tct/portfolio.hpp"
#include "tct/quality.hpp"
#include "tct/rng.hpp"

// test-side oracles (naive sort, naive AQ)
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace tct;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Instance {
  std::string name;
  ProjectNetwork network;
  quality::ReferenceFrame frame;
  ParetoArchive exact_front;
  double front_aq = 0.0;
};

std::vector<Instance> load_enumerable_instances(const quality::WeightVectorSet& weights) {
  std::vector<Instance> out;
  for (const auto& entry : fs::directory_iterator(TCT_INSTANCE_DIR)) {
    if (entry.path().extension() != ".tct") continue;
    ProjectNetwork network = load_instance(entry.path());
    if (count_schedules(network) > 2000000) continue;
    quality::ReferenceFrame frame = quality::ideal_point_estimate(network);
    ParetoArchive front = brute_force_pareto(network);
    const double aq = quality::average_quality(front, frame, weights);
    out.push_back({entry.path().stem().string(), std::move(network), frame, std::move(front), aq});
  }
  std::sort(out.begin(), out.end(),
            [](const Instance& a, const Instance& b) { return a.name < b.name; });
  return out;
}

std::uint64_t fnv1a(const std::string& data, std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t hash_tree(const fs::path& root) {
  std::map<std::string, std::uint64_t> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), {});
    files[entry.path().lexically_relative(root).string()] = fnv1a(content);
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& [name, h] : files) {
    hash = fnv1a(name, hash);
    hash = fnv1a(std::to_string(h), hash);
  }
  return hash;
}

// ---------------------------------------------------------------------------

void criterion_1_oracle_equivalence(const std::vector<Instance>& instances,
                                    const quality::WeightVectorSet& weights) {
  bool ok = !instances.empty();
  std::string detail;
  for (const Instance& inst : instances) {
    const double threshold = 1.10 * inst.front_aq;
    for (moea::AlgorithmId alg : moea::kAllAlgorithms) {
      const auto start = std::chrono::steady_clock::now();
      int successes = 0;
      for (std::uint64_t trial = 0; trial < 50; ++trial) {
        moea::AlgorithmParams params;
        params.population_size = 100;
        params.archive_size = 100;
        params.max_generations = 500;
        params.seed = derive_seed(20250810, trial, 0);
        bool reached = false;
        moea::run_algorithm(alg, inst.network, params,
                            [&](std::span<const moea::Individual> front, int) {
                              if (quality::average_quality(moea::to_archive(front), inst.frame,
                                                           weights) <= threshold)
                                reached = true;
                              return reached;
                            });
        if (reached) ++successes;
      }
      const double secs = elapsed_seconds(start);
      char buf[160];
      std::snprintf(buf, sizeof buf, " [%s/%s %d/50 %.1fs]", inst.name.c_str(),
                    std::string(moea::to_string(alg)).c_str(), successes, secs);
      detail += buf;
      if (successes < 45 || secs > 60.0) ok = false;
    }
  }
  report(1, ok, "oracle equivalence: every algorithm reaches 1.10 x exact-front AQ in >= 45/50 "
                "trials within 500 generations, <= 60 s per batch" + detail);
}

void criterion_2_sorting_oracle() {
  Rng rng(424242);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const std::size_t n = 1 + rng.below(300);
    std::vector<moea::Individual> pop(n);
    for (auto& ind : pop) {
      ind.point.duration = static_cast<int>(rng.range(0, 60));
      ind.point.total_cost = Money::from_cents(rng.range(0, 300000));
    }
    const auto fast = moea::fast_nondominated_sort(pop);
    const auto naive = test::naive_nondominated_sort(pop);
    if (fast.size() != naive.size()) {
      ok = false;
      break;
    }
    for (std::size_t f = 0; f < fast.size() && ok; ++f) {
      auto a = fast[f];
      auto b = naive[f];
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) ok = false;
    }
  }
  report(2, ok, "sorting oracle: fast non-dominated sort equals the naive sort on 1000 random "
                "populations (exact partition match)");
}

void criterion_3_aq_machinery(const std::vector<Instance>& instances,
                              const quality::WeightVectorSet& weights) {
  bool ok = true;
  std::string detail;

  if (weights.sampling_parameter() != 49 || weights.size() != 50) {
    ok = false;
    detail += " [weight lattice wrong]";
  }

  int violations = 0;
  double worst_rel = 0.0;
  for (const Instance& inst : instances) {
    Rng rng(fnv1a(inst.name));
    for (int a = 0; a < 200; ++a) {
      std::vector<ParetoEntry> entries;
      const int samples = 1 + static_cast<int>(rng.below(60));
      for (int s = 0; s < samples; ++s) {
        Assignment assignment;
        for (int i = 0; i < inst.network.size(); ++i)
          assignment.modes.push_back(static_cast<int>(
              rng.below(static_cast<std::uint32_t>(inst.network.activity(i).modes.size()))));
        entries.push_back({assignment, evaluate(inst.network, assignment)});
      }
      const ParetoArchive archive = ParetoArchive::of_nondominated(std::move(entries));
      if (archive.empty()) continue;
      const double aq = quality::average_quality(archive, inst.frame, weights);
      if (inst.front_aq > aq) ++violations;
      const double naive = test::naive_average_quality(archive, inst.frame, weights);
      const double rel = std::abs(aq - naive) / std::max(1e-300, std::abs(naive));
      worst_rel = std::max(worst_rel, rel);
    }
  }
  if (violations != 0) {
    ok = false;
    detail += " [" + std::to_string(violations) + " front-optimality violations]";
  }
  if (worst_rel > 1e-9) {
    ok = false;
    detail += " [double-loop mismatch]";
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, " [worst relative gap %.2e]", worst_rel);
  detail += buf;
  report(3, ok, "AQ machinery: 50-vector lattice at l=49, exact front optimal over 200 random "
                "archives per instance, double-loop recomputation within 1e-9" + detail);
}

struct ProbeStats {
  long checks = 0;
  long violations = 0;
};

void criterion_4_portfolio_protocol(const std::vector<Instance>& instances,
                                    const quality::WeightVectorSet& weights,
                                    const ProbeStats& experiment_probe) {
  bool ok = true;
  std::string detail;

  if (portfolio::enumerate_assignments(2, 2).size() != 3 ||
      portfolio::enumerate_assignments(2, 4).size() != 5 ||
      portfolio::enumerate_assignments(4, 4).size() != 35) {
    ok = false;
    detail += " [enumeration counts wrong]";
  }

  if (experiment_probe.checks == 0 || experiment_probe.violations != 0) {
    ok = false;
    detail += " [merged-vs-worker AQ violations " + std::to_string(experiment_probe.violations) +
              " of " + std::to_string(experiment_probe.checks) + "]";
  } else {
    detail += " [" + std::to_string(experiment_probe.checks) + " merged-AQ checks clean]";
  }

  const Instance& inst = instances.front();
  const std::vector<moea::AlgorithmId> roster{moea::AlgorithmId::Nsga2, moea::AlgorithmId::Paes,
                                              moea::AlgorithmId::Npga2, moea::AlgorithmId::Spea2};
  moea::AlgorithmParams params;
  params.population_size = 40;
  params.archive_size = 40;
  const portfolio::TerminationRule rule{inst.front_aq, 0.10, 200};
  int mismatches = 0;
  for (std::uint64_t run = 0; run < 20; ++run) {
    portfolio::PortfolioOptions serial;
    serial.threads = 1;
    portfolio::PortfolioOptions threaded;
    threaded.threads = 4;
    const auto a = portfolio::run_portfolio(portfolio::PortfolioAssignment{{1, 1, 1, 1}}, roster,
                                            inst.network, params, rule, 1, 1000 + run, inst.frame,
                                            weights, serial);
    const auto b = portfolio::run_portfolio(portfolio::PortfolioAssignment{{1, 1, 1, 1}}, roster,
                                            inst.network, params, rule, 1, 1000 + run, inst.frame,
                                            weights, threaded);
    if (a.trial_iterations != b.trial_iterations || a.censored != b.censored) ++mismatches;
  }
  if (mismatches != 0) {
    ok = false;
    detail += " [" + std::to_string(mismatches) + "/20 thread-reproducibility mismatches]";
  }

  report(4, ok, "portfolio protocol: assignment enumeration 3/5/35, merged AQ never trails a "
                "worker, round-robin equals multi-worker bit-for-bit on 20 runs" + detail);
}

void criterion_5_statistics(const std::vector<fs::path>& cdf_files) {
  bool ok = true;
  std::string detail;

  portfolio::RunRecord record;
  record.trial_iterations = {10, 20};
  record.censored = {false, false};
  const auto stats = portfolio::trial_statistics(record);
  if (stats.mean != 15.0 || stats.variance != 50.0) {
    ok = false;
    detail += " [hand case wrong]";
  }

  int checked = 0;
  for (const fs::path& file : cdf_files) {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    double prev = -1.0;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      const double p = std::stod(line.substr(comma + 1));
      if (p < prev || p > 1.0 + 1e-12) {
        ok = false;
        detail += " [non-monotone CDF in " + file.filename().string() + "]";
        break;
      }
      prev = p;
    }
    ++checked;
  }
  if (checked == 0) ok = false;
  detail += " [" + std::to_string(checked) + " CDF files checked]";
  report(5, ok, "statistics: mean/variance exact on {10,20}, CDFs monotone over all experiment "
                "outputs" + detail);
}

void criterion_6_ahp() {
  bool ok = true;
  std::string detail;
  Rng rng(998877);

  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = 2 + rng.below(14);
    std::vector<std::vector<ahp::Decimal>> values(rows);
    for (auto& row : values)
      row.push_back(ahp::Decimal::from_double(std::pow(10.0, rng.unit() * 9.0 - 3.0) + 1e-9));
    std::vector<std::string> alt_labels;
    for (std::size_t i = 0; i < rows; ++i) alt_labels.push_back("a" + std::to_string(i));
    const ahp::DecisionMatrix matrix(alt_labels, {"p"}, values);
    const auto pv = ahp::priority_vector(matrix, 0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double rel = std::abs(pv[i] - matrix.a(i, 0)) / matrix.a(i, 0);
      worst = std::max(worst, rel);
    }
  }
  if (worst > 1e-9) {
    ok = false;
    detail += " [identity gap too large]";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, " [worst identity gap %.2e]", worst);
  detail += buf;

  int rank_changes = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = 2 + rng.below(8), cols = 1 + rng.below(6);
    std::vector<std::vector<ahp::Decimal>> values(rows);
    for (auto& row : values)
      for (std::size_t j = 0; j < cols; ++j)
        row.push_back(ahp::Decimal::from_double(std::pow(10.0, rng.unit() * 6.0 - 2.0) + 1e-9));
    std::vector<std::string> alt_labels;
    for (std::size_t i = 0; i < rows; ++i) alt_labels.push_back("a" + std::to_string(i));
    std::vector<std::string> attr_labels;
    for (std::size_t j = 0; j < cols; ++j) attr_labels.push_back("p" + std::to_string(j));
    const ahp::DecisionMatrix base(alt_labels, attr_labels, values);
    const auto base_ranks = ahp::rank_alternatives(base).ranks;

    auto scaled = values;
    const std::size_t col = rng.below(static_cast<std::uint32_t>(cols));
    const double c = 0.25 + rng.unit() * 19.75;
    for (std::size_t i = 0; i < rows; ++i)
      scaled[i][col] = ahp::Decimal::from_double(values[i][col].value() * c);
    const ahp::DecisionMatrix scaled_matrix(alt_labels, attr_labels, scaled);
    if (ahp::rank_alternatives(scaled_matrix).ranks != base_ranks) ++rank_changes;
  }
  if (rank_changes != 0) {
    ok = false;
    detail += " [" + std::to_string(rank_changes) + " scale-variance failures]";
  }

  const ahp::DecisionMatrix worked({"fast", "slow"}, {"p"},
                                   {{ahp::Decimal::parse("100")}, {ahp::Decimal::parse("300")}});
  const auto rv = ahp::rank_alternatives(worked);
  if (std::abs(rv.priorities[0] - 0.25) > 1e-12 || std::abs(rv.priorities[1] - 0.75) > 1e-12 ||
      rv.ranks[0] != 1 || rv.ranks[1] != 2) {
    ok = false;
    detail += " [worked case wrong]";
  }

  report(6, ok, "AHP: consistent-matrix identity within 1e-9 on 1000 columns, ranks invariant "
                "under column scaling on 1000 matrices, worked case exact" + detail);
}

void criterion_7_determinism(const fs::path& scratch) {
  const fs::path config_path = scratch / "det.cfg";
  const fs::path out_a = scratch / "det_a";
  const fs::path out_b = scratch / "det_b";
  {
    std::ofstream cfg(config_path);
    cfg << "[experiment]\nout = " << out_a.string() << "\ntrials = 50\nslack = 0.10\n"
        << "seed_base = 31415\n"
        << "[instances]\ninstance = " << (fs::path(TCT_INSTANCE_DIR) / "bench6_n7.tct").string()
        << "\n[roster]\nalgorithms = nsga2, paes\nprocessors = 2\nassignments = all\n"
        << "[params]\npopulation = 50\narchive = 50\nmax_generations = 300\n";
  }
  std::ostringstream sink;
  experiment::Config config = experiment::Config::parse_file(config_path);
  portfolio::PortfolioOptions options;
  options.threads = 2;
  const int rc_a = experiment::run(config, sink, options);
  config.out_dir = out_b;
  const int rc_b = experiment::run(config, sink, options);
  const bool ok = rc_a == 0 && rc_b == 0 && hash_tree(out_a) == hash_tree(out_b);
  char buf[64];
  std::snprintf(buf, sizeof buf, " [tree hash %016llx]",
                static_cast<unsigned long long>(hash_tree(out_a)));
  report(7, ok, "determinism: 50-trial experiment rerun produces a byte-identical report tree" +
                    std::string(buf));
}

struct BigExperimentResult {
  ProbeStats probe;
  std::vector<fs::path> cdf_files;
  bool ok = false;
  double seconds = 0.0;
  double priority_sum = 0.0;
  fs::path report_dir;
};

BigExperimentResult criterion_8_end_to_end(const fs::path& scratch,
                                           const quality::WeightVectorSet& weights) {
  BigExperimentResult result;
  const fs::path config_path = scratch / "full.cfg";
  result.report_dir = scratch / "full_report";
  {
    std::ofstream cfg(config_path);
    cfg << "[experiment]\nout = " << result.report_dir.string()
        << "\ntrials = 50\nslack = 0.10\nseed_base = 27182\n"
        << "[instances]\ninstance = " << (fs::path(TCT_INSTANCE_DIR) / "bench6_n7.tct").string()
        << "\n[roster]\nalgorithms = nsga2, paes, npga2, spea2\nprocessors = 4\n"
        << "assignments = 4/0/0/0, 3/1/0/0, 3/0/1/0, 3/0/0/1, 2/1/1/0, 2/1/0/1, 1/0/1/2, "
           "0/2/1/1, 0/3/1/0, 0/4/0/0, 1/0/3/0, 1/2/0/1, 0/0/4/0, 1/1/0/2, 0/1/0/3, 0/0/0/4\n"
        << "[params]\npopulation = 100\narchive = 100\nmax_generations = 500\n";
  }

  const auto start = std::chrono::steady_clock::now();
  experiment::Config config = experiment::Config::parse_file(config_path);
  portfolio::PortfolioOptions options;
  options.threads = 4;
  options.probe = [&](const portfolio::GenerationProbe& probe) {
    for (double worker_aq : probe.worker_aqs) {
      ++result.probe.checks;
      if (probe.merged_aq > worker_aq + 1e-12) ++result.probe.violations;
    }
  };
  std::ostringstream sink;
  const int rc = experiment::run(config, sink, options);
  result.seconds = elapsed_seconds(start);
  (void)weights;

  bool ok = rc == 0 && result.seconds <= 1800.0;

  const fs::path ranks_file = result.report_dir / "ranks.csv";
  int rank_rows = 0;
  if (fs::exists(ranks_file)) {
    std::ifstream in(ranks_file);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      result.priority_sum += std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      ++rank_rows;
    }
  }
  if (rank_rows != 16 || std::abs(result.priority_sum - 1.0) > 1e-9) ok = false;

  for (const auto& entry : fs::recursive_directory_iterator(result.report_dir))
    if (entry.is_regular_file() && entry.path().filename() == "cdf.csv")
      result.cdf_files.push_back(entry.path());
  if (result.cdf_files.size() != 16) ok = false;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                " [%.0f s on 4 workers, 16 alternatives, priority sum %.12f]", result.seconds,
                result.priority_sum);
  report(8, ok, "end-to-end: 16-assignment 4-algorithm experiment, 50 trials each, within the "
                "time budget, rank report priorities sum to 1" + std::string(buf));
  result.ok = ok;
  return result;
}

}  // namespace

int main() {
  const auto weights = quality::weight_vectors(2, 50);
  const fs::path scratch = fs::temp_directory_path() / "tct_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  const std::vector<Instance> instances = load_enumerable_instances(weights);
  {
    std::string names;
    for (const auto& inst : instances) names += " " + inst.name;
    std::printf("enumerable bundled instances:%s\n", names.c_str());
  }

  criterion_2_sorting_oracle();
  criterion_3_aq_machinery(instances, weights);
  criterion_6_ahp();
  criterion_1_oracle_equivalence(instances, weights);

  // The full experiment feeds criteria 4 (merged-AQ trace), 5 (CDF files) and 8.
  const BigExperimentResult big = criterion_8_end_to_end(scratch, weights);
  criterion_4_portfolio_protocol(instances, weights, big.probe);
  criterion_5_statistics(big.cdf_files);
  criterion_7_determinism(scratch);

  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", failures);
  return 1;
}
