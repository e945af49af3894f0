#include "tct/portfolio.hpp"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tct/errors.hpp"

namespace tct::portfolio {

int PortfolioAssignment::processors() const {
  int p = 0;
  for (int c : counts) p += c;
  return p;
}

std::string PortfolioAssignment::label() const {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += '/';
    s += std::to_string(counts[i]);
  }
  return s;
}

std::string PortfolioAssignment::directory_name() const {
  std::string s = label();
  std::replace(s.begin(), s.end(), '/', '-');
  return s;
}

PortfolioAssignment PortfolioAssignment::parse(std::string_view text) {
  PortfolioAssignment a;
  std::string token;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '/') {
      if (token.empty()) throw ValidationError("bad assignment '" + std::string(text) + "'");
      try {
        a.counts.push_back(std::stoi(token));
      } catch (const std::exception&) {
        throw ValidationError("bad assignment '" + std::string(text) + "'");
      }
      if (a.counts.back() < 0)
        throw ValidationError("assignment counts must be non-negative in '" + std::string(text) +
                              "'");
      token.clear();
    } else {
      token += text[i];
    }
  }
  return a;
}

namespace {

void compositions(int remaining, std::size_t slot, std::vector<int>& current,
                  std::vector<PortfolioAssignment>& out) {
  if (slot + 1 == current.size()) {
    current[slot] = remaining;
    out.push_back({current});
    return;
  }
  // first algorithm loaded first: counts descend lexicographically
  for (int c = remaining; c >= 0; --c) {
    current[slot] = c;
    compositions(remaining - c, slot + 1, current, out);
  }
}

}  // namespace

std::vector<PortfolioAssignment> enumerate_assignments(int roster_size, int processors) {
  if (roster_size < 1) throw ValidationError("roster must have at least one algorithm");
  if (processors < 1) throw ValidationError("need at least one processor");
  std::vector<PortfolioAssignment> out;
  std::vector<int> current(roster_size, 0);
  compositions(processors, 0, current, out);
  return out;
}

std::vector<PortfolioAssignment> restrict_assignments(
    const std::vector<PortfolioAssignment>& restricted, int roster_size, int processors) {
  for (const PortfolioAssignment& a : restricted) {
    if (static_cast<int>(a.counts.size()) != roster_size)
      throw ValidationError("assignment " + a.label() + " does not match roster size " +
                            std::to_string(roster_size));
    if (a.processors() != processors)
      throw ValidationError("assignment " + a.label() + " does not sum to " +
                            std::to_string(processors) + " processors");
  }
  return restricted;
}

double calibrate_best_aq(const ProjectNetwork& network,
                         const std::vector<moea::AlgorithmId>& roster,
                         const moea::AlgorithmParams& params, int budget_trials,
                         const quality::ReferenceFrame& frame,
                         const quality::WeightVectorSet& weights,
                         std::uint64_t enumerable_cap) {
  if (budget_trials < 1) throw ValidationError("calibration budget must be positive");
  if (count_schedules(network) <= enumerable_cap)
    return quality::average_quality(brute_force_pareto(network, enumerable_cap), frame, weights);

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < roster.size(); ++a) {
    for (int t = 0; t < budget_trials; ++t) {
      moea::AlgorithmParams p = params;
      p.seed = derive_seed(params.seed, static_cast<std::uint64_t>(t),
                           0x10000u + static_cast<std::uint64_t>(a));
      const moea::RunResult r = moea::run_algorithm(roster[a], network, p);
      best = std::min(best, quality::average_quality(r.archive, frame, weights));
    }
  }
  return best;
}

namespace {

std::vector<moea::AlgorithmId> expand_workers(const PortfolioAssignment& assignment,
                                              const std::vector<moea::AlgorithmId>& roster) {
  if (assignment.counts.size() != roster.size())
    throw ValidationError("assignment " + assignment.label() + " does not match roster size " +
                          std::to_string(roster.size()));
  std::vector<moea::AlgorithmId> workers;
  for (std::size_t i = 0; i < roster.size(); ++i)
    for (int c = 0; c < assignment.counts[i]; ++c) workers.push_back(roster[i]);
  if (workers.empty())
    throw ValidationError("assignment " + assignment.label() + " allocates no workers");
  return workers;
}

double merged_front_aq(const std::vector<std::unique_ptr<moea::AlgorithmRun>>& runs,
                       const quality::ReferenceFrame& frame,
                       const quality::WeightVectorSet& weights) {
  std::vector<std::span<const moea::Individual>> fronts;
  fronts.reserve(runs.size());
  for (const auto& r : runs) fronts.push_back(r->front());
  const ParetoArchive merged = moea::merge_fronts(fronts);
  return quality::average_quality(merged, frame, weights);
}

// Steps every worker one generation, either on the calling thread or on a
// persistent pool synchronized per generation. The merge-and-decide step
// always happens on the calling thread in worker order, so the trial's
// outcome is independent of scheduling.
class LockstepTrial {
 public:
  LockstepTrial(std::vector<std::unique_ptr<moea::AlgorithmRun>>& runs, int threads)
      : runs_(runs), thread_count_(std::min<int>(threads, static_cast<int>(runs.size()))) {
    if (thread_count_ > 1) {
      barrier_.emplace(thread_count_ + 1);
      for (int t = 0; t < thread_count_; ++t)
        pool_.emplace_back([this, t] { worker_loop(t); });
    }
  }

  ~LockstepTrial() {
    if (!pool_.empty()) {
      stop_ = true;
      barrier_->arrive_and_wait();  // release workers into the stop check
      for (auto& th : pool_) th.join();
    }
  }

  void step_generation() {
    if (pool_.empty()) {
      for (auto& r : runs_) r->step();
      return;
    }
    barrier_->arrive_and_wait();  // start: workers step their share
    barrier_->arrive_and_wait();  // done
  }

 private:
  void worker_loop(int index) {
    for (;;) {
      barrier_->arrive_and_wait();
      if (stop_) return;
      for (std::size_t w = static_cast<std::size_t>(index); w < runs_.size();
           w += static_cast<std::size_t>(thread_count_))
        runs_[w]->step();
      barrier_->arrive_and_wait();
    }
  }

  std::vector<std::unique_ptr<moea::AlgorithmRun>>& runs_;
  int thread_count_;
  std::optional<std::barrier<>> barrier_;
  std::vector<std::thread> pool_;
  bool stop_ = false;
};

}  // namespace

RunRecord run_portfolio(const PortfolioAssignment& assignment,
                        const std::vector<moea::AlgorithmId>& roster,
                        const ProjectNetwork& network, const moea::AlgorithmParams& params,
                        const TerminationRule& rule, int trials, std::uint64_t seed_base,
                        const quality::ReferenceFrame& frame,
                        const quality::WeightVectorSet& weights,
                        const PortfolioOptions& options) {
  if (trials < 1) throw ValidationError("need at least one trial");
  if (!(rule.slack > 0.0)) throw ValidationError("termination slack must be positive");
  if (!(rule.best_aq == rule.best_aq) || rule.best_aq < 0.0)
    throw ValidationError("termination rule is not calibrated");
  const std::vector<moea::AlgorithmId> worker_algs = expand_workers(assignment, roster);

  RunRecord record;
  record.seed_base = seed_base;
  record.trial_iterations.reserve(trials);
  record.censored.reserve(trials);

  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::unique_ptr<moea::AlgorithmRun>> runs;
    runs.reserve(worker_algs.size());
    for (std::size_t w = 0; w < worker_algs.size(); ++w) {
      moea::AlgorithmParams p = params;
      p.seed = derive_seed(seed_base, static_cast<std::uint64_t>(trial),
                           static_cast<std::uint64_t>(w));
      runs.push_back(moea::AlgorithmRun::create(worker_algs[w], network, p));
    }

    LockstepTrial lockstep(runs, options.threads);
    int recorded = rule.max_generations;
    bool censored = true;
    for (int g = 1; g <= rule.max_generations; ++g) {
      lockstep.step_generation();
      const double aq = merged_front_aq(runs, frame, weights);
      if (options.probe) {
        GenerationProbe probe;
        probe.trial = trial;
        probe.generation = g;
        probe.merged_aq = aq;
        probe.worker_aqs.reserve(runs.size());
        for (const auto& r : runs)
          probe.worker_aqs.push_back(
              quality::average_quality(moea::to_archive(r->front()), frame, weights));
        options.probe(probe);
      }
      if (rule.satisfied(aq)) {
        recorded = g;
        censored = false;
        break;
      }
    }
    record.trial_iterations.push_back(recorded);
    record.censored.push_back(censored);
  }
  return record;
}

std::string RunRecord::to_csv() const {
  std::ostringstream out;
  out << "trial,iterations,censored\n";
  for (std::size_t t = 0; t < trial_iterations.size(); ++t)
    out << t << "," << trial_iterations[t] << "," << (censored[t] ? 1 : 0) << "\n";
  return out.str();
}

std::string RunRecord::to_json() const {
  nlohmann::json j;
  j["seed_base"] = seed_base;
  j["trials"] = nlohmann::json::array();
  for (std::size_t t = 0; t < trial_iterations.size(); ++t)
    j["trials"].push_back({{"trial", t},
                           {"iterations", trial_iterations[t]},
                           {"censored", static_cast<bool>(censored[t])}});
  return j.dump(2) + "\n";
}

TrialStats trial_statistics(const RunRecord& record) {
  if (record.trial_iterations.size() != record.censored.size())
    throw ValidationError("malformed run record");
  TrialStats stats;
  stats.total_trials = static_cast<int>(record.trial_iterations.size());

  std::vector<int> uncensored;
  for (std::size_t t = 0; t < record.trial_iterations.size(); ++t) {
    if (record.censored[t])
      ++stats.censored_count;
    else
      uncensored.push_back(record.trial_iterations[t]);
  }

  if (!uncensored.empty()) {
    stats.mean_defined = true;
    double sum = 0.0;
    for (int x : uncensored) sum += x;
    stats.mean = sum / static_cast<double>(uncensored.size());
    if (uncensored.size() >= 2) {
      stats.variance_defined = true;
      double ss = 0.0;
      for (int x : uncensored) ss += (x - stats.mean) * (x - stats.mean);
      stats.variance = ss / static_cast<double>(uncensored.size() - 1);
    }
  }

  std::sort(uncensored.begin(), uncensored.end());
  const double n_all = stats.total_trials;
  const double n_unc = static_cast<double>(uncensored.size());
  std::size_t i = 0;
  while (i < uncensored.size()) {
    std::size_t j = i;
    while (j < uncensored.size() && uncensored[j] == uncensored[i]) ++j;
    stats.cdf.push_back({uncensored[i], static_cast<double>(j) / n_all});
    stats.cdf_uncensored.push_back({uncensored[i], static_cast<double>(j) / n_unc});
    i = j;
  }
  return stats;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string TrialStats::cdf_csv() const {
  std::ostringstream out;
  out << "x,p\n";
  for (const CdfPoint& p : cdf) out << p.x << "," << fmt_double(p.p) << "\n";
  return out.str();
}

std::string TrialStats::stats_csv() const {
  std::ostringstream out;
  out << "mean,variance,variance_defined,censored_trials,total_trials\n";
  out << (mean_defined ? fmt_double(mean) : "NA") << ","
      << (mean_defined ? fmt_double(variance) : "NA") << "," << (variance_defined ? 1 : 0) << ","
      << censored_count << "," << total_trials << "\n";
  return out.str();
}

std::string TrialStats::to_json() const {
  nlohmann::json j;
  if (mean_defined) {
    j["mean"] = mean;
    j["variance"] = variance;
  } else {
    j["mean"] = nullptr;
    j["variance"] = nullptr;
  }
  j["variance_defined"] = variance_defined;
  j["censored_trials"] = censored_count;
  j["total_trials"] = total_trials;
  auto points = nlohmann::json::array();
  for (const CdfPoint& p : cdf) points.push_back({{"x", p.x}, {"p", p.p}});
  j["cdf"] = points;
  auto points_u = nlohmann::json::array();
  for (const CdfPoint& p : cdf_uncensored) points_u.push_back({{"x", p.x}, {"p", p.p}});
  j["cdf_uncensored_basis"] = points_u;
  return j.dump(2) + "\n";
}

}  // namespace tct::portfolio
