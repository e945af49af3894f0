#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tct/money.hpp"

namespace tct {

using BigInt = boost::multiprecision::cpp_int;

/// One (duration, direct cost) alternative for performing an activity.
/// The optional decomposition splits the direct cost into a fixed material
/// part plus a per-day rate; when present it must reproduce direct_cost
/// exactly.
struct ExecutionMode {
  int duration = 0;  // days
  Money direct_cost;

  bool has_decomposition = false;
  Money material_cost;
  Money daily_rate;
};

/// A project activity: its execution modes and immediate successors.
/// Activities with no successors feed the implicit sink; activities nobody
/// points at hang off the implicit source. Ids run 1..N and are never
/// serialized for the dummy endpoints.
struct Activity {
  int id = 0;
  std::vector<ExecutionMode> modes;
  std::vector<int> successors;  // ascending, ids in 1..N
};

/// Per-activity choice of execution mode, index i (0-based) for activity id
/// i+1. Entry values are mode indices into that activity's mode list.
struct Assignment {
  std::vector<int> modes;

  bool operator==(const Assignment&) const = default;
  auto operator<=>(const Assignment&) const = default;
};

/// Image of an assignment in objective space, plus feasibility against the
/// duration/cost caps. `violation` is the total relative cap excess used by
/// constrained dominance; it is 0 for feasible points.
struct ObjectivePoint {
  int duration = 0;
  Money total_cost;
  bool feasible_time = true;
  bool feasible_cost = true;
  double violation = 0.0;

  bool feasible() const { return feasible_time && feasible_cost; }
  bool same_objectives(const ObjectivePoint& o) const {
    return duration == o.duration && total_cost == o.total_cost;
  }
};

/// Immutable DTCTP instance: activity list, precedence DAG, project-level
/// indirect cost rate and optional duration/cost caps. Validated on
/// construction (DAG, id ranges, mode invariants); safe for shared read
/// access from any number of threads afterwards.
class ProjectNetwork {
 public:
  ProjectNetwork(std::vector<Activity> activities, Money indirect_rate,
                 std::optional<int> t_max, std::optional<Money> c_max);

  int size() const { return static_cast<int>(activities_.size()); }
  const std::vector<Activity>& activities() const { return activities_; }
  const Activity& activity(int index) const { return activities_[index]; }
  Money indirect_rate() const { return indirect_rate_; }
  std::optional<int> t_max() const { return t_max_; }
  std::optional<Money> c_max() const { return c_max_; }

  /// Activity indices in topological order of the precedence DAG.
  const std::vector<int>& topo_order() const { return topo_order_; }
  /// Immediate predecessors by activity index.
  const std::vector<std::vector<int>>& predecessors() const { return predecessors_; }
  /// Indices of activities with no real predecessor (children of the source).
  const std::vector<int>& entry_activities() const { return entries_; }
  /// Indices of activities with no real successor (parents of the sink).
  const std::vector<int>& exit_activities() const { return exits_; }

  bool valid_assignment(const Assignment& a) const;
  void require_valid(const Assignment& a) const;

 private:
  std::vector<Activity> activities_;
  Money indirect_rate_;
  std::optional<int> t_max_;
  std::optional<Money> c_max_;
  std::vector<std::vector<int>> predecessors_;
  std::vector<int> topo_order_;
  std::vector<int> entries_;
  std::vector<int> exits_;
};

/// Evaluates an assignment: project duration via one topological forward
/// pass (longest source-to-sink path under the chosen mode durations), total
/// cost as the direct cost sum plus duration times the indirect rate, and
/// feasibility flags under strict cap inequalities.
ObjectivePoint evaluate(const ProjectNetwork& network, const Assignment& a);

/// All distinct source-to-sink paths as sequences of activity ids. Throws
/// CapExceededError (naming the cap) when the instance has more paths.
std::vector<std::vector<int>> enumerate_paths(const ProjectNetwork& network,
                                              std::size_t cap = 100000);

/// Number of source-to-sink paths, counted by dynamic programming without
/// materializing them. Throws on overflow past 2^63-1.
std::int64_t count_paths(const ProjectNetwork& network);

/// Product of per-activity mode counts, exact at any magnitude.
BigInt count_schedules(const ProjectNetwork& network);

struct ParetoEntry {
  Assignment assignment;
  ObjectivePoint point;
};

/// Set of mutually non-dominated (assignment, objective point) pairs kept in
/// canonical order: ascending duration, then cost, then assignment. Duplicate
/// objective points are kept only when their assignments differ.
class ParetoArchive {
 public:
  ParetoArchive() = default;

  /// Builds an archive from arbitrary entries: filters to the feasible
  /// non-dominated subset under plain (duration, cost) minimization and
  /// canonicalizes. Intended for exhaustive sweeps; see moea::merge_fronts
  /// for the constrained merge used by the algorithms.
  static ParetoArchive of_nondominated(std::vector<ParetoEntry> entries);

  /// Inserts a feasible point, dropping it if dominated and evicting members
  /// it dominates. Keeps canonical order.
  void insert(ParetoEntry entry);

  /// Canonical ordering and duplicate removal over already-filtered entries.
  static ParetoArchive from_filtered(std::vector<ParetoEntry> entries);

  const std::vector<ParetoEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<ParetoEntry> entries_;
};

/// Exhaustive Pareto oracle: evaluates every assignment and returns the exact
/// non-dominated set over the feasible ones. Refuses instances whose schedule
/// count exceeds `cap`. Returns an empty archive (with a warning on stderr)
/// when no assignment is feasible.
ParetoArchive brute_force_pareto(const ProjectNetwork& network,
                                 std::uint64_t cap = 2000000);

/// Archive rows in canonical order: `duration,cost,modes`, the mode vector
/// space-separated.
std::string archive_csv(const ParetoArchive& archive);

}  // namespace tct
