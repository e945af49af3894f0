#include "tct/core.hpp"

#include <algorithm>
#include <iostream>
#include <queue>

#include "tct/errors.hpp"

namespace tct {

ProjectNetwork::ProjectNetwork(std::vector<Activity> activities, Money indirect_rate,
                               std::optional<int> t_max, std::optional<Money> c_max)
    : activities_(std::move(activities)),
      indirect_rate_(indirect_rate),
      t_max_(t_max),
      c_max_(c_max) {
  const int n = size();
  if (n < 1) throw ValidationError("a project network needs at least one activity");
  if (indirect_rate_.cents() < 0) throw ValidationError("indirect rate must be non-negative");
  if (t_max_ && *t_max_ <= 0) throw ValidationError("TMAX must be positive");
  if (c_max_ && c_max_->cents() <= 0) throw ValidationError("CMAX must be positive");

  for (int i = 0; i < n; ++i) {
    Activity& act = activities_[i];
    if (act.id != i + 1)
      throw ValidationError("activity ids must be 1..N in order; got id " +
                            std::to_string(act.id) + " at position " + std::to_string(i + 1));
    if (act.modes.empty())
      throw ValidationError("activity " + std::to_string(act.id) + " has no execution modes");
    for (const ExecutionMode& m : act.modes) {
      if (m.duration < 0)
        throw ValidationError("activity " + std::to_string(act.id) + " has a negative duration");
      if (m.direct_cost.cents() < 0)
        throw ValidationError("activity " + std::to_string(act.id) + " has a negative cost");
      if (m.has_decomposition) {
        if (m.material_cost.cents() < 0 || m.daily_rate.cents() < 0)
          throw ValidationError("activity " + std::to_string(act.id) +
                                " has a negative cost decomposition");
        if (m.material_cost + m.daily_rate * m.duration != m.direct_cost)
          throw ValidationError("activity " + std::to_string(act.id) +
                                ": direct cost does not equal material cost plus duration times "
                                "daily rate");
      }
    }
    std::sort(act.successors.begin(), act.successors.end());
    act.successors.erase(std::unique(act.successors.begin(), act.successors.end()),
                         act.successors.end());
    for (int s : act.successors) {
      if (s == act.id)
        throw ValidationError("activity " + std::to_string(act.id) + " lists itself as successor");
      if (s < 1 || s > n)
        throw ValidationError("activity " + std::to_string(act.id) +
                              " has dangling successor id " + std::to_string(s));
    }
  }

  predecessors_.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int s : activities_[i].successors) predecessors_[s - 1].push_back(i);
  for (auto& p : predecessors_) std::sort(p.begin(), p.end());

  // Kahn's algorithm; leftover nodes mean a cycle.
  std::vector<int> indegree(n);
  for (int i = 0; i < n; ++i) indegree[i] = static_cast<int>(predecessors_[i].size());
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  topo_order_.reserve(n);
  while (!ready.empty()) {
    int i = ready.top();
    ready.pop();
    topo_order_.push_back(i);
    for (int s : activities_[i].successors)
      if (--indegree[s - 1] == 0) ready.push(s - 1);
  }
  if (static_cast<int>(topo_order_.size()) != n)
    throw ValidationError("precedence graph contains a cycle");

  for (int i = 0; i < n; ++i) {
    if (predecessors_[i].empty()) entries_.push_back(i);
    if (activities_[i].successors.empty()) exits_.push_back(i);
  }
}

bool ProjectNetwork::valid_assignment(const Assignment& a) const {
  if (static_cast<int>(a.modes.size()) != size()) return false;
  for (int i = 0; i < size(); ++i)
    if (a.modes[i] < 0 || a.modes[i] >= static_cast<int>(activities_[i].modes.size()))
      return false;
  return true;
}

void ProjectNetwork::require_valid(const Assignment& a) const {
  if (static_cast<int>(a.modes.size()) != size())
    throw ValidationError("assignment length " + std::to_string(a.modes.size()) +
                          " does not match activity count " + std::to_string(size()));
  for (int i = 0; i < size(); ++i)
    if (a.modes[i] < 0 || a.modes[i] >= static_cast<int>(activities_[i].modes.size()))
      throw ValidationError("invalid mode index " + std::to_string(a.modes[i]) +
                            " for activity " + std::to_string(i + 1));
}

ObjectivePoint evaluate(const ProjectNetwork& network, const Assignment& a) {
  network.require_valid(a);
  const int n = network.size();

  // Earliest finish per activity; project duration is the largest finish.
  std::vector<std::int64_t> finish(n, 0);
  std::int64_t duration = 0;
  Money direct;
  for (int i : network.topo_order()) {
    std::int64_t start = 0;
    for (int p : network.predecessors()[i]) start = std::max(start, finish[p]);
    const ExecutionMode& mode = network.activity(i).modes[a.modes[i]];
    finish[i] = start + mode.duration;
    duration = std::max(duration, finish[i]);
    direct += mode.direct_cost;
  }

  ObjectivePoint z;
  z.duration = static_cast<int>(duration);
  z.total_cost = direct + network.indirect_rate() * duration;

  double violation = 0.0;
  if (network.t_max()) {
    z.feasible_time = z.duration < *network.t_max();
    if (z.duration > *network.t_max())
      violation += static_cast<double>(z.duration - *network.t_max()) /
                   static_cast<double>(*network.t_max());
  }
  if (network.c_max()) {
    z.feasible_cost = z.total_cost < *network.c_max();
    if (z.total_cost > *network.c_max())
      violation += static_cast<double>((z.total_cost - *network.c_max()).cents()) /
                   static_cast<double>(network.c_max()->cents());
  }
  z.violation = z.feasible() ? 0.0 : violation;
  return z;
}

namespace {

void extend_path(const ProjectNetwork& network, int i, std::vector<int>& prefix,
                 std::vector<std::vector<int>>& out, std::size_t cap) {
  prefix.push_back(network.activity(i).id);
  if (network.activity(i).successors.empty()) {
    if (out.size() >= cap)
      throw CapExceededError("path enumeration exceeded the cap of " + std::to_string(cap) +
                             " paths");
    out.push_back(prefix);
  } else {
    for (int s : network.activity(i).successors)
      extend_path(network, s - 1, prefix, out, cap);
  }
  prefix.pop_back();
}

}  // namespace

std::vector<std::vector<int>> enumerate_paths(const ProjectNetwork& network, std::size_t cap) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  for (int e : network.entry_activities()) extend_path(network, e, prefix, out, cap);
  return out;
}

std::int64_t count_paths(const ProjectNetwork& network) {
  const int n = network.size();
  std::vector<std::int64_t> paths_from(n, 0);
  const auto& order = network.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int i = *it;
    const auto& succ = network.activity(i).successors;
    if (succ.empty()) {
      paths_from[i] = 1;
      continue;
    }
    std::int64_t total = 0;
    for (int s : succ) {
      total += paths_from[s - 1];
      if (total < 0) throw CapExceededError("path count overflows a 64-bit integer");
    }
    paths_from[i] = total;
  }
  std::int64_t total = 0;
  for (int e : network.entry_activities()) {
    total += paths_from[e];
    if (total < 0) throw CapExceededError("path count overflows a 64-bit integer");
  }
  return total;
}

BigInt count_schedules(const ProjectNetwork& network) {
  BigInt product = 1;
  for (const Activity& act : network.activities()) product *= act.modes.size();
  return product;
}

namespace {

bool plain_dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  return a.duration <= b.duration && a.total_cost <= b.total_cost &&
         (a.duration < b.duration || a.total_cost < b.total_cost);
}

bool canonical_less(const ParetoEntry& a, const ParetoEntry& b) {
  if (a.point.duration != b.point.duration) return a.point.duration < b.point.duration;
  if (a.point.total_cost != b.point.total_cost) return a.point.total_cost < b.point.total_cost;
  return a.assignment < b.assignment;
}

bool same_entry(const ParetoEntry& a, const ParetoEntry& b) {
  return a.point.same_objectives(b.point) && a.assignment == b.assignment;
}

}  // namespace

ParetoArchive ParetoArchive::from_filtered(std::vector<ParetoEntry> entries) {
  std::sort(entries.begin(), entries.end(), canonical_less);
  entries.erase(std::unique(entries.begin(), entries.end(), same_entry), entries.end());
  ParetoArchive a;
  a.entries_ = std::move(entries);
  return a;
}

ParetoArchive ParetoArchive::of_nondominated(std::vector<ParetoEntry> entries) {
  ParetoArchive a;
  for (auto& e : entries)
    if (e.point.feasible()) a.insert(std::move(e));
  return a;
}

void ParetoArchive::insert(ParetoEntry entry) {
  for (const ParetoEntry& m : entries_) {
    if (plain_dominates(m.point, entry.point)) return;
    if (same_entry(m, entry)) return;
  }
  std::erase_if(entries_, [&](const ParetoEntry& m) {
    return plain_dominates(entry.point, m.point);
  });
  auto pos = std::lower_bound(entries_.begin(), entries_.end(), entry, canonical_less);
  entries_.insert(pos, std::move(entry));
}

ParetoArchive brute_force_pareto(const ProjectNetwork& network, std::uint64_t cap) {
  BigInt schedules = count_schedules(network);
  if (schedules > cap)
    throw CapExceededError("exhaustive sweep refused: " + schedules.str() +
                           " schedules exceed the cap of " + std::to_string(cap));

  const int n = network.size();
  Assignment a;
  a.modes.assign(n, 0);
  ParetoArchive archive;
  bool any_feasible = false;
  for (;;) {
    ObjectivePoint z = evaluate(network, a);
    if (z.feasible()) {
      any_feasible = true;
      archive.insert({a, z});
    }
    // odometer increment over mode indices
    int i = 0;
    for (; i < n; ++i) {
      if (++a.modes[i] < static_cast<int>(network.activity(i).modes.size())) break;
      a.modes[i] = 0;
    }
    if (i == n) break;
  }
  if (!any_feasible)
    std::cerr << "warning: no feasible assignment under the given caps; archive is empty\n";
  return archive;
}

std::string archive_csv(const ParetoArchive& archive) {
  std::string out = "duration,cost,modes\n";
  for (const ParetoEntry& e : archive.entries()) {
    out += std::to_string(e.point.duration);
    out += ',';
    out += e.point.total_cost.str();
    out += ',';
    for (std::size_t i = 0; i < e.assignment.modes.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(e.assignment.modes[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace tct
