#include "tct/quality.hpp"

#include <algorithm>
#include <iostream>
#include <limits>

#include <nlohmann/json.hpp>

#include "tct/errors.hpp"

namespace tct::quality {

namespace {

using i128 = __int128;

double to_double(i128 v) {
  return static_cast<double>(static_cast<long double>(v));
}

void lattice_rec(int objectives, int l, int pos, int remaining, std::vector<int>& current,
                 std::vector<std::vector<int>>& out) {
  if (pos == objectives - 1) {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current[pos] = k;
    lattice_rec(objectives, l, pos + 1, remaining - k, current, out);
  }
}

}  // namespace

std::vector<double> WeightVectorSet::as_doubles(std::size_t i) const {
  std::vector<double> v;
  v.reserve(numerators_[i].size());
  for (int k : numerators_[i]) v.push_back(static_cast<double>(k) / l_);
  return v;
}

std::uint64_t weight_vector_count(int objectives, int l) {
  // C(l + J - 1, J - 1)
  std::uint64_t c = 1;
  for (int i = 1; i <= objectives - 1; ++i) {
    c = c * static_cast<std::uint64_t>(l + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

WeightVectorSet weight_vectors(int objectives, int min_count) {
  if (objectives < 2) throw ValidationError("weight vectors need at least two objectives");
  if (min_count < 1) throw ValidationError("weight vector min_count must be positive");
  int l = 1;
  while (weight_vector_count(objectives, l) < static_cast<std::uint64_t>(min_count)) ++l;
  std::vector<std::vector<int>> nums;
  std::vector<int> current(objectives, 0);
  lattice_rec(objectives, l, 0, l, current, nums);
  return WeightVectorSet(objectives, l, std::move(nums));
}

std::array<double, 2> equalization_factors(const std::array<double, 2>& ranges) {
  std::array<double, 2> factors;
  for (std::size_t j = 0; j < 2; ++j) {
    if (ranges[j] > 0.0) {
      factors[j] = 1.0 / ranges[j];
    } else {
      std::cerr << "warning: degenerate objective range, equalization factor set to 1\n";
      factors[j] = 1.0;
    }
  }
  return factors;
}

ReferenceFrame ideal_point_estimate(const ProjectNetwork& network) {
  const int n = network.size();

  std::int64_t min_dur = std::numeric_limits<std::int64_t>::max(), max_dur = 0;
  Money min_cost = Money::from_cents(std::numeric_limits<std::int64_t>::max());
  Money max_cost = Money::from_cents(std::numeric_limits<std::int64_t>::min());
  auto observe = [&](const ObjectivePoint& z) {
    min_dur = std::min<std::int64_t>(min_dur, z.duration);
    max_dur = std::max<std::int64_t>(max_dur, z.duration);
    min_cost = std::min(min_cost, z.total_cost);
    max_cost = std::max(max_cost, z.total_cost);
  };

  // Duration objective: per-activity minimum durations are exact because the
  // duration is a max over path sums of independent per-activity choices.
  Assignment fastest;
  fastest.modes.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& modes = network.activity(i).modes;
    int best = 0;
    for (int j = 1; j < static_cast<int>(modes.size()); ++j)
      if (modes[j].duration < modes[best].duration) best = j;
    fastest.modes[i] = best;
  }
  observe(evaluate(network, fastest));

  // Cost objective: steepest-descent single-mode swaps from the all-cheapest
  // start. Ties resolve to the first (activity, mode) in scan order.
  Assignment current;
  current.modes.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& modes = network.activity(i).modes;
    int best = 0;
    for (int j = 1; j < static_cast<int>(modes.size()); ++j)
      if (modes[j].direct_cost < modes[best].direct_cost) best = j;
    current.modes[i] = best;
  }
  ObjectivePoint cur_point = evaluate(network, current);
  observe(cur_point);
  for (;;) {
    int best_i = -1, best_j = -1;
    Money best_cost = cur_point.total_cost;
    for (int i = 0; i < n; ++i) {
      const int saved = current.modes[i];
      for (int j = 0; j < static_cast<int>(network.activity(i).modes.size()); ++j) {
        if (j == saved) continue;
        current.modes[i] = j;
        Money c = evaluate(network, current).total_cost;
        if (c < best_cost) {
          best_cost = c;
          best_i = i;
          best_j = j;
        }
      }
      current.modes[i] = saved;
    }
    if (best_i < 0) break;
    current.modes[best_i] = best_j;
    cur_point = evaluate(network, current);
    observe(cur_point);
  }

  ReferenceFrame frame;
  frame.ref_duration = min_dur;
  frame.ref_cost = min_cost;
  frame.range_duration = max_dur - min_dur;
  frame.range_cost = max_cost - min_cost;
  if (frame.range_duration == 0 || frame.range_cost.cents() == 0)
    std::cerr << "warning: degenerate objective range observed during ideal-point "
                 "estimation; equalization factor set to 1\n";
  return frame;
}

namespace {

struct ExactTerms {
  // Equalized weighted deltas as numerators over the shared denominator
  // l * duration_den * cost_den_cents.
  i128 dur_term;
  i128 cost_term;
};

ExactTerms exact_terms(const ObjectivePoint& z, const ReferenceFrame& frame,
                       std::span<const int> lambda_num) {
  const i128 dur_delta = static_cast<i128>(z.duration) - frame.ref_duration;
  const i128 cost_delta =
      static_cast<i128>(z.total_cost.cents()) - frame.ref_cost.cents();
  // Cost weights in currency units: cents / 100 cancels against the cents in
  // the denominator except in the degenerate case, where cost_den_cents is
  // already expressed as 100 cents per unit factor.
  return {static_cast<i128>(lambda_num[0]) * dur_delta * frame.cost_den_cents(),
          static_cast<i128>(lambda_num[1]) * cost_delta * frame.duration_den()};
}

i128 achievement_numerator(const ObjectivePoint& z, const ReferenceFrame& frame,
                           std::span<const int> lambda_num) {
  // Over denominator rho_den * l * duration_den * cost_den_cents.
  const ExactTerms t = exact_terms(z, frame, lambda_num);
  const i128 max_term = std::max(t.dur_term, t.cost_term);
  return frame.rho_den * max_term + frame.rho_num * (t.dur_term + t.cost_term);
}

}  // namespace

double scalarize_tchebycheff(const ObjectivePoint& z, const ReferenceFrame& frame,
                             std::span<const int> lambda_num, int lambda_den) {
  const ExactTerms t = exact_terms(z, frame, lambda_num);
  const double den = static_cast<double>(lambda_den) *
                     static_cast<double>(frame.duration_den()) *
                     static_cast<double>(frame.cost_den_cents());
  return to_double(std::max(t.dur_term, t.cost_term)) / den;
}

double scalarize_achievement(const ObjectivePoint& z, const ReferenceFrame& frame,
                             std::span<const int> lambda_num, int lambda_den) {
  const double den = static_cast<double>(frame.rho_den) * static_cast<double>(lambda_den) *
                     static_cast<double>(frame.duration_den()) *
                     static_cast<double>(frame.cost_den_cents());
  return to_double(achievement_numerator(z, frame, lambda_num)) / den;
}

double average_quality(std::span<const ObjectivePoint> points, const ReferenceFrame& frame,
                       const WeightVectorSet& weights) {
  if (points.empty()) throw ValidationError("average quality of an empty archive is undefined");
  if (weights.objectives() != 2)
    throw ValidationError("average quality expects two-objective weight vectors");

  // Distinct objective points are enough; the minimum per weight vector is
  // unaffected by multiplicity.
  std::vector<std::pair<std::int64_t, std::int64_t>> distinct;
  distinct.reserve(points.size());
  for (const ObjectivePoint& z : points)
    distinct.emplace_back(z.duration, z.total_cost.cents());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  i128 total = 0;  // over denominator rho_den * l * dur_den * cost_den * |weights|
  for (std::size_t w = 0; w < weights.size(); ++w) {
    const auto lambda = weights.numerators(w);
    i128 best = 0;
    bool first = true;
    for (const auto& [dur, cents] : distinct) {
      ObjectivePoint z;
      z.duration = static_cast<int>(dur);
      z.total_cost = Money::from_cents(cents);
      const i128 v = achievement_numerator(z, frame, lambda);
      if (first || v < best) {
        best = v;
        first = false;
      }
    }
    total += best;
  }
  const double den = static_cast<double>(frame.rho_den) *
                     static_cast<double>(weights.sampling_parameter()) *
                     static_cast<double>(frame.duration_den()) *
                     static_cast<double>(frame.cost_den_cents()) *
                     static_cast<double>(weights.size());
  return to_double(total) / den;
}

double average_quality(const ParetoArchive& archive, const ReferenceFrame& frame,
                       const WeightVectorSet& weights) {
  std::vector<ObjectivePoint> points;
  points.reserve(archive.size());
  for (const ParetoEntry& e : archive.entries()) points.push_back(e.point);
  return average_quality(points, frame, weights);
}

std::string ReferenceFrame::to_json(int weight_l) const {
  nlohmann::json j;
  j["reference_point"] = {{"duration", ref_duration}, {"cost", ref_cost.str()}};
  j["ranges"] = {{"duration", range_duration}, {"cost", range_cost.str()}};
  const auto f = equalization_factors();
  j["equalization_factors"] = {{"duration", f[0]}, {"cost", f[1]}};
  j["rho"] = {{"num", rho_num}, {"den", rho_den}};
  j["weight_sampling_parameter"] = weight_l;
  return j.dump(2) + "\n";
}

ReferenceFrame ReferenceFrame::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ReferenceFrame f;
  f.ref_duration = j.at("reference_point").at("duration").get<std::int64_t>();
  f.ref_cost = Money::parse(j.at("reference_point").at("cost").get<std::string>());
  f.range_duration = j.at("ranges").at("duration").get<std::int64_t>();
  f.range_cost = Money::parse(j.at("ranges").at("cost").get<std::string>());
  f.rho_num = j.at("rho").at("num").get<std::int64_t>();
  f.rho_den = j.at("rho").at("den").get<std::int64_t>();
  return f;
}

}  // namespace tct::quality
