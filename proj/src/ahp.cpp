#include "tct/ahp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tct/errors.hpp"

namespace tct::ahp {

Decimal Decimal::parse(std::string_view text) {
  if (text.empty()) throw ValidationError("empty decimal");
  std::size_t pos = 0;
  if (text[0] == '+') ++pos;
  std::int64_t units = 0;
  bool any = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    units = units * 10 + (text[pos] - '0');
    any = true;
    ++pos;
  }
  std::int64_t nanos = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (++digits > 9)
        throw ValidationError("decimal '" + std::string(text) +
                              "' has more than nine fractional digits");
      nanos = nanos * 10 + (text[pos] - '0');
      any = true;
      ++pos;
    }
    while (digits < 9) {
      nanos *= 10;
      ++digits;
    }
  }
  if (!any || pos != text.size())
    throw ValidationError("bad decimal '" + std::string(text) + "'");
  Decimal d;
  d.nanos = units * 1000000000LL + nanos;
  return d;
}

Decimal Decimal::from_double(double v) {
  Decimal d;
  d.nanos = static_cast<std::int64_t>(std::llround(v * 1e9));
  return d;
}

std::string Decimal::str() const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%lld.%09lld", static_cast<long long>(nanos / 1000000000LL),
                static_cast<long long>(nanos % 1000000000LL));
  // trim trailing zeros but keep at least one fractional digit off
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

DecisionMatrix::DecisionMatrix(std::vector<std::string> alternatives,
                               std::vector<std::string> attributes,
                               std::vector<std::vector<Decimal>> values)
    : alternative_labels_(std::move(alternatives)), attribute_labels_(std::move(attributes)) {
  const std::size_t rows = alternative_labels_.size();
  const std::size_t cols = attribute_labels_.size();
  if (rows == 0 || cols == 0) throw ValidationError("decision matrix cannot be empty");
  if (values.size() != rows) throw ValidationError("decision matrix is not rectangular");
  raw_.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (values[i].size() != cols) throw ValidationError("decision matrix is not rectangular");
    raw_[i].resize(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      if (values[i][j].nanos <= 0)
        throw ValidationError("objective value for alternative '" + alternative_labels_[i] +
                              "', attribute '" + attribute_labels_[j] + "' must be positive");
      raw_[i][j] = values[i][j].nanos;
    }
  }
  column_sum_.assign(cols, 0);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) column_sum_[j] += raw_[i][j];
}

double DecisionMatrix::a(std::size_t alternative, std::size_t attribute) const {
  return static_cast<double>(raw_[alternative][attribute]) /
         static_cast<double>(column_sum_[attribute]);
}

std::pair<std::int64_t, std::int64_t> DecisionMatrix::a_exact(std::size_t alternative,
                                                              std::size_t attribute) const {
  return {raw_[alternative][attribute], column_sum_[attribute]};
}

std::vector<double> priority_vector(const DecisionMatrix& matrix, std::size_t attribute) {
  if (attribute >= matrix.attributes()) throw ValidationError("attribute index out of range");
  const std::size_t n = matrix.alternatives();

  // Geometric means of the ratio matrix rows, computed in log space.
  std::vector<double> log_a(n);
  for (std::size_t i = 0; i < n; ++i) log_a[i] = std::log(matrix.a(i, attribute));
  const double log_mean = std::accumulate(log_a.begin(), log_a.end(), 0.0) / static_cast<double>(n);

  std::vector<double> weights(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = std::exp(log_a[i] - log_mean);
    sum += weights[i];
  }
  for (double& w : weights) w /= sum;
  return weights;
}

RankVector rank_alternatives(const DecisionMatrix& matrix,
                             const std::optional<std::vector<double>>& attribute_weights) {
  const std::size_t n = matrix.alternatives();
  const std::size_t g = matrix.attributes();

  std::vector<double> weights;
  if (attribute_weights) {
    if (attribute_weights->size() != g)
      throw ValidationError("expected " + std::to_string(g) + " attribute weights, got " +
                            std::to_string(attribute_weights->size()));
    double sum = 0.0;
    for (double w : *attribute_weights) {
      if (w < 0.0) throw ValidationError("attribute weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("attribute weights must sum to 1");
    weights = *attribute_weights;
  } else {
    weights.assign(g, 1.0 / static_cast<double>(g));
  }

  RankVector rv;
  rv.priorities.assign(n, 0.0);
  for (std::size_t j = 0; j < g; ++j) {
    const std::vector<double> pv = priority_vector(matrix, j);
    for (std::size_t i = 0; i < n; ++i) rv.priorities[i] += weights[j] * pv[i];
  }

  // Competition ranking, ascending priority; equal priorities share the rank.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rv.priorities[a] < rv.priorities[b];
  });
  rv.ranks.assign(n, 0);
  rv.tied.assign(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && rv.priorities[order[k]] == rv.priorities[order[k - 1]]) {
      rv.ranks[order[k]] = rv.ranks[order[k - 1]];
      rv.tied[order[k]] = true;
      rv.tied[order[k - 1]] = true;
    } else {
      rv.ranks[order[k]] = static_cast<int>(k + 1);
    }
  }
  return rv;
}

namespace {

std::string fmt_priority(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string RankVector::to_csv(const std::vector<std::string>& alternative_labels) const {
  std::ostringstream out;
  out << "alternative,priority,rank\n";
  for (std::size_t i = 0; i < priorities.size(); ++i)
    out << alternative_labels[i] << "," << fmt_priority(priorities[i]) << "," << ranks[i] << "\n";
  return out.str();
}

std::string rank_audit_json(const DecisionMatrix& matrix, const RankVector& ranks) {
  nlohmann::json j;
  j["alternatives"] = matrix.alternative_labels();
  j["attributes"] = matrix.attribute_labels();
  auto pvs = nlohmann::json::array();
  for (std::size_t a = 0; a < matrix.attributes(); ++a) {
    const auto pv = priority_vector(matrix, a);
    pvs.push_back({{"attribute", matrix.attribute_labels()[a]}, {"priority_vector", pv}});
  }
  j["per_attribute"] = pvs;
  j["priorities"] = ranks.priorities;
  j["ranks"] = ranks.ranks;
  j["tied"] = ranks.tied;
  return j.dump(2) + "\n";
}

}  // namespace tct::ahp
