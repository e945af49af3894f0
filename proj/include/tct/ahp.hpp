#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tct::ahp {

/// Positive decimal held exactly as nanounits (nine fractional digits), so
/// column normalization stays exact.
struct Decimal {
  std::int64_t nanos = 0;

  static Decimal parse(std::string_view text);
  static Decimal from_double(double v);  // rounds to nine fractional digits
  double value() const { return static_cast<double>(nanos) / 1e9; }
  std::string str() const;
};

/// Alternatives-by-attributes matrix of measured objective values, column
/// normalized so each attribute's entries sum to exactly 1.
class DecisionMatrix {
 public:
  DecisionMatrix(std::vector<std::string> alternatives, std::vector<std::string> attributes,
                 std::vector<std::vector<Decimal>> values);  // values[row][col], all > 0

  std::size_t alternatives() const { return alternative_labels_.size(); }
  std::size_t attributes() const { return attribute_labels_.size(); }
  const std::vector<std::string>& alternative_labels() const { return alternative_labels_; }
  const std::vector<std::string>& attribute_labels() const { return attribute_labels_; }

  /// Normalized entry raw(i,j) / column_sum(j).
  double a(std::size_t alternative, std::size_t attribute) const;
  /// Exact normalized entry as numerator/denominator in nanounits.
  std::pair<std::int64_t, std::int64_t> a_exact(std::size_t alternative,
                                                std::size_t attribute) const;

 private:
  std::vector<std::string> alternative_labels_;
  std::vector<std::string> attribute_labels_;
  std::vector<std::vector<std::int64_t>> raw_;  // nanounits
  std::vector<std::int64_t> column_sum_;
};

/// Priority vector for one attribute: pairwise ratio matrix of the
/// normalized column, row geometric means, then normalization to sum 1.
std::vector<double> priority_vector(const DecisionMatrix& matrix, std::size_t attribute);

struct RankVector {
  std::vector<double> priorities;  // sums to 1
  std::vector<int> ranks;          // 1 = best (smallest priority); ties share the rank
  std::vector<bool> tied;

  std::string to_csv(const std::vector<std::string>& alternative_labels) const;
};

/// Weighted sum of per-attribute priority vectors, ranked ascending
/// (smaller priority means fewer iterations, hence better). Ties share the
/// best rank and skip the next (competition ranking).
RankVector rank_alternatives(const DecisionMatrix& matrix,
                             const std::optional<std::vector<double>>& attribute_weights = {});

/// Audit record of the whole pipeline: per-attribute priority vectors plus
/// the final priorities and ranks.
std::string rank_audit_json(const DecisionMatrix& matrix, const RankVector& ranks);

}  // namespace tct::ahp
