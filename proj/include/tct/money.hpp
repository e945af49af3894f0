#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tct {

/// Currency amount held as an exact count of cents (two fractional digits).
/// All cost arithmetic in the library is integral so that Pareto filtering
/// and archive comparisons never depend on floating-point rounding.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_cents(std::int64_t cents) {
    Money m;
    m.cents_ = cents;
    return m;
  }

  /// Parses "1500", "1500.5" or "1500.50". Rejects more than two fractional
  /// digits and any trailing garbage.
  static Money parse(std::string_view text);

  constexpr std::int64_t cents() const { return cents_; }
  double value() const { return static_cast<double>(cents_) / 100.0; }

  /// Canonical rendering with exactly two fractional digits, e.g. "1500.50".
  std::string str() const;

  constexpr Money operator+(Money o) const { return from_cents(cents_ + o.cents_); }
  constexpr Money operator-(Money o) const { return from_cents(cents_ - o.cents_); }
  constexpr Money operator*(std::int64_t k) const { return from_cents(cents_ * k); }
  constexpr Money& operator+=(Money o) {
    cents_ += o.cents_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    cents_ -= o.cents_;
    return *this;
  }

  constexpr auto operator<=>(const Money&) const = default;

 private:
  std::int64_t cents_ = 0;
};

}  // namespace tct
