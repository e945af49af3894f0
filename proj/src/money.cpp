#include "tct/money.hpp"

#include <cctype>
#include <cstdio>

#include "tct/errors.hpp"

namespace tct {

Money Money::parse(std::string_view text) {
  if (text.empty()) throw ValidationError("empty money literal");
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '-' || text[pos] == '+') {
    negative = text[pos] == '-';
    ++pos;
  }
  if (pos == text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
    throw ValidationError("bad money literal '" + std::string(text) + "'");

  std::int64_t units = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    units = units * 10 + (text[pos] - '0');
    ++pos;
  }
  std::int64_t frac = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (++digits > 2)
        throw ValidationError("money literal '" + std::string(text) +
                              "' has more than two fractional digits");
      frac = frac * 10 + (text[pos] - '0');
      ++pos;
    }
    if (digits == 0)
      throw ValidationError("bad money literal '" + std::string(text) + "'");
    if (digits == 1) frac *= 10;
  }
  if (pos != text.size())
    throw ValidationError("bad money literal '" + std::string(text) + "'");

  std::int64_t cents = units * 100 + frac;
  return from_cents(negative ? -cents : cents);
}

std::string Money::str() const {
  std::int64_t c = cents_;
  const char* sign = "";
  if (c < 0) {
    sign = "-";
    c = -c;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", sign,
                static_cast<long long>(c / 100), static_cast<long long>(c % 100));
  return buf;
}

}  // namespace tct
