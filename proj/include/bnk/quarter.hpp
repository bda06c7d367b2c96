#pragma once

#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "bnk/error.hpp"

namespace bnk {

/// Calendar quarter; ordered and step-able.
struct Quarter {
  int year = 2000;
  int q = 1;  // 1..4

  constexpr long index() const { return static_cast<long>(year) * 4 + (q - 1); }
  static constexpr Quarter from_index(long idx) {
    const long y = idx >= 0 ? idx / 4 : (idx - 3) / 4;
    return {static_cast<int>(y), static_cast<int>(idx - y * 4) + 1};
  }

  constexpr Quarter operator+(long n) const { return from_index(index() + n); }
  constexpr Quarter operator-(long n) const { return from_index(index() - n); }
  constexpr long operator-(const Quarter& other) const { return index() - other.index(); }

  constexpr auto operator<=>(const Quarter& o) const { return index() <=> o.index(); }
  constexpr bool operator==(const Quarter& o) const = default;

  std::string to_string() const { return std::to_string(year) + "Q" + std::to_string(q); }

  /// First calendar day of the quarter, as FRED labels quarterly observations.
  std::string iso_date() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-01", year, 3 * (q - 1) + 1);
    return buf;
  }

  /// Accepts "2020Q1", "2020-Q1", "2020q1".
  static Quarter parse(std::string_view s) {
    int y = 0, qq = 0;
    char sep1 = 0;
    std::string str(s);
    if (std::sscanf(str.c_str(), "%d%c%d", &y, &sep1, &qq) == 3 && (sep1 == 'Q' || sep1 == 'q') &&
        qq >= 1 && qq <= 4 && str.size() <= 7) {
      return {y, qq};
    }
    char sep2 = 0;
    if (std::sscanf(str.c_str(), "%d-%c%d", &y, &sep2, &qq) == 3 && (sep2 == 'Q' || sep2 == 'q') && qq >= 1 &&
        qq <= 4) {
      return {y, qq};
    }
    fail(ErrorKind::parse, "invalid quarter '" + str + "' (expected e.g. 2020Q1)");
  }

  /// ISO year-month-day where the month opens a quarter (01, 04, 07, 10).
  static Quarter from_iso_date(std::string_view s) {
    int y = 0, m = 0, d = 0;
    std::string str(s);
    int consumed = 0;
    if (std::sscanf(str.c_str(), "%4d-%2d-%2d%n", &y, &m, &d, &consumed) != 3 ||
        consumed != static_cast<int>(str.size()) || m < 1 || m > 12 || d < 1 || d > 31) {
      fail(ErrorKind::parse, "invalid date '" + str + "' (expected YYYY-MM-DD)");
    }
    if ((m - 1) % 3 != 0 || d != 1) {
      fail(ErrorKind::ordering, "date '" + str + "' is not the first day of a quarter");
    }
    return {y, (m - 1) / 3 + 1};
  }
};

}  // namespace bnk
