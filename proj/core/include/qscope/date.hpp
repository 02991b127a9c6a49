#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace qscope {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date `YYYY-MM-DD`. Throws ParseError on
/// malformed text or an invalid calendar date (e.g. 2021-02-30).
Date parse_date(std::string_view text);

/// Like parse_date but returns nullopt instead of throwing.
std::optional<Date> try_parse_date(std::string_view text) noexcept;

std::string format_date(const Date& d);

/// A calendar month, ordered chronologically.
struct YearMonth {
  int year = 0;
  unsigned month = 1;  // 1..12

  static YearMonth of(const Date& d) {
    return {static_cast<int>(d.year()), static_cast<unsigned>(d.month())};
  }

  YearMonth next() const {
    return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
  }

  /// `YYYY-MM`
  std::string to_string() const;

  auto operator<=>(const YearMonth&) const = default;
};

}  // namespace qscope
