#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace coincast {

// A UTC calendar day, stored as days since 1970-01-01. A day record spans
// 00:00-23:59 of that date.
struct Date {
  std::int64_t days = 0;

  auto operator<=>(const Date&) const = default;

  Date next() const { return Date{days + 1}; }
  Date prev() const { return Date{days - 1}; }
};

inline Date operator+(Date d, std::int64_t n) { return Date{d.days + n}; }
inline std::int64_t operator-(Date a, Date b) { return a.days - b.days; }

// Parses strict ISO-8601 YYYY-MM-DD. Throws DataError on malformed input.
Date parse_date(const std::string& text);

// Formats as YYYY-MM-DD.
std::string format_date(Date d);

// Civil calendar conversions (proleptic Gregorian).
std::int64_t days_from_civil(int y, unsigned m, unsigned day);
void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& day);

}  // namespace coincast
