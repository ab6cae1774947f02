#pragma once

// Timestamps are UTC seconds. Input text carries (or is assigned) a fixed
// UTC offset; output is rendered back in a caller-chosen offset.

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "utcimap/errors.hpp"

namespace utcimap {

using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;
using Date = std::chrono::year_month_day;

namespace detail {

inline bool parse_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

// "+02:00", "-0530", "Z" -> offset in minutes east of UTC.
inline std::optional<int> parse_utc_offset(std::string_view s) {
  s = detail::trim(s);
  if (s == "Z" || s == "z") return 0;
  if (s.size() < 3 || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  int hh = 0, mm = 0;
  if (!detail::parse_digits(s, 1, 2, hh)) return std::nullopt;
  if (s.size() == 6 && s[3] == ':') {
    if (!detail::parse_digits(s, 4, 2, mm)) return std::nullopt;
  } else if (s.size() == 5) {
    if (!detail::parse_digits(s, 3, 2, mm)) return std::nullopt;
  } else if (s.size() != 3) {
    return std::nullopt;
  }
  if (hh > 14 || mm > 59) return std::nullopt;
  const int total = hh * 60 + mm;
  return s[0] == '-' ? -total : total;
}

inline std::optional<Date> parse_date(std::string_view s) {
  s = detail::trim(s);
  int y = 0, m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!detail::parse_digits(s, 0, 4, y) || !detail::parse_digits(s, 5, 2, m) ||
      !detail::parse_digits(s, 8, 2, d))
    return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

// "HH:MM" or "HH:MM:SS" -> seconds after midnight.
inline std::optional<Seconds> parse_clock(std::string_view s) {
  s = detail::trim(s);
  int h = 0, m = 0, sec = 0;
  if (s.size() < 5 || s[2] != ':') return std::nullopt;
  if (!detail::parse_digits(s, 0, 2, h) || !detail::parse_digits(s, 3, 2, m)) return std::nullopt;
  if (s.size() == 8) {
    if (s[5] != ':' || !detail::parse_digits(s, 6, 2, sec)) return std::nullopt;
  } else if (s.size() != 5) {
    return std::nullopt;
  }
  if (h > 24 || m > 59 || sec > 59) return std::nullopt;
  return Seconds{h * 3600 + m * 60 + sec};
}

// ISO 8601 "YYYY-MM-DDTHH:MM[:SS][.fff](Z|+HH:MM)". A space may replace 'T'.
// Timestamps without an offset take `default_offset_minutes` when given and
// are rejected otherwise.
inline std::optional<Instant> parse_timestamp(std::string_view s,
                                              std::optional<int> default_offset_minutes = std::nullopt) {
  s = detail::trim(s);
  if (s.size() < 16) return std::nullopt;
  const auto date = parse_date(s.substr(0, 10));
  if (!date || (s[10] != 'T' && s[10] != ' ')) return std::nullopt;
  int h = 0, m = 0, sec = 0;
  if (!detail::parse_digits(s, 11, 2, h) || s[13] != ':' || !detail::parse_digits(s, 14, 2, m))
    return std::nullopt;
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (!detail::parse_digits(s, pos + 1, 2, sec)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;  // sub-second part dropped
    }
  }
  if (h > 23 || m > 59 || sec > 60) return std::nullopt;
  std::optional<int> offset;
  if (pos == s.size()) {
    offset = default_offset_minutes;
  } else {
    offset = parse_utc_offset(s.substr(pos));
  }
  if (!offset) return std::nullopt;
  const auto local = std::chrono::sys_days{*date} + std::chrono::hours{h} + std::chrono::minutes{m} +
                     Seconds{sec};
  return Instant{local - std::chrono::minutes{*offset}};
}

inline std::string format_utc_offset(int offset_minutes) {
  const int a = offset_minutes < 0 ? -offset_minutes : offset_minutes;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", offset_minutes < 0 ? '-' : '+', a / 60, a % 60);
  return buf;
}

inline std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

inline std::string format_timestamp(Instant t, int offset_minutes = 0) {
  const auto local = t + std::chrono::minutes{offset_minutes};
  const auto day = std::chrono::floor<std::chrono::days>(local);
  const std::chrono::hh_mm_ss tod{local - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02ld:%02ld:%02ld", format_date(Date{day}).c_str(),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return std::string{buf} + format_utc_offset(offset_minutes);
}

// Local calendar date of an instant.
inline Date local_date(Instant t, int offset_minutes) {
  return Date{std::chrono::floor<std::chrono::days>(t + std::chrono::minutes{offset_minutes})};
}

// Seconds since local midnight.
inline Seconds local_time_of_day(Instant t, int offset_minutes) {
  const auto local = t + std::chrono::minutes{offset_minutes};
  return local - std::chrono::floor<std::chrono::days>(local);
}

// UTC instant of a local wall-clock time on a local date.
inline Instant local_instant(Date d, Seconds time_of_day, int offset_minutes) {
  return Instant{std::chrono::sys_days{d} + time_of_day - std::chrono::minutes{offset_minutes}};
}

inline double hours_between(Instant a, Instant b) {
  return std::chrono::duration<double, std::ratio<3600>>(b - a).count();
}

}  // namespace utcimap
