#pragma once

// UTC timestamps with millisecond resolution and ISO-8601 text form.

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "solartrack/errors.hpp"

namespace solartrack {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff][Z]`; a space may replace the `T`.
[[nodiscard]] inline Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, n = 0;
  const std::string buf(text);
  if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%*1[T ]%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &n) != 6) {
    throw ParseError("bad timestamp '" + buf + "'");
  }
  std::string_view rest = text.substr(static_cast<std::size_t>(n));
  int ms = 0;
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    int digits = 0;
    while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
      if (digits < 3) ms = ms * 10 + (rest.front() - '0');
      ++digits;
      rest.remove_prefix(1);
    }
    if (digits == 0) throw ParseError("bad timestamp '" + buf + "'");
    for (int k = digits; k < 3; ++k) ms *= 10;
  }
  if (!rest.empty() && rest != "Z") throw ParseError("bad timestamp '" + buf + "'");
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) throw ParseError("bad timestamp '" + buf + "'");
  return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms}};
}

/// `YYYY-MM-DDTHH:MM:SS`, with `.fff` appended only when milliseconds are non-zero.
[[nodiscard]] inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  hh_mm_ss<milliseconds> tod{t - day_point};
  char out[40];
  const int ms = static_cast<int>(tod.subseconds().count());
  if (ms != 0) {
    std::snprintf(out, sizeof out, "%04d-%02u-%02uT%02d:%02d:%02d.%03d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), ms);
  } else {
    std::snprintf(out, sizeof out, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
  }
  return out;
}

/// Colon-free form used in file names: `YYYYMMDDTHHMMSS`.
[[nodiscard]] inline std::string compact_timestamp(Timestamp t) {
  std::string s = format_timestamp(std::chrono::floor<std::chrono::seconds>(t));
  std::string out;
  for (char c : s) {
    if (c != '-' && c != ':') out.push_back(c);
  }
  return out;
}

[[nodiscard]] inline Timestamp parse_compact_timestamp(std::string_view text) {
  if (text.size() != 15 || text[8] != 'T') throw ParseError("bad compact timestamp '" + std::string(text) + "'");
  std::string iso;
  iso.append(text.substr(0, 4)).append("-").append(text.substr(4, 2)).append("-").append(text.substr(6, 2));
  iso.append("T").append(text.substr(9, 2)).append(":").append(text.substr(11, 2)).append(":").append(text.substr(13, 2));
  return parse_timestamp(iso);
}

[[nodiscard]] inline int year_of(Timestamp t) {
  return static_cast<int>(std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(t)}.year());
}

}  // namespace solartrack
