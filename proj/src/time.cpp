#include "destsim/time.hpp"

#include "destsim/core.hpp"

#include <cstdio>

namespace destsim {
namespace {

// Proleptic Gregorian day counts relative to 1970-01-01 (Howard Hinnant's
// civil date algorithms).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;        // [0, 146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);              // [0, 146096]
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);          // [0, 365]
  const unsigned mp = (5 * doy + 2) / 153;                               // [0, 11]
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool is_leap(std::int64_t y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::optional<std::int64_t> try_parse_timestamp(std::string_view iso) {
  // YYYY-MM-DDThh:mm:ssZ, fixed width
  if (iso.size() != 20) return std::nullopt;
  if (iso[4] != '-' || iso[7] != '-' || iso[10] != 'T' || iso[13] != ':' ||
      iso[16] != ':' || iso[19] != 'Z') {
    return std::nullopt;
  }
  const auto year = iso.substr(0, 4), month = iso.substr(5, 2), day = iso.substr(8, 2);
  const auto hour = iso.substr(11, 2), min = iso.substr(14, 2), sec = iso.substr(17, 2);
  if (!all_digits(year) || !all_digits(month) || !all_digits(day) ||
      !all_digits(hour) || !all_digits(min) || !all_digits(sec)) {
    return std::nullopt;
  }
  const int y = to_int(year), mo = to_int(month), d = to_int(day);
  const int h = to_int(hour), mi = to_int(min), s = to_int(sec);
  if (mo < 1 || mo > 12) return std::nullopt;
  if (d < 1 || d > static_cast<int>(days_in_month(y, static_cast<unsigned>(mo)))) {
    return std::nullopt;
  }
  if (h > 23 || mi > 59 || s > 59) return std::nullopt;
  const std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  return days * 86400 + h * 3600 + mi * 60 + s;
}

std::int64_t parse_timestamp(std::string_view iso) {
  if (auto t = try_parse_timestamp(iso)) return *t;
  throw format_error("invalid timestamp (expected YYYY-MM-DDThh:mm:ssZ): " + std::string(iso));
}

std::string format_timestamp(std::int64_t unix_seconds) {
  std::int64_t days = unix_seconds / 86400;
  std::int64_t rem = unix_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60), static_cast<long long>(rem % 60));
  return buf;
}

void WindowSpec::validate() const {
  if (!(train_start < train_end && train_end <= test_start && test_start < test_end)) {
    throw std::invalid_argument(
        "window spec must satisfy train_start < train_end <= test_start < test_end, got " +
        format_timestamp(train_start) + " / " + format_timestamp(train_end) + " / " +
        format_timestamp(test_start) + " / " + format_timestamp(test_end));
  }
}

}  // namespace destsim
