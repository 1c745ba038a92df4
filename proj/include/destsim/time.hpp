#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace destsim {

// All instants are Unix seconds, UTC, second resolution.

/// Parses strict ISO-8601 UTC, `YYYY-MM-DDThh:mm:ssZ`. Empty optional on
/// any malformed or out-of-range field (including invalid calendar dates).
std::optional<std::int64_t> try_parse_timestamp(std::string_view iso);

/// Throwing variant for CLI flags and config values.
std::int64_t parse_timestamp(std::string_view iso);

std::string format_timestamp(std::int64_t unix_seconds);

/// Half-open interval [start, end).
struct TimeWindow {
  std::int64_t start = 0;
  std::int64_t end = 0;

  bool contains(std::int64_t t) const { return start <= t && t < end; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Train window followed by the test window it predicts.
struct WindowSpec {
  std::int64_t train_start = 0;
  std::int64_t train_end = 0;
  std::int64_t test_start = 0;
  std::int64_t test_end = 0;

  TimeWindow train() const { return {train_start, train_end}; }
  TimeWindow test() const { return {test_start, test_end}; }

  // train_start < train_end <= test_start < test_end
  void validate() const;

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

}  // namespace destsim
