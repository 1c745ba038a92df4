#pragma once

#include "destsim/time.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace destsim {

/// One search-log line: who searched where, from which market, when.
struct SearchRecord {
  std::string user_id;      // opaque token, case-sensitive
  std::string destination;  // uppercased code
  std::string market;       // uppercased country code
  std::int64_t timestamp = 0;

  friend bool operator==(const SearchRecord&, const SearchRecord&) = default;
};

enum class LogFormat { csv, jsonl };

struct ParseStats {
  std::int64_t total_rows = 0;  // data rows seen (header excluded)
  std::int64_t malformed = 0;
  long first_bad_line = -1;  // 1-based file line of the first malformed row
};

struct ParseResult {
  std::vector<SearchRecord> records;
  ParseStats stats;
};

struct ParseOptions {
  // Above this malformed fraction the file is treated as the wrong format,
  // not a noisy one.
  double malformed_tolerance = 0.5;
};

/// Reads a search log. CSV needs a header row naming the four fields (any
/// column order); JSONL is one object per line with the same field names.
/// Malformed rows are counted, never silently dropped. Throws io_error on an
/// unreadable stream and format_error when malformed rows exceed tolerance.
ParseResult parse_log(std::istream& source, LogFormat format, const ParseOptions& options = {});

/// Opens and parses a file; format by extension (.jsonl/.ndjson -> jsonl,
/// anything else csv) unless given explicitly.
ParseResult parse_log_file(const std::string& path, std::optional<LogFormat> format = std::nullopt,
                           const ParseOptions& options = {});

/// Writes records in the ingest CSV format, header included.
void write_csv_log(std::ostream& out, std::span<const SearchRecord> records);

/// Keeps records with start <= timestamp < end, order preserved.
std::vector<SearchRecord> filter_window(std::span<const SearchRecord> records, std::int64_t start,
                                        std::int64_t end);

/// At most one record per (user, destination); the earliest timestamp wins,
/// placed at the pair's first occurrence.
std::vector<SearchRecord> dedupe(std::span<const SearchRecord> records);

/// Groups records by market. Keys sorted for deterministic iteration.
std::map<std::string, std::vector<SearchRecord>> partition_by_market(
    std::span<const SearchRecord> records);

}  // namespace destsim
