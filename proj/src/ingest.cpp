#include "destsim/ingest.hpp"

#include "destsim/core.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace destsim {
namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

// Normalizes and validates the four raw fields; nullopt marks the row malformed.
std::optional<SearchRecord> make_record(std::string user, std::string dest, std::string market,
                                        const std::string& ts) {
  SearchRecord rec;
  rec.user_id = trim(user);
  rec.destination = upper(trim(dest));
  rec.market = upper(trim(market));
  if (rec.user_id.empty() || rec.destination.empty() || rec.market.empty()) return std::nullopt;
  auto t = try_parse_timestamp(trim(ts));
  if (!t) return std::nullopt;
  rec.timestamp = *t;
  return rec;
}

constexpr std::string_view kFieldNames[4] = {"user_id", "destination", "market", "timestamp"};

ParseResult parse_csv(std::istream& in) {
  ParseResult out;
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line)) {
    if (in.bad()) throw io_error("failed to read log stream");
    throw format_error("empty file: expected a CSV header row", 1);
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split_csv(line);
  int col[4] = {-1, -1, -1, -1};
  for (size_t i = 0; i < header.size(); ++i) {
    std::string name = trim(header[i]);
    for (int f = 0; f < 4; ++f) {
      if (name == kFieldNames[f]) col[f] = static_cast<int>(i);
    }
  }
  for (int f = 0; f < 4; ++f) {
    if (col[f] < 0) {
      throw format_error("CSV header is missing field '" + std::string(kFieldNames[f]) + "'", 1);
    }
  }
  const auto width = static_cast<size_t>(*std::max_element(col, col + 4)) + 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++out.stats.total_rows;
    auto fields = split_csv(line);
    std::optional<SearchRecord> rec;
    if (fields.size() >= width) {
      rec = make_record(fields[col[0]], fields[col[1]], fields[col[2]], fields[col[3]]);
    }
    if (rec) {
      out.records.push_back(std::move(*rec));
    } else {
      ++out.stats.malformed;
      if (out.stats.first_bad_line < 0) out.stats.first_bad_line = line_no;
    }
  }
  if (in.bad()) throw io_error("failed while reading log stream");
  return out;
}

ParseResult parse_jsonl(std::istream& in) {
  ParseResult out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++out.stats.total_rows;
    std::optional<SearchRecord> rec;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_object()) {
      bool ok = true;
      for (auto name : kFieldNames) {
        auto key = std::string(name);
        if (!j.contains(key) || !j[key].is_string()) ok = false;
      }
      if (ok) {
        rec = make_record(j["user_id"].get<std::string>(), j["destination"].get<std::string>(),
                          j["market"].get<std::string>(), j["timestamp"].get<std::string>());
      }
    }
    if (rec) {
      out.records.push_back(std::move(*rec));
    } else {
      ++out.stats.malformed;
      if (out.stats.first_bad_line < 0) out.stats.first_bad_line = line_no;
    }
  }
  if (in.bad()) throw io_error("failed while reading log stream");
  return out;
}

void enforce_tolerance(const ParseStats& stats, const ParseOptions& options) {
  if (stats.total_rows > 0 &&
      static_cast<double>(stats.malformed) >
          options.malformed_tolerance * static_cast<double>(stats.total_rows)) {
    std::ostringstream msg;
    msg << stats.malformed << " of " << stats.total_rows
        << " rows malformed; first bad row at line " << stats.first_bad_line;
    throw format_error(msg.str(), stats.first_bad_line);
  }
}

}  // namespace

ParseResult parse_log(std::istream& source, LogFormat format, const ParseOptions& options) {
  if (!source) throw io_error("log stream is not readable");
  ParseResult out = format == LogFormat::csv ? parse_csv(source) : parse_jsonl(source);
  enforce_tolerance(out.stats, options);
  return out;
}

ParseResult parse_log_file(const std::string& path, std::optional<LogFormat> format,
                           const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open input file: " + path);
  LogFormat f = format.value_or(
      path.ends_with(".jsonl") || path.ends_with(".ndjson") ? LogFormat::jsonl : LogFormat::csv);
  return parse_log(in, f, options);
}

void write_csv_log(std::ostream& out, std::span<const SearchRecord> records) {
  out << "user_id,destination,market,timestamp\n";
  for (const auto& r : records) {
    out << r.user_id << ',' << r.destination << ',' << r.market << ','
        << format_timestamp(r.timestamp) << '\n';
  }
  if (!out) throw io_error("failed to write log stream");
}

std::vector<SearchRecord> filter_window(std::span<const SearchRecord> records, std::int64_t start,
                                        std::int64_t end) {
  if (start >= end) throw std::invalid_argument("filter_window: start must be before end");
  std::vector<SearchRecord> kept;
  for (const auto& r : records) {
    if (start <= r.timestamp && r.timestamp < end) kept.push_back(r);
  }
  return kept;
}

std::vector<SearchRecord> dedupe(std::span<const SearchRecord> records) {
  std::vector<SearchRecord> out;
  std::unordered_map<std::string, size_t> first_pos;  // (user \x1f dest) -> index in out
  first_pos.reserve(records.size());
  for (const auto& r : records) {
    std::string key = r.user_id;
    key.push_back('\x1f');
    key += r.destination;
    auto [it, inserted] = first_pos.try_emplace(std::move(key), out.size());
    if (inserted) {
      out.push_back(r);
    } else if (r.timestamp < out[it->second].timestamp) {
      out[it->second] = r;
    }
  }
  return out;
}

std::map<std::string, std::vector<SearchRecord>> partition_by_market(
    std::span<const SearchRecord> records) {
  std::map<std::string, std::vector<SearchRecord>> parts;
  for (const auto& r : records) parts[r.market].push_back(r);
  return parts;
}

}  // namespace destsim
