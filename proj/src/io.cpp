#include "destsim/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace destsim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  return format_timestamp(static_cast<std::int64_t>(t));
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw io_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot open " + path.string() + " for reading");
  }
  return in;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw io_error("failed while writing " + path.string());
  }
}

ordered_json window_json(const std::optional<TimeWindow>& window) {
  if (!window) return nullptr;
  return ordered_json{{"start", format_timestamp(window->start)},
                      {"end", format_timestamp(window->end)}};
}

std::optional<TimeWindow> window_from_json(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return TimeWindow{parse_timestamp(j.at("start").get<std::string>()),
                    parse_timestamp(j.at("end").get<std::string>())};
}

ordered_json load_sidecar(const std::filesystem::path& data_path) {
  auto in = open_for_read(sidecar_path(data_path));
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw format_error("invalid JSON in " + sidecar_path(data_path).string());
  }
  return j;
}

// Splits a triplet row; the formats here never quote fields.
bool split3(const std::string& line, std::string_view out[3]) {
  const size_t c1 = line.find(',');
  if (c1 == std::string::npos) return false;
  const size_t c2 = line.find(',', c1 + 1);
  if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) return false;
  std::string_view sv = line;
  out[0] = sv.substr(0, c1);
  out[1] = sv.substr(c1 + 1, c2 - c1 - 1);
  out[2] = sv.substr(c2 + 1);
  if (!out[2].empty() && out[2].back() == '\r') out[2].remove_suffix(1);
  return true;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& data_path) {
  std::filesystem::path p = data_path;
  p += ".json";
  return p;
}

void save_similarity(const SimilarityMatrix& s, const std::filesystem::path& csv_path,
                     const SaveOptions& options) {
  if (static_cast<Index>(s.dest_codes.size()) != s.n()) {
    throw std::invalid_argument("save_similarity: matrix has no destination codes");
  }

  auto csv = open_for_write(csv_path);
  csv << "dest_i,dest_j,value\n";
  const Index n = s.n();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j || s.values(i, j) == 0.0) continue;
      csv << s.dest_codes[static_cast<size_t>(i)] << ','
          << s.dest_codes[static_cast<size_t>(j)] << ',' << full_precision(s.values(i, j))
          << '\n';
    }
  }
  finish_write(csv, csv_path);

  ordered_json params = ordered_json::object();
  if (s.w) params["w"] = *s.w;
  if (s.popularity_denominator) {
    params["popularity_denominator"] = std::string(to_string(*s.popularity_denominator));
  }

  ordered_json meta;
  meta["measure"] = std::string(to_string(s.measure));
  meta["params"] = params;
  meta["n"] = n;
  meta["market"] = s.market;
  meta["window"] = window_json(s.window);
  meta["dest_codes"] = s.dest_codes;
  if (!options.deterministic) meta["created_at"] = now_utc();

  auto side = open_for_write(sidecar_path(csv_path));
  side << meta.dump(2) << '\n';
  finish_write(side, sidecar_path(csv_path));
}

SimilarityMatrix load_similarity(const std::filesystem::path& csv_path) {
  const auto meta = load_sidecar(csv_path);

  SimilarityMatrix s;
  try {
    const auto tag = meta.at("measure").get<std::string>();
    try {
      s.measure = parse_measure(tag);
    } catch (const domain_error&) {
      throw format_error("sidecar: unknown measure '" + tag + "'");
    }
    const auto n = meta.at("n").get<Index>();
    s.dest_codes = meta.at("dest_codes").get<std::vector<std::string>>();
    if (static_cast<Index>(s.dest_codes.size()) != n) {
      throw format_error("sidecar: dest_codes length does not match n");
    }
    s.market = meta.at("market").get<std::string>();
    s.window = window_from_json(meta.at("window"));
    const auto& params = meta.at("params");
    if (params.contains("w")) s.w = params["w"].get<double>();
    if (params.contains("popularity_denominator")) {
      const auto d = params["popularity_denominator"].get<std::string>();
      if (d == "n") {
        s.popularity_denominator = PopularityDenominator::destinations;
      } else if (d == "m") {
        s.popularity_denominator = PopularityDenominator::users;
      } else {
        throw format_error("sidecar: unknown popularity_denominator '" + d + "'");
      }
    }
    s.values = MatrixX<double>::Zero(n, n);
  } catch (const ordered_json::exception& e) {
    throw format_error("sidecar " + sidecar_path(csv_path).string() + ": " + e.what());
  }

  std::unordered_map<std::string_view, Index> index;
  index.reserve(s.dest_codes.size());
  for (size_t i = 0; i < s.dest_codes.size(); ++i) {
    index.emplace(s.dest_codes[i], static_cast<Index>(i));
  }

  auto csv = open_for_read(csv_path);
  std::string line;
  long line_no = 0;
  if (!std::getline(csv, line)) {
    throw format_error("empty similarity file " + csv_path.string(), 1);
  }
  ++line_no;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::string_view f[3];
    if (!split3(line, f)) {
      throw format_error("expected dest_i,dest_j,value", line_no);
    }
    const auto it_i = index.find(f[0]);
    const auto it_j = index.find(f[1]);
    if (it_i == index.end() || it_j == index.end()) {
      throw format_error("destination code not in sidecar index", line_no);
    }
    if (it_i->second == it_j->second) {
      throw format_error("diagonal entry in similarity file", line_no);
    }
    char* end = nullptr;
    const std::string value_str(f[2]);
    const double v = std::strtod(value_str.c_str(), &end);
    if (end != value_str.c_str() + value_str.size() || value_str.empty()) {
      throw format_error("bad value '" + value_str + "'", line_no);
    }
    s.values(it_i->second, it_j->second) = v;
  }
  return s;
}

void save_interaction(const InteractionMatrix& mat, const std::filesystem::path& csv_path,
                      const SaveOptions& options) {
  auto csv = open_for_write(csv_path);
  csv << "user_idx,dest_idx,value\n";
  for (Index u = 0; u < mat.user_count(); ++u) {
    for (const auto d : mat.user_row(u)) {
      csv << u << ',' << d << ",1\n";
    }
  }
  finish_write(csv, csv_path);

  ordered_json meta;
  meta["m"] = mat.user_count();
  meta["n"] = mat.dest_count();
  meta["market"] = mat.market();
  meta["window"] = window_json(mat.window());
  meta["user_ids"] = mat.user_ids();
  meta["dest_codes"] = mat.dest_codes();
  if (!options.deterministic) meta["created_at"] = now_utc();

  auto side = open_for_write(sidecar_path(csv_path));
  side << meta.dump(2) << '\n';
  finish_write(side, sidecar_path(csv_path));
}

InteractionMatrix load_interaction(const std::filesystem::path& csv_path) {
  const auto meta = load_sidecar(csv_path);

  std::vector<std::string> user_ids, dest_codes;
  std::string market;
  std::optional<TimeWindow> window;
  Index m = 0, n = 0;
  try {
    m = meta.at("m").get<Index>();
    n = meta.at("n").get<Index>();
    user_ids = meta.at("user_ids").get<std::vector<std::string>>();
    dest_codes = meta.at("dest_codes").get<std::vector<std::string>>();
    market = meta.at("market").get<std::string>();
    window = window_from_json(meta.at("window"));
  } catch (const ordered_json::exception& e) {
    throw format_error("sidecar " + sidecar_path(csv_path).string() + ": " + e.what());
  }
  if (static_cast<Index>(user_ids.size()) != m ||
      static_cast<Index>(dest_codes.size()) != n) {
    throw format_error("sidecar: index maps do not match m/n");
  }

  std::vector<std::vector<std::int32_t>> rows(static_cast<size_t>(m));
  auto csv = open_for_read(csv_path);
  std::string line;
  long line_no = 0;
  if (!std::getline(csv, line)) {
    throw format_error("empty interaction file " + csv_path.string(), 1);
  }
  ++line_no;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::string_view f[3];
    if (!split3(line, f) || f[2] != "1") {
      throw format_error("expected user_idx,dest_idx,1", line_no);
    }
    char* end = nullptr;
    const std::string u_str(f[0]), d_str(f[1]);
    const long u = std::strtol(u_str.c_str(), &end, 10);
    const bool u_ok = end == u_str.c_str() + u_str.size() && !u_str.empty();
    const long d = std::strtol(d_str.c_str(), &end, 10);
    const bool d_ok = end == d_str.c_str() + d_str.size() && !d_str.empty();
    if (!u_ok || !d_ok || u < 0 || u >= m || d < 0 || d >= n) {
      throw format_error("entry out of range", line_no);
    }
    rows[static_cast<size_t>(u)].push_back(static_cast<std::int32_t>(d));
  }

  try {
    return InteractionMatrix::from_rows(std::move(user_ids), std::move(dest_codes),
                                        std::move(rows), std::move(market), window);
  } catch (const std::invalid_argument& e) {
    throw format_error("interaction file " + csv_path.string() + ": " + e.what());
  }
}

namespace {

ordered_json outcome_json(const MeasureOutcome& o) {
  ordered_json j;
  j["measure"] = std::string(to_string(o.measure));
  if (o.w) j["w"] = *o.w;
  j["hits"] = o.hits;
  j["eligible"] = o.eligible;
  if (o.accuracy) {
    j["accuracy"] = *o.accuracy;
  } else {
    j["accuracy"] = nullptr;
  }
  return j;
}

ordered_json period_json(const EvalReport& r) {
  ordered_json j;
  j["train_window"] = window_json(r.train_window);
  j["test_window"] = window_json(r.test_window);
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["eligible_users"] = r.eligible_users;
  j["skipped_users"] = r.skipped_users;
  j["measures"] = ordered_json::array();
  for (const auto& o : r.outcomes) j["measures"].push_back(outcome_json(o));
  return j;
}

}  // namespace

void save_market_report(const std::string& market, const std::vector<EvalReport>& periods,
                        const std::filesystem::path& json_path,
                        const SaveOptions& options) {
  if (periods.empty()) {
    throw std::invalid_argument("save_market_report: no evaluation periods");
  }
  ordered_json j;
  j["market"] = market;
  j["periods"] = ordered_json::array();
  for (const auto& r : periods) j["periods"].push_back(period_json(r));
  if (!options.deterministic) j["created_at"] = now_utc();

  auto out = open_for_write(json_path);
  out << j.dump(2) << '\n';
  finish_write(out, json_path);
}

void save_summary_csv(const std::vector<EvalReport>& reports,
                      const std::vector<MeasureSummary>& footers,
                      const std::filesystem::path& csv_path) {
  if (reports.empty()) {
    throw std::invalid_argument("save_summary_csv: no reports");
  }

  std::vector<std::string> keys;
  for (const auto& o : reports.front().outcomes) keys.push_back(variant_key(o.measure, o.w));

  auto out = open_for_write(csv_path);
  out << "market,train_start,train_end,test_start,test_end,eligible_users,skipped_users";
  for (const auto& key : keys) out << ',' << key;
  out << '\n';

  for (const auto& r : reports) {
    std::unordered_map<std::string, const MeasureOutcome*> by_key;
    for (const auto& o : r.outcomes) by_key[variant_key(o.measure, o.w)] = &o;
    out << r.market << ',' << format_timestamp(r.train_window.start) << ','
        << format_timestamp(r.train_window.end) << ',' << format_timestamp(r.test_window.start)
        << ',' << format_timestamp(r.test_window.end) << ',' << r.eligible_users << ','
        << r.skipped_users;
    for (const auto& key : keys) {
      const auto it = by_key.find(key);
      if (it == by_key.end()) {
        throw std::invalid_argument("save_summary_csv: measure " + key +
                                    " missing from a report");
      }
      out << ',';
      if (it->second->accuracy) out << fixed6(*it->second->accuracy);
    }
    out << '\n';
  }

  if (!footers.empty()) {
    std::unordered_map<std::string, const MeasureSummary*> by_key;
    for (const auto& f : footers) by_key[variant_key(f.measure, f.w)] = &f;
    const auto footer_row = [&](const char* label, auto field) {
      out << label << ",,,,,,";
      for (const auto& key : keys) {
        const auto it = by_key.find(key);
        if (it == by_key.end()) {
          throw std::invalid_argument("save_summary_csv: footer missing measure " + key);
        }
        out << ',' << field(*it->second);
      }
      out << '\n';
    };
    footer_row("avg_accuracy", [](const MeasureSummary& s) { return fixed6(s.mean_accuracy); });
    footer_row("avg_rank", [](const MeasureSummary& s) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", s.mean_rank);
      return std::string(buf);
    });
    footer_row("delta_vs_baseline",
               [](const MeasureSummary& s) { return fixed6(s.delta_vs_baseline); });
  }
  finish_write(out, csv_path);
}

}  // namespace destsim
