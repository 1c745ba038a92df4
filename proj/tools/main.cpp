#include "destsim/eval.hpp"
#include "destsim/ingest.hpp"
#include "destsim/interaction.hpp"
#include "destsim/io.hpp"
#include "destsim/measures.hpp"
#include "destsim/recommend.hpp"
#include "destsim/synth.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace destsim;
namespace fs = std::filesystem;

constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::optional<LogFormat> parse_format(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name == "csv") return LogFormat::csv;
  if (name == "jsonl") return LogFormat::jsonl;
  throw std::invalid_argument("unknown log format: " + name + " (expected csv or jsonl)");
}

// Accepts repeated flags and comma lists; result is deduplicated and sorted
// by tag so output order never depends on completion order.
std::vector<Measure> parse_measures(const std::vector<std::string>& raw) {
  std::vector<Measure> out;
  if (raw.empty()) {
    out.assign(kAllMeasures.begin(), kAllMeasures.end());
  } else {
    for (const auto& chunk : raw) {
      size_t pos = 0;
      while (pos <= chunk.size()) {
        const size_t comma = chunk.find(',', pos);
        const auto piece = chunk.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!piece.empty()) out.push_back(parse_measure(piece));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](Measure a, Measure b) { return to_string(a) < to_string(b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw std::invalid_argument("measure list is empty");
  return out;
}

PopularityDenominator parse_denominator(const std::string& name) {
  if (name == "n") return PopularityDenominator::destinations;
  if (name == "m") return PopularityDenominator::users;
  throw std::invalid_argument("popularity-denominator must be n or m, got: " + name);
}

void report_empty_window(const TimeWindow& window, const std::string& market) {
  std::string what = "empty window " + format_timestamp(window.start) + ".." +
                     format_timestamp(window.end);
  if (!market.empty()) what += " for market " + market;
  throw io_error(what + ": no records to build from");
}

// Windowed, deduped records per market, restricted to the requested markets
// (all markets when the request list is empty).
std::map<std::string, std::vector<SearchRecord>> market_slices(
    std::span<const SearchRecord> records, const TimeWindow& window,
    std::vector<std::string> markets) {
  auto deduped = dedupe(filter_window(records, window.start, window.end));
  auto by_market = partition_by_market(deduped);
  if (markets.empty()) {
    if (by_market.empty()) report_empty_window(window, "");
    return by_market;
  }
  for (auto& m : markets) m = upper(std::move(m));
  std::sort(markets.begin(), markets.end());
  markets.erase(std::unique(markets.begin(), markets.end()), markets.end());
  std::map<std::string, std::vector<SearchRecord>> selected;
  for (const auto& m : markets) {
    auto it = by_market.find(m);
    if (it == by_market.end()) report_empty_window(window, m);
    selected.emplace(it->first, std::move(it->second));
  }
  return selected;
}

// ---- generate ----

struct GenerateArgs {
  SynthConfig config;
  std::string time_start = format_timestamp(SynthConfig{}.time_range.start);
  std::string time_end = format_timestamp(SynthConfig{}.time_range.end);
  std::string out;
};

int run_generate(GenerateArgs& args) {
  args.config.time_range = {parse_timestamp(args.time_start), parse_timestamp(args.time_end)};
  args.config.market = upper(args.config.market);
  const auto records = generate(args.config);

  const fs::path out_path(args.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw io_error("cannot open " + args.out + " for writing");
  write_csv_log(out, records);
  out.flush();
  if (!out) throw io_error("failed while writing " + args.out);

  std::cout << "wrote " << records.size() << " records to " << args.out << "\n";
  return 0;
}

// ---- build ----

struct BuildArgs {
  std::string input;
  std::string format;
  std::vector<std::string> markets;
  std::string train_start, train_end;
  std::vector<std::string> measures;
  double w = 0.5;
  std::string denominator = "n";
  std::string out;
  bool deterministic = false;
  std::int64_t bot_threshold = 1000;
  std::int64_t min_support = 1;
  double malformed_tolerance = 0.5;
};

int run_build(const BuildArgs& args) {
  const TimeWindow window{parse_timestamp(args.train_start), parse_timestamp(args.train_end)};
  if (window.start >= window.end) {
    throw std::invalid_argument("train window is empty: " + args.train_start +
                                " .. " + args.train_end);
  }
  const auto measures = parse_measures(args.measures);
  const auto denominator = parse_denominator(args.denominator);
  const bool want_pccs =
      std::find(measures.begin(), measures.end(), Measure::pccs) != measures.end();

  const auto parsed =
      parse_log_file(args.input, parse_format(args.format), {args.malformed_tolerance});
  auto slices = market_slices(parsed.records, window, args.markets);

  fs::create_directories(args.out);
  const SaveOptions save_options{args.deterministic};

  for (const auto& [market, records] : slices) {
    BuildOptions options;
    options.bot_degree_threshold = args.bot_threshold;
    options.min_support = args.min_support;
    options.window = window;
    const auto matrix = build_matrix(records, options);
    const auto stats = cooccurrence(matrix);
    std::optional<PopularityVector> pop;
    if (want_pccs) pop = popularity(stats, args.w, denominator);

    const double density =
        static_cast<double>(matrix.entry_count()) /
        (static_cast<double>(matrix.user_count()) * static_cast<double>(matrix.dest_count()));

    for (const auto measure : measures) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto similarity = compute(measure, stats, pop);
      const fs::path path =
          fs::path(args.out) / (market + "_" + std::string(to_string(measure)) + ".csv");
      save_similarity(similarity, path, save_options);
      const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
      char line[160];
      std::snprintf(line, sizeof(line), "market=%s measure=%s n=%lld density=%.6f wall_ms=%lld",
                    market.c_str(), to_string(measure).data(),
                    static_cast<long long>(stats.n()), density, static_cast<long long>(wall));
      std::cout << line << "\n";
    }
  }
  return 0;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string input;
  std::string format;
  std::vector<std::string> markets;
  std::vector<std::string> train_start, train_end, test_start, test_end;
  std::vector<std::string> measures;
  std::vector<double> w_grid{0.1, 0.3, 0.5, 0.7, 0.9};
  int k = 5;
  std::uint64_t seed = 0;
  std::string baseline = "pearson";
  std::optional<double> baseline_w;
  std::string denominator = "n";
  unsigned threads = 1;
  std::string out;
  bool deterministic = false;
  std::int64_t bot_threshold = 1000;
  std::int64_t min_support = 1;
  double malformed_tolerance = 0.5;
};

int run_evaluate(EvaluateArgs& args) {
  const size_t n_periods = args.train_start.size();
  if (n_periods == 0 || args.train_end.size() != n_periods ||
      args.test_start.size() != n_periods || args.test_end.size() != n_periods) {
    throw std::invalid_argument(
        "each period needs --train-start --train-end --test-start --test-end");
  }
  std::vector<WindowSpec> periods(n_periods);
  for (size_t p = 0; p < n_periods; ++p) {
    periods[p] = {parse_timestamp(args.train_start[p]), parse_timestamp(args.train_end[p]),
                  parse_timestamp(args.test_start[p]), parse_timestamp(args.test_end[p])};
    periods[p].validate();
  }

  const auto measures = parse_measures(args.measures);
  const auto denominator = parse_denominator(args.denominator);
  std::sort(args.w_grid.begin(), args.w_grid.end());
  args.w_grid.erase(std::unique(args.w_grid.begin(), args.w_grid.end()), args.w_grid.end());
  if (args.w_grid.empty()) throw std::invalid_argument("w grid is empty");

  const Measure baseline = parse_measure(args.baseline);
  std::optional<double> baseline_w = args.baseline_w;
  if (baseline == Measure::pccs && !baseline_w) baseline_w = args.w_grid.front();
  if (baseline != Measure::pccs && baseline_w) {
    throw std::invalid_argument("--baseline-w only applies to a pccs baseline");
  }

  const auto parsed =
      parse_log_file(args.input, parse_format(args.format), {args.malformed_tolerance});
  auto by_market = partition_by_market(parsed.records);
  std::vector<std::string> markets = args.markets;
  if (markets.empty()) {
    for (const auto& [m, _] : by_market) markets.push_back(m);
  } else {
    for (auto& m : markets) m = upper(std::move(m));
    std::sort(markets.begin(), markets.end());
    markets.erase(std::unique(markets.begin(), markets.end()), markets.end());
  }
  if (markets.empty()) throw io_error("no records in " + args.input);

  BuildOptions build_options;
  build_options.bot_degree_threshold = args.bot_threshold;
  build_options.min_support = args.min_support;

  fs::create_directories(args.out);
  const SaveOptions save_options{args.deterministic};
  std::vector<EvalReport> all_reports;

  for (const auto& market : markets) {
    const auto it = by_market.find(market);
    if (it == by_market.end()) report_empty_window(periods.front().train(), market);
    const auto& market_records = it->second;

    std::vector<EvalReport> market_reports;
    for (const auto& spec : periods) {
      const auto train_records =
          dedupe(filter_window(market_records, spec.train_start, spec.train_end));
      if (train_records.empty()) report_empty_window(spec.train(), market);
      auto train_options = build_options;
      train_options.window = spec.train();
      const auto train_matrix = build_matrix(train_records, train_options);
      const auto stats = cooccurrence(train_matrix);

      EvalReport report;
      report.market = market;
      report.train_window = spec.train();
      report.test_window = spec.test();
      report.k = args.k;
      report.seed = args.seed;

      MaskPlan plan;
      const auto test_records =
          dedupe(filter_window(market_records, spec.test_start, spec.test_end));
      if (!test_records.empty()) {
        auto test_options = build_options;
        test_options.window = spec.test();
        const auto test_matrix = build_matrix(test_records, test_options);
        plan = mask_one_split(test_matrix, train_matrix.dest_codes(), args.seed);
      }
      report.eligible_users = static_cast<std::int64_t>(plan.splits.size());
      report.skipped_users = plan.skipped_users;
      if (report.eligible_users == 0) {
        std::cerr << "warning: market " << market << ", test window "
                  << format_timestamp(spec.test_start) << ".."
                  << format_timestamp(spec.test_end)
                  << " has no eligible users; accuracy reported as null\n";
      }

      for (const auto measure : measures) {
        if (measure == Measure::pccs) {
          for (const double w : args.w_grid) {
            const auto pop = popularity(stats, w, denominator);
            const auto similarity = compute(Measure::pccs, stats, pop);
            report.outcomes.push_back(
                evaluate_topk(similarity, plan.splits, args.k, args.threads));
          }
        } else {
          const auto similarity = compute(measure, stats);
          report.outcomes.push_back(
              evaluate_topk(similarity, plan.splits, args.k, args.threads));
        }
      }
      market_reports.push_back(std::move(report));
    }
    const fs::path report_path = fs::path(args.out) / ("report_" + market + ".json");
    save_market_report(market, market_reports, report_path, save_options);
    std::cout << "wrote " << report_path.string() << "\n";
    for (auto& r : market_reports) all_reports.push_back(std::move(r));
  }

  std::vector<MeasureSummary> footers;
  try {
    footers = average_ranks(all_reports, baseline, baseline_w);
  } catch (const std::invalid_argument& e) {
    std::cerr << "warning: summary footers skipped: " << e.what() << "\n";
  }
  const fs::path summary_path = fs::path(args.out) / "summary.csv";
  save_summary_csv(all_reports, footers, summary_path);
  std::cout << "wrote " << summary_path.string() << "\n";
  return 0;
}

// ---- recommend ----

struct RecommendArgs {
  std::string input;
  int k = 5;
  std::vector<std::string> searched;
};

int run_recommend(const RecommendArgs& args) {
  const auto similarity = load_similarity(args.input);
  std::vector<std::string> searched;
  searched.reserve(args.searched.size());
  for (const auto& code : args.searched) searched.push_back(upper(code));

  const auto recs = recommend(similarity, searched, args.k);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& rec : recs) {
    out.push_back({{"destination", rec.destination}, {"score", rec.score}, {"rank", rec.rank}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// The documented config format is a flat key=value file for whichever
// subcommand was invoked. CLI11 routes config keys by section, so bare keys
// are re-parented onto the parsed subcommand before dispatch.
class FlatSubcommandConfig : public CLI::ConfigINI {
 public:
  explicit FlatSubcommandConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto parsed = app_->get_subcommands();
    if (parsed.empty()) return items;
    const std::string& active = parsed.front()->get_name();
    for (auto& item : items) {
      if (item.parents.empty() && item.name != "++" && item.name != "--") {
        item.parents.push_back(active);
      }
    }
    return items;
  }

 private:
  const CLI::App* app_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Destination similarity matrices, recommendations, and protocol evaluation "
               "from binary search logs"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Read options for the invoked subcommand from a flat key=value file; "
                 "command-line flags win on conflict");
  app.config_formatter(std::make_shared<FlatSubcommandConfig>(&app));
  app.allow_config_extras(false);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Write a synthetic search log in the ingest "
                                             "CSV format");
  gen->fallthrough();  // lets a trailing --config reach the top-level option
  gen->add_option("--users", gen_args.config.n_users, "number of users")
      ->capture_default_str();
  gen->add_option("--destinations", gen_args.config.n_destinations, "number of destinations")
      ->capture_default_str();
  gen->add_option("--clusters", gen_args.config.n_clusters, "number of interest clusters")
      ->capture_default_str();
  gen->add_option("--zipf", gen_args.config.zipf_exponent, "popularity skew exponent")
      ->capture_default_str();
  gen->add_option("--searches-lo", gen_args.config.searches_lo,
                  "minimum distinct destinations per user")
      ->capture_default_str();
  gen->add_option("--searches-hi", gen_args.config.searches_hi,
                  "maximum distinct destinations per user")
      ->capture_default_str();
  gen->add_option("--noise", gen_args.config.noise,
                  "probability a search ignores the user's cluster")
      ->capture_default_str();
  gen->add_option("--market", gen_args.config.market, "market tag for every record")
      ->capture_default_str();
  gen->add_option("--time-start", gen_args.time_start, "record timestamps start (inclusive)")
      ->capture_default_str();
  gen->add_option("--time-end", gen_args.time_end, "record timestamps end (exclusive)")
      ->capture_default_str();
  gen->add_option("--seed", gen_args.config.seed, "generator seed")->capture_default_str();
  gen->add_option("--out", gen_args.out, "output CSV path")->required();

  BuildArgs build_args;
  auto* build = app.add_subcommand("build", "Build similarity matrices per market and "
                                            "measure from a search log");
  build->fallthrough();
  build->add_option("--input", build_args.input, "search log (CSV or JSONL)")->required();
  build->add_option("--format", build_args.format, "force input format: csv or jsonl");
  build->add_option("--market", build_args.markets,
                    "markets to build (repeatable; default: all in the log)");
  build->add_option("--train-start", build_args.train_start,
                    "training window start, YYYY-MM-DDThh:mm:ssZ")
      ->required();
  build->add_option("--train-end", build_args.train_end,
                    "training window end (exclusive)")
      ->required();
  build->add_option("--measures", build_args.measures,
                    "measures to build (repeatable or comma-separated; default: all)");
  build->add_option("--w", build_args.w, "popularity weight for pccs")->capture_default_str();
  build->add_option("--popularity-denominator", build_args.denominator,
                    "popularity rank denominator: n (destinations) or m (users)")
      ->capture_default_str();
  build->add_option("--out", build_args.out, "output directory")->required();
  build->add_flag("--deterministic", build_args.deterministic,
                  "omit created_at so outputs are byte-stable");
  build->add_option("--bot-threshold", build_args.bot_threshold,
                    "drop users with more distinct destinations than this")
      ->capture_default_str();
  build->add_option("--min-support", build_args.min_support,
                    "drop destinations searched by fewer users")
      ->capture_default_str();
  build->add_option("--malformed-tolerance", build_args.malformed_tolerance,
                    "maximum tolerated malformed row fraction")
      ->capture_default_str();

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Mask one destination per test user and "
                                                  "score top-k recovery per measure");
  evaluate->fallthrough();
  evaluate->add_option("--input", eval_args.input, "search log (CSV or JSONL)")->required();
  evaluate->add_option("--format", eval_args.format, "force input format: csv or jsonl");
  evaluate->add_option("--market", eval_args.markets,
                       "markets to evaluate (repeatable; default: all in the log)");
  evaluate->add_option("--train-start", eval_args.train_start,
                       "training window start (repeatable, one per period)")
      ->required();
  evaluate->add_option("--train-end", eval_args.train_end,
                       "training window end (repeatable)")
      ->required();
  evaluate->add_option("--test-start", eval_args.test_start,
                       "test window start (repeatable)")
      ->required();
  evaluate->add_option("--test-end", eval_args.test_end, "test window end (repeatable)")
      ->required();
  evaluate->add_option("--measures", eval_args.measures,
                       "measures to evaluate (repeatable or comma-separated; default: all)");
  evaluate->add_option("--w", eval_args.w_grid,
                       "pccs popularity weights to sweep (repeatable)")
      ->capture_default_str();
  evaluate->add_option("--k", eval_args.k, "recommendation list length")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", eval_args.seed, "mask-selection seed")->capture_default_str();
  evaluate->add_option("--baseline", eval_args.baseline,
                       "measure the summary deltas compare against")
      ->capture_default_str();
  evaluate->add_option("--baseline-w", eval_args.baseline_w,
                       "w of the baseline when it is pccs (default: first of the grid)");
  evaluate->add_option("--popularity-denominator", eval_args.denominator,
                       "popularity rank denominator: n (destinations) or m (users)")
      ->capture_default_str();
  evaluate->add_option("--threads", eval_args.threads,
                       "worker threads for split evaluation")
      ->capture_default_str();
  evaluate->add_option("--out", eval_args.out, "output directory")->required();
  evaluate->add_flag("--deterministic", eval_args.deterministic,
                     "omit created_at so reports are byte-stable");
  evaluate->add_option("--bot-threshold", eval_args.bot_threshold,
                       "drop users with more distinct destinations than this")
      ->capture_default_str();
  evaluate->add_option("--min-support", eval_args.min_support,
                       "drop destinations searched by fewer users")
      ->capture_default_str();
  evaluate->add_option("--malformed-tolerance", eval_args.malformed_tolerance,
                       "maximum tolerated malformed row fraction")
      ->capture_default_str();

  RecommendArgs rec_args;
  auto* rec = app.add_subcommand("recommend", "Top-k destinations for a searched set, "
                                              "from a built similarity matrix");
  rec->fallthrough();
  rec->add_option("--input", rec_args.input, "similarity matrix CSV (with sidecar)")
      ->required();
  rec->add_option("--k", rec_args.k, "recommendation list length")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  rec->add_option("searched", rec_args.searched, "destination codes already searched")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (gen->parsed()) return run_generate(gen_args);
    if (build->parsed()) return run_build(build_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (rec->parsed()) return run_recommend(rec_args);
    return kExitInternal;  // unreachable: a subcommand is required
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const format_error& e) {
    std::cerr << "error: " << e.what();
    if (e.line() >= 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << "\n";
    return kExitInput;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
