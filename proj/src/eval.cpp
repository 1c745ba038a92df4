#include "destsim/eval.hpp"

#include "destsim/recommend.hpp"
#include "destsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>

namespace destsim {

MaskPlan mask_one_split(const InteractionMatrix& test,
                        const std::vector<std::string>& train_dest_codes,
                        std::uint64_t seed) {
  // Map the test matrix's destination index onto training's. Both code
  // lists are sorted, so unmatched codes fall out of a single lower_bound.
  const auto& test_codes = test.dest_codes();
  std::vector<Index> to_train(test_codes.size(), -1);
  for (size_t t = 0; t < test_codes.size(); ++t) {
    const auto it =
        std::lower_bound(train_dest_codes.begin(), train_dest_codes.end(), test_codes[t]);
    if (it != train_dest_codes.end() && *it == test_codes[t]) {
      to_train[t] = static_cast<Index>(it - train_dest_codes.begin());
    }
  }

  MaskPlan plan;
  const auto& users = test.user_ids();
  for (size_t u = 0; u < users.size(); ++u) {
    const auto row = test.user_row(static_cast<Index>(u));
    std::vector<Index> mapped;
    mapped.reserve(row.size());
    bool known = true;
    for (const auto t : row) {
      const Index idx = to_train[static_cast<size_t>(t)];
      if (idx < 0) {
        known = false;
        break;
      }
      mapped.push_back(idx);
    }
    if (!known || mapped.size() < 2) {
      ++plan.skipped_users;
      continue;
    }
    Rng rng(hash_combine(seed, fnv1a64(users[u])));
    const auto pick = static_cast<size_t>(rng.bounded(mapped.size()));
    MaskedSplit split;
    split.user_id = users[u];
    split.masked = mapped[pick];
    split.context = std::move(mapped);
    split.context.erase(split.context.begin() + static_cast<std::ptrdiff_t>(pick));
    plan.splits.push_back(std::move(split));
  }
  return plan;
}

std::string variant_key(Measure measure, std::optional<double> w) {
  if (!w) return std::string(to_string(measure));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s(w=%g)", to_string(measure).data(), *w);
  return buf;
}

namespace {

std::int64_t count_hits(const SimilarityMatrix& s, const std::vector<MaskedSplit>& splits,
                        size_t begin, size_t end, int k) {
  std::int64_t hits = 0;
  for (size_t i = begin; i < end; ++i) {
    const auto& split = splits[i];
    const auto recs = top_k(fuse_rows(s, split.context), s.dest_codes, k);
    const auto& masked_code = s.dest_codes[static_cast<size_t>(split.masked)];
    for (const auto& rec : recs) {
      if (rec.destination == masked_code) {
        ++hits;
        break;
      }
    }
  }
  return hits;
}

}  // namespace

MeasureOutcome evaluate_topk(const SimilarityMatrix& s,
                             const std::vector<MaskedSplit>& splits, int k,
                             unsigned threads) {
  if (k < 1) {
    throw std::invalid_argument("evaluate_topk: k must be at least 1");
  }
  if (static_cast<Index>(s.dest_codes.size()) != s.n()) {
    throw std::invalid_argument("evaluate_topk: similarity matrix has no destination codes");
  }

  std::int64_t hits = 0;
  if (threads <= 1 || splits.size() < 2) {
    hits = count_hits(s, splits, 0, splits.size(), k);
  } else {
    // Shard users across workers; hits add commutatively, so the total is
    // the same for every shard count.
    const size_t workers = std::min<size_t>(threads, splits.size());
    std::vector<std::int64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const size_t chunk = (splits.size() + workers - 1) / workers;
    for (size_t t = 0; t < workers; ++t) {
      const size_t begin = t * chunk;
      const size_t end = std::min(splits.size(), begin + chunk);
      pool.emplace_back([&, t, begin, end] { partial[t] = count_hits(s, splits, begin, end, k); });
    }
    for (auto& th : pool) th.join();
    for (const auto p : partial) hits += p;
  }

  MeasureOutcome out;
  out.measure = s.measure;
  if (s.w) out.w = static_cast<double>(*s.w);
  out.hits = hits;
  out.eligible = static_cast<std::int64_t>(splits.size());
  if (out.eligible > 0) {
    out.accuracy = static_cast<double>(out.hits) / static_cast<double>(out.eligible);
  }
  return out;
}

namespace {

// Positions 1..n by descending accuracy; tied accuracies share the mean of
// the positions they span.
std::vector<double> tie_averaged_ranks(const std::vector<double>& accuracies) {
  const size_t n = accuracies.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return accuracies[a] > accuracies[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t pos = 0;
  while (pos < n) {
    size_t end = pos + 1;
    while (end < n && accuracies[order[end]] == accuracies[order[pos]]) ++end;
    const double shared = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
    for (size_t i = pos; i < end; ++i) ranks[order[i]] = shared;
    pos = end;
  }
  return ranks;
}

}  // namespace

std::vector<MeasureSummary> average_ranks(const std::vector<EvalReport>& reports,
                                          Measure baseline,
                                          std::optional<double> baseline_w) {
  if (reports.empty()) {
    throw std::invalid_argument("average_ranks: no reports");
  }

  // Variant layout comes from the first report; every period must match it.
  const auto& first = reports.front().outcomes;
  if (first.empty()) {
    throw std::invalid_argument("average_ranks: report has no measure outcomes");
  }
  std::vector<std::string> keys;
  keys.reserve(first.size());
  for (const auto& o : first) keys.push_back(variant_key(o.measure, o.w));

  const size_t nv = keys.size();
  std::vector<double> rank_sum(nv, 0.0), acc_sum(nv, 0.0);
  size_t used_periods = 0;

  for (const auto& report : reports) {
    std::map<std::string, const MeasureOutcome*> by_key;
    for (const auto& o : report.outcomes) by_key[variant_key(o.measure, o.w)] = &o;

    std::vector<double> accuracies(nv);
    bool rankable = true;
    for (size_t v = 0; v < nv; ++v) {
      const auto it = by_key.find(keys[v]);
      if (it == by_key.end()) {
        throw std::invalid_argument("average_ranks: measure " + keys[v] +
                                    " missing from a period");
      }
      if (!it->second->accuracy) {
        rankable = false;  // no eligible users this period
        break;
      }
      accuracies[v] = *it->second->accuracy;
    }
    if (!rankable) continue;

    const auto ranks = tie_averaged_ranks(accuracies);
    for (size_t v = 0; v < nv; ++v) {
      rank_sum[v] += ranks[v];
      acc_sum[v] += accuracies[v];
    }
    ++used_periods;
  }

  if (used_periods == 0) {
    throw std::invalid_argument("average_ranks: no period has eligible users");
  }

  const std::string baseline_key = variant_key(baseline, baseline_w);
  const auto base_it = std::find(keys.begin(), keys.end(), baseline_key);
  if (base_it == keys.end()) {
    throw std::invalid_argument("average_ranks: baseline " + baseline_key +
                                " not among evaluated measures");
  }
  const double base_acc =
      acc_sum[static_cast<size_t>(base_it - keys.begin())] / static_cast<double>(used_periods);

  std::vector<MeasureSummary> out(nv);
  for (size_t v = 0; v < nv; ++v) {
    out[v].measure = first[v].measure;
    out[v].w = first[v].w;
    out[v].mean_accuracy = acc_sum[v] / static_cast<double>(used_periods);
    out[v].mean_rank = rank_sum[v] / static_cast<double>(used_periods);
    out[v].delta_vs_baseline = out[v].mean_accuracy - base_acc;
  }
  return out;
}

}  // namespace destsim
