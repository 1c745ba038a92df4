#pragma once

#include "destsim/core.hpp"
#include "destsim/interaction.hpp"
#include "destsim/measures.hpp"
#include "destsim/time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace destsim {

/// One masked test user: the hidden destination plus the rest of their
/// searches, both as indices into the TRAINING destination index.
struct MaskedSplit {
  std::string user_id;
  std::vector<Index> context;
  Index masked = 0;
};

struct MaskPlan {
  std::vector<MaskedSplit> splits;
  std::int64_t skipped_users = 0;  // < 2 distinct destinations, or any unknown to training
};

/// Hide one uniformly chosen destination per eligible test user. A user is
/// eligible when they searched >= 2 distinct destinations and training knows
/// all of them; others are skipped (never partially included, which would
/// bias fusion toward well-covered users). The choice comes from a per-user
/// generator seeded by hash(seed, user_id), so results do not depend on user
/// iteration order, and the eligible set does not depend on the seed at all.
MaskPlan mask_one_split(const InteractionMatrix& test,
                        const std::vector<std::string>& train_dest_codes,
                        std::uint64_t seed);

/// Accuracy of one similarity matrix on a set of masked splits.
struct MeasureOutcome {
  Measure measure = Measure::ccs;
  std::optional<double> w;         // pccs variants only
  std::int64_t hits = 0;
  std::int64_t eligible = 0;
  std::optional<double> accuracy;  // hits / eligible; empty when eligible == 0
};

/// Key for matching outcomes across periods, e.g. "cosine" or "pccs(w=0.5)".
std::string variant_key(Measure measure, std::optional<double> w);

/// Fuse each split's context rows, take the top k, and score a hit when the
/// masked destination appears. Splits are independent, so `threads` > 1
/// shards them with a plain integer hit-count reduction — the result is
/// identical at any parallelism.
MeasureOutcome evaluate_topk(const SimilarityMatrix& s,
                             const std::vector<MaskedSplit>& splits, int k,
                             unsigned threads = 1);

/// One evaluation period: a train/test window pair on one market.
struct EvalReport {
  std::string market;
  TimeWindow train_window{0, 0};
  TimeWindow test_window{0, 0};
  int k = 5;
  std::uint64_t seed = 0;
  std::int64_t eligible_users = 0;
  std::int64_t skipped_users = 0;
  std::vector<MeasureOutcome> outcomes;
};

/// Cross-period aggregate for one measure variant.
struct MeasureSummary {
  Measure measure = Measure::ccs;
  std::optional<double> w;
  double mean_accuracy = 0.0;
  double mean_rank = 0.0;           // 1 = best within each period, ties averaged
  double delta_vs_baseline = 0.0;   // mean_accuracy - baseline mean_accuracy
};

/// Rank measure variants within each period (1 = highest accuracy, ties
/// share the average of the tied positions) and average across periods.
/// Every report must carry the same variant set, and the baseline must be
/// one of them; periods with no eligible users carry no ranking information
/// and are skipped. Output keeps the variant order of the first report.
std::vector<MeasureSummary> average_ranks(const std::vector<EvalReport>& reports,
                                          Measure baseline,
                                          std::optional<double> baseline_w = std::nullopt);

}  // namespace destsim
